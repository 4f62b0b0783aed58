"""
Runtime settings for the toolkit.
"""
import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseSettings, validator

from src.utils.logger import configure_logging, setup_logger

logger = setup_logger(__name__)

_LOG_LEVELS = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}


def load_env_file(env: str = None):
    """
    Load environment variables from .env files.

    Args:
        env: Environment name to load (e.g., 'development', 'test')
    """
    env = env or os.environ.get("APP_ENV", "development")

    env_file = f".env.{env}"
    if os.path.exists(env_file):
        load_dotenv(env_file)
        logger.info(f"Loaded environment variables from {env_file}")

    if os.path.exists(".env"):
        load_dotenv(".env", override=False)
        logger.info("Loaded environment variables from .env")


class Settings(BaseSettings):
    """Settings read from SSC_* environment variables."""

    APP_ENV: str = "development"
    APP_NAME: str = "sigma-ssc"
    APP_VERSION: str = "0.1.0"
    LOG_LEVEL: str = "INFO"

    # Fallbacks used when a scene task or CLI call gives none
    DEFAULT_SEED: int = 20240531
    DEFAULT_TOL: float = 1e-2

    # Worker threads used by the task runner; 1 runs tasks inline
    WORKERS: int = 1

    CONFIG_DIR: Optional[str] = None

    @validator("LOG_LEVEL")
    def check_log_level(cls, v):
        """Normalize and validate the log level name."""
        v = v.upper()
        if v not in _LOG_LEVELS:
            raise ValueError(f"Unknown log level: {v}")
        return v

    @validator("DEFAULT_TOL")
    def check_tol(cls, v):
        """Tolerances must be positive."""
        if v <= 0:
            raise ValueError("DEFAULT_TOL must be positive")
        return v

    @validator("WORKERS")
    def check_workers(cls, v):
        """At least one worker."""
        if v < 1:
            raise ValueError("WORKERS must be at least 1")
        return v

    class Config:
        """Configuration for the settings."""
        env_prefix = "SSC_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True


@lru_cache()
def get_settings() -> Settings:
    """
    Get application settings with caching.

    Returns:
        Settings: Application settings
    """
    load_env_file()

    settings = Settings()
    configure_logging(settings.LOG_LEVEL)

    logger.info(f"Loaded settings for environment: {settings.APP_ENV}")
    return settings
