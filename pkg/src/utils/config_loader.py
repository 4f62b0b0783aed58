"""
Configuration Loader Module

Numeric defaults for nets, probes, the criterion search and the verification
suite live in config/settings.yaml. Modules read them through `default()`.
"""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SETTINGS_FILE = 'settings.yaml'


class ConfigLoader:
    """
    Reads YAML files from a config directory and walks dotted key paths.

    Parsed files are cached per loader.
    """

    def __init__(self, config_dir: Optional[str] = None):
        """
        Args:
            config_dir: Directory holding settings.yaml. Defaults to the
                        repository's config/ directory.
        """
        if config_dir is None:
            self.config_dir = Path(__file__).parent.parent.parent / 'config'
        else:
            self.config_dir = Path(config_dir)

        if not self.config_dir.exists():
            logger.warning(f"Config directory not found: {self.config_dir}. Using current directory.")
            self.config_dir = Path('.')

        self._cache: Dict[str, Dict[str, Any]] = {}

    def _load_yaml(self, filename: str) -> Dict[str, Any]:
        if filename not in self._cache:
            file_path = self.config_dir / filename
            logger.debug(f"Loading YAML configuration: {file_path}")
            try:
                with open(file_path, 'r', encoding='utf-8') as f:
                    self._cache[filename] = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                logger.error(f"Invalid YAML in {file_path}: {e}")
                raise
        return self._cache[filename]

    def get_value(self, filename: str, key_path: str, default: Any = None) -> Any:
        """
        Walk `key_path` ('net.levels') into a YAML file.

        Returns `default` for a missing key or a file that is not YAML.
        """
        if not filename.endswith(('.yaml', '.yml')):
            logger.error(f"Unsupported configuration file type: {filename}")
            return default

        value: Any = self._load_yaml(filename)
        for key in key_path.split('.'):
            if not isinstance(value, dict) or key not in value:
                logger.debug(f"Key not found in configuration: {key_path}")
                return default
            value = value[key]
        return value


_default_loader: Optional[ConfigLoader] = None


def get_config_loader() -> ConfigLoader:
    """Shared loader for SSC_CONFIG_DIR, or config/ when it is unset."""
    global _default_loader
    if _default_loader is None:
        from src.utils.config import get_settings
        _default_loader = ConfigLoader(get_settings().CONFIG_DIR)
    return _default_loader


def default(key_path: str, fallback: Any = None) -> Any:
    """Look up a numeric default in settings.yaml; `fallback` when absent."""
    try:
        return get_config_loader().get_value(SETTINGS_FILE, key_path, fallback)
    except (FileNotFoundError, yaml.YAMLError):
        return fallback
