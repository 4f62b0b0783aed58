"""
Common fixtures for tests.
This file contains fixtures that can be used across all test modules.
"""
import os
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
import pytest
from dotenv import load_dotenv

from src.cli.scene import parse_scene
from src.constructions.ball_product import BallProduct, Radii
from src.constructions.functions import build_thm52
from src.sigma.space import ZERO_ANCHOR, Anchor, CoordSpace, NormKind, SigmaSpace, SpaceFamily
from src.utils.config import get_settings

PROJECT_ROOT = Path(__file__).parent.parent.parent
GOLDEN_SCENE = PROJECT_ROOT / "config" / "golden_scene.json"


@pytest.fixture(scope="session", autouse=True)
def load_test_env():
    """
    Load the test environment variables.
    This fixture runs automatically at the start of the test session.
    """
    if os.environ.get("CI"):
        return

    env_file = PROJECT_ROOT / ".env.test"
    if env_file.exists():
        load_dotenv(dotenv_path=str(env_file))

    os.environ["SSC_APP_ENV"] = "test"
    os.environ.setdefault("SSC_LOG_LEVEL", "WARNING")


@pytest.fixture
def test_settings():
    """Settings built from test values, single-threaded."""
    env_vars = {
        "SSC_APP_ENV": "test",
        "SSC_LOG_LEVEL": "WARNING",
        "SSC_DEFAULT_SEED": "7",
        "SSC_WORKERS": "1",
    }
    get_settings.cache_clear()
    with mock.patch.dict(os.environ, env_vars):
        yield get_settings()
    get_settings.cache_clear()


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdirname:
        yield Path(tmpdirname)


@pytest.fixture
def rng():
    """A seeded generator; every test gets the same stream."""
    return np.random.default_rng(12345)


@pytest.fixture
def line_space():
    """sigma(0) in the product of real lines."""
    return SigmaSpace(SpaceFamily.uniform(1, NormKind.L2))


@pytest.fixture
def mixed_space():
    """Plane with the l1 norm at index 1, 3-space with l-infinity at 2, lines afterwards."""
    family = SpaceFamily(prefix=(CoordSpace(2, NormKind.L1), CoordSpace(3, NormKind.LINF)),
                         tail=CoordSpace(1, NormKind.L2))
    return SigmaSpace(family, [Anchor("shifted", {1: (1.0, 0.0)})])


@pytest.fixture
def unit_f(line_space):
    """The single ball-product function with w = 0 and r = 1 on every line."""
    bp = BallProduct(line_space.base_point(ZERO_ANCHOR), Radii.constant(1.0))
    return build_thm52(line_space, bp, name="f")


@pytest.fixture
def golden_scene_text():
    """Raw JSON of the golden scene shipped in config/."""
    return GOLDEN_SCENE.read_text(encoding="utf-8")


@pytest.fixture
def golden_scene(golden_scene_text):
    """The parsed golden scene."""
    return parse_scene(golden_scene_text)
