from pathlib import Path

import pytest

from netboard.command_sets import BUILTIN_SETS
from netboard.scenarios import demo_story, golden_script
from netboard.story import MagnetSpec

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def story():
    return demo_story()


@pytest.fixture(scope="session")
def default_set():
    return BUILTIN_SETS["default"]


@pytest.fixture(scope="session")
def golden():
    return golden_script()


@pytest.fixture()
def roster():
    return [
        MagnetSpec("m1", 1, 2, 0.033333),
        MagnetSpec("m2", 3, 4, 0.033333),
        MagnetSpec("m3", 5, 6, 0.033333),
        MagnetSpec("w1", 11, 12, 0.033333, role="widget"),
    ]


@pytest.fixture(scope="session")
def data_dir():
    return DATA
