from __future__ import annotations

from pathlib import Path

import pytest

from leakline.model import PIPELINE_A, PIPELINE_B, SeriesConfig

REPO = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO / "scenarios"
REPLAY_DIR = SCENARIO_DIR / "replays"


@pytest.fixture
def pipeline_a():
    return PIPELINE_A


@pytest.fixture
def pipeline_b():
    return PIPELINE_B


@pytest.fixture
def series():
    return SeriesConfig()


@pytest.fixture
def scenario_path():
    def _path(name: str) -> str:
        return str(SCENARIO_DIR / f"{name}.cfg")
    return _path


@pytest.fixture
def replay_path():
    def _path(name: str) -> str:
        return str(REPLAY_DIR / f"{name}.csv")
    return _path
