import os

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
GOLDEN_SCENARIO = os.path.join(REPO_ROOT, "scenarios", "golden.scn")


@pytest.fixture
def golden_scenario_path() -> str:
    return GOLDEN_SCENARIO


@pytest.fixture
def golden_scenario_text() -> str:
    with open(GOLDEN_SCENARIO, "r", encoding="utf-8") as fh:
        return fh.read()
