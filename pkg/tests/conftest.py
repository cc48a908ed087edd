from pathlib import Path

import pytest

from src.parsers.pdrm_parser import load_pdrm, parse_pdrm_text
from src.validation.pdrm_validator import validate_pdrm

ROOT = Path(__file__).resolve().parents[1]
MACHINES = ROOT / "machines"
MAPS = ROOT / "maps"
EXPERIMENTS = ROOT / "experiments"


def pdrm_from_text(text: str):
    return validate_pdrm(parse_pdrm_text(text))


@pytest.fixture
def maze_pdrm():
    return load_pdrm(MACHINES / "maze.pdrm")


@pytest.fixture
def paint_pdrm():
    return load_pdrm(MACHINES / "paintworld.pdrm")
