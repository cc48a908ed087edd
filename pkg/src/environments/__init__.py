"""Labelled grid and tabular environments."""

from src.environments.base import BadConfig, LabeledMDP, TabularMDP, describe
from src.environments.deliverworld import DeliverWorld, build_deliverworld
from src.environments.grid import ACTIONS, GridMap
from src.environments.letterenv import LetterEnv, build_letterenv
from src.environments.paintworld import PaintWorld, build_paintworld, request_penalty
from src.environments.registry import ENVIRONMENT_KINDS, build_environment
from src.environments.treasure_maze import TreasureMaze, build_treasure_maze

__all__ = [
    "ACTIONS",
    "BadConfig",
    "DeliverWorld",
    "ENVIRONMENT_KINDS",
    "GridMap",
    "LabeledMDP",
    "LetterEnv",
    "PaintWorld",
    "TabularMDP",
    "TreasureMaze",
    "build_deliverworld",
    "build_environment",
    "build_letterenv",
    "build_paintworld",
    "build_treasure_maze",
    "describe",
    "request_penalty",
]
