"""Build environments from the ``environment`` block of an experiment config."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from src.environments.base import BadConfig, LabeledMDP
from src.environments.deliverworld import build_deliverworld
from src.environments.letterenv import build_letterenv
from src.environments.paintworld import build_paintworld
from src.environments.treasure_maze import build_treasure_maze

logger = logging.getLogger(__name__)

ENVIRONMENT_KINDS = ("letterenv", "treasure_maze", "multi_treasure_maze", "deliverworld", "paintworld")


def build_environment(spec: Dict[str, Any], base_dir: Optional[Path] = None) -> Tuple[LabeledMDP, LabeledMDP]:
    """Build the training and evaluation environments.

    Args:
        spec: Mapping with ``kind``, optional ``map`` (path), ``horizon`` and ``params``
        base_dir: Directory that relative map paths are resolved against

    Returns:
        Tuple of (training env, evaluation env); they are the same object
        unless the environment distinguishes them

    Raises:
        BadConfig: For an unknown kind or a missing map
    """
    kind = spec.get("kind")
    params = dict(spec.get("params") or {})
    if "horizon" in spec:
        params["horizon"] = spec["horizon"]
    grid = None
    if spec.get("map"):
        from src.parsers.map_parser import load_grid_map

        map_path = Path(spec["map"])
        if base_dir is not None and not map_path.is_absolute():
            map_path = base_dir / map_path
        grid = load_grid_map(map_path)

    if kind == "letterenv":
        env = build_letterenv(params, grid)
        eval_env: LabeledMDP = env
    elif kind in ("treasure_maze", "multi_treasure_maze"):
        if grid is None:
            raise BadConfig(f"{kind} needs a map")
        multi = kind == "multi_treasure_maze"
        n_treasures = int(params.get("n_treasures", len(grid.cells("T")) if multi else 1))
        env = build_treasure_maze(grid, n_treasures, multi, int(params.get("horizon", 100)))
        eval_env = env
    elif kind == "deliverworld":
        if grid is None:
            raise BadConfig("deliverworld needs a map")
        env, eval_env = build_deliverworld(params, grid)
    elif kind == "paintworld":
        env = build_paintworld(int(params.get("horizon", 5)))
        eval_env = env
    else:
        raise BadConfig(f"Unknown environment kind {kind!r}; expected one of {', '.join(ENVIRONMENT_KINDS)}")

    if "reward_normalizer" in params:
        env.reward_normalizer = float(params["reward_normalizer"])
        eval_env.reward_normalizer = env.reward_normalizer
    logger.info(f"Built environment {env.name} with {len(env.states())} states")
    return env, eval_env
