import csv

import numpy as np
import pytest

from conftest import MAPS, pdrm_from_text
from src.environments.paintworld import build_paintworld
from src.environments.treasure_maze import build_treasure_maze
from src.learning.policies import RandomPolicy
from src.parsers.map_parser import load_grid_map
from src.product.enumeration import (
    OVERFLOW,
    TRIPLET_COLUMNS,
    EpsilonCycle,
    ExplosionGuard,
    default_stack_cap,
    enumerate_bounded_product,
    export_triplets,
    machine_push_bound,
)
from src.product.product_mdp import ProductState, reset_product, rollout
from src.product.runners import PdrmRunner

CYCLIC = """
pdrm cyclic
props: a
states: q0 q1
initial: q0
final:
stack: # A
bottom: #
mode: lenient
T q0 | eps | # | A # | 0 | q1
T q1 | eps | A | A A | 0 | q0
"""


@pytest.fixture
def maze3():
    return build_treasure_maze(load_grid_map(MAPS / "maze_3x3.txt"), 1, multi=False, horizon=8)


def brute_force_states(env, pdrm, horizon):
    """Every product state on some action sequence of length <= horizon."""
    runner = PdrmRunner(pdrm)
    seen = set()

    def walk(ps, d):
        seen.add(ps)
        if ps.terminal or d == horizon:
            return
        for action in env.actions:
            for next_env, p in env.transition_distribution(ps.env_state, action):
                sigma = env.label(ps.env_state, action, next_env)
                walk(ProductState(next_env, runner.advance(ps.config, sigma).config), d + 1)

    for env_state, reset_label, _ in env.initial_distribution():
        walk(reset_product(env, runner, None, (env_state, reset_label))[0], 0)
    return seen


def test_maze_push_bound(maze_pdrm, paint_pdrm):
    assert machine_push_bound(maze_pdrm) == (1, 0)
    assert machine_push_bound(paint_pdrm) == (6, 2)
    assert default_stack_cap(paint_pdrm, 5) == 90


def test_silent_cycle_is_rejected():
    with pytest.raises(EpsilonCycle):
        machine_push_bound(pdrm_from_text(CYCLIC))


def test_enumeration_matches_brute_force(maze3, maze_pdrm):
    mdp = enumerate_bounded_product(maze3, maze_pdrm, 8)
    assert not mdp.overflowed
    assert set(mdp.states) == brute_force_states(maze3, maze_pdrm, 8)


def test_zero_horizon_keeps_only_initial_states(maze3, maze_pdrm):
    mdp = enumerate_bounded_product(maze3, maze_pdrm, 0)
    assert mdp.n_states == len(mdp.initial) == 1
    assert mdp.transitions == {}
    assert mdp.status == {0: "truncated"}


def test_paintworld_product(paint_pdrm):
    mdp = enumerate_bounded_product(build_paintworld(), paint_pdrm, 5)
    stacks = sorted(s.stack for s in mdp.states if s.machine_state == "work")
    assert stacks == [("p",) * n + ("#",) for n in range(1, 6)]
    assert [s.machine_state for i, s in enumerate(mdp.states) if mdp.status.get(i) == "final"] == ["done"]
    assert max(mdp.stack_lengths()) <= 6
    assert sum(p for _, p, _ in mdp.initial) == pytest.approx(1.0)


def test_small_stack_cap_routes_to_overflow(maze3, maze_pdrm):
    mdp = enumerate_bounded_product(maze3, maze_pdrm, 8, stack_cap=2)
    assert mdp.overflowed
    assert mdp.status[mdp.overflow_index] == "overflow"
    assert mdp.states[mdp.overflow_index] == OVERFLOW
    assert max(mdp.stack_lengths()) <= 3


def test_stack_lengths_respect_default_cap(maze3, maze_pdrm):
    mdp = enumerate_bounded_product(maze3, maze_pdrm, 8)
    assert max(mdp.stack_lengths()) <= mdp.stack_cap + 1


def test_explosion_guard(maze3, maze_pdrm):
    with pytest.raises(ExplosionGuard):
        enumerate_bounded_product(maze3, maze_pdrm, 8, state_cap=10)


def test_sparse_rows_are_distributions(maze3, maze_pdrm):
    mdp = enumerate_bounded_product(maze3, maze_pdrm, 6)
    matrix, rewards = mdp.to_sparse()
    assert matrix.shape == (mdp.n_states * mdp.n_actions, mdp.n_states)
    np.testing.assert_allclose(np.asarray(matrix.sum(axis=1)).ravel(), 1.0)
    for i in mdp.status:
        row = i * mdp.n_actions
        assert matrix[row, i] == 1.0 and rewards[row] == 0.0


def test_rollouts_stay_inside_enumeration(maze3, maze_pdrm):
    mdp = enumerate_bounded_product(maze3, maze_pdrm, 8)
    rng = np.random.default_rng(3)
    for _ in range(50):
        result = rollout(maze3, maze_pdrm, RandomPolicy(maze3.actions), rng)
        for ps, _, _ in result.trajectory:
            assert ps in mdp.index


def test_export_triplets(tmp_path, paint_pdrm):
    mdp = enumerate_bounded_product(build_paintworld(), paint_pdrm, 5)
    path = export_triplets(mdp, tmp_path / "out" / "paint.tsv")
    with open(path, encoding="utf-8") as f:
        rows = list(csv.reader(f, delimiter="\t"))
    assert tuple(rows[0]) == TRIPLET_COLUMNS
    assert len(rows) - 1 == sum(len(v) for v in mdp.transitions.values())
    assert all(float(r[3]) == 1.0 for r in rows[1:])
