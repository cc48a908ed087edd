import numpy as np
import pytest

from conftest import MAPS
from src.environments.base import BadConfig, TabularMDP
from src.environments.deliverworld import build_deliverworld
from src.environments.letterenv import A_ACTIVE, B_PENDING, build_letterenv
from src.environments.paintworld import build_paintworld, request_penalty
from src.environments.registry import build_environment
from src.environments.treasure_maze import build_treasure_maze
from src.parsers.errors import ParseError
from src.parsers.map_parser import load_grid_map, parse_map_text


def test_map_parsing_named_cells_and_types():
    grid = parse_map_text("S.1\n#.X\n2.T\n")
    assert (grid.width, grid.height) == (3, 3)
    assert grid.single("S") == (0, 0)
    assert grid.cells("T") == ((2, 2),)
    assert grid.location_types == {(0, 2): "1", (2, 0): "2"}
    assert (1, 0) in grid.walls


def test_ragged_map_is_parse_error():
    with pytest.raises(ParseError) as info:
        parse_map_text("...\n..\n")
    assert info.value.line == 2


def test_unknown_map_character():
    with pytest.raises(ParseError):
        parse_map_text("..?\n")


def test_shipped_maps_have_consistent_rows():
    for path in sorted(MAPS.glob("*.txt")):
        grid = load_grid_map(path)
        assert grid.width > 0 and grid.height > 0


def test_maze_labels():
    maze = build_treasure_maze(load_grid_map(MAPS / "maze_5x5.txt"), 1, multi=False)
    start = (0, 0, 0)
    assert maze.initial_distribution() == [(start, None, 1.0)]
    bump = maze.transition_distribution(start, "u")
    assert bump == [(start, 1.0)]
    assert maze.label(start, "u", start) == frozenset({"u"})
    s = start
    for a in "rrd":
        s = maze.sample_transition(s, a, None)
    nxt = maze.sample_transition(s, "d", None)
    assert nxt == (2, 2, 1)
    assert maze.label(s, "d", nxt) == frozenset({"d", "t"})
    assert maze.label((0, 1, 1), "l", (0, 0, 1)) == frozenset({"l", "x"})


def test_maze_requires_exit_and_treasure():
    with pytest.raises(BadConfig):
        build_treasure_maze(parse_map_text("..T\n...\n"), 1, multi=False)
    with pytest.raises(BadConfig):
        build_treasure_maze(parse_map_text("X.T\n..T\n"), 1, multi=False)


def test_unreachable_treasure_rejected():
    with pytest.raises(BadConfig):
        build_treasure_maze(parse_map_text("X.#T\n..#.\n"), 1, multi=False)


def test_multi_treasure_safe_and_all_labels():
    env = build_environment({"kind": "multi_treasure_maze", "map": str(MAPS / "multi_10x10.txt"),
                             "params": {"n_treasures": 2}})[0]
    assert env.full_mask == 3
    safe = env.safe
    above = (safe[0] - 1, safe[1])
    partial = env.label((*above, 1), "d", (*safe, 1))
    assert partial == frozenset({"d", "safe"})
    done = env.label((*above, 3), "d", (*safe, 3))
    assert done == frozenset({"d", "safe", "all"})


def test_letterenv_flip_distribution():
    env = build_letterenv({"flip_probability": 0.25}, load_grid_map(MAPS / "letterenv_5x5.txt"))
    before = (0, 3, A_ACTIVE)
    outcomes = dict(env.transition_distribution(before, "r"))
    assert outcomes == {(0, 4, A_ACTIVE): 0.75, (0, 4, B_PENDING): 0.25}
    assert env.label(before, "r", (0, 4, B_PENDING)) == frozenset({"P_A"})
    assert env.label((0, 3, B_PENDING), "r", (0, 4, 2)) == frozenset({"P_B"})
    assert env.label((3, 0, A_ACTIVE), "d", (4, 0, A_ACTIVE)) == frozenset({"P_C"})
    env.check_distributions()


def test_letterenv_without_flip_is_deterministic():
    env = build_letterenv({"flip_probability": 0.0})
    assert env.transition_distribution((0, 3, A_ACTIVE), "r") == [((0, 4, A_ACTIVE), 1.0)]


def test_letterenv_rejects_bad_probability():
    with pytest.raises(BadConfig):
        build_letterenv({"flip_probability": 1.5})


def test_deliverworld_reset_labels_and_eval_split():
    grid = load_grid_map(MAPS / "deliverworld_10x10.txt")
    env, eval_env = build_deliverworld({"train_deliveries": 4, "test_deliveries": 8}, grid)
    starts = env.initial_distribution()
    assert [label for _, label, _ in starts] == [frozenset({f"seq{i}"}) for i in range(4)]
    assert all(p == pytest.approx(0.25) for _, _, p in starts)
    assert eval_env.active == ("seq4", "seq5", "seq6", "seq7")
    assert env.label((0, 1), "l", (0, 0)) == frozenset({"a"})
    assert env.label((0, 0), "u", (0, 0)) == frozenset()


def test_deliverworld_missing_type_rejected():
    with pytest.raises(BadConfig):
        build_deliverworld({}, parse_map_text("1.S\n2.3\n"))


def test_paintworld_penalties_and_scripted_starts():
    env = build_paintworld()
    assert env.reward(0, 3, 0) == request_penalty(3) == -0.75
    assert env.label(0, 2, 0) == frozenset({"soap_2"})
    assert env.reward_normalizer == pytest.approx(5 / 6)
    assert [label for _, label in env.evaluation_starts] == [frozenset({f"paint_{n}"}) for n in range(1, 6)]


def test_registry_reward_normalizer_override():
    env, eval_env = build_environment({"kind": "paintworld", "params": {"reward_normalizer": 2.0}})
    assert env.reward_normalizer == eval_env.reward_normalizer == 2.0


def test_registry_unknown_kind():
    with pytest.raises(BadConfig):
        build_environment({"kind": "waterworld"})


def test_tabular_mdp_checks_normalization():
    with pytest.raises(BadConfig):
        TabularMDP(["s"], ["a"], {("s", "a"): [("s", 0.5)]}, {}, "s")


def test_sampling_follows_distribution():
    env = TabularMDP(["s", "t"], ["a"], {("s", "a"): [("s", 0.5), ("t", 0.5)], ("t", "a"): [("t", 1.0)]},
                     {}, "s")
    rng = np.random.default_rng(0)
    hits = sum(env.sample_transition("s", "a", rng) == "t" for _ in range(2000))
    assert 850 < hits < 1150
