import numpy as np
import pytest

from conftest import MACHINES, MAPS, pdrm_from_text
from src.analysis.value_iteration import value_iteration
from src.automata.pdrm import Configuration
from src.automata.semantics import initial_configuration, step_with_transition
from src.counting.growth import PathEncodingCRA
from src.environments.base import TabularMDP
from src.environments.paintworld import build_paintworld
from src.environments.treasure_maze import build_treasure_maze
from src.learning.evaluation import CurvePoint, EvaluationStats, LearningCurve, evaluate
from src.learning.hierarchical import NoAvailableOption, available_options, build_options, hierarchical_train
from src.learning.policies import Policy, greedy_choice, select_action_epsilon_greedy
from src.learning.q_learning import q_learning_train
from src.learning.tables import AbstractionSpec, ActionValueTable, Hyperparams, spawn_streams
from src.parsers.map_parser import load_grid_map
from src.product.enumeration import enumerate_bounded_product
from src.product.product_mdp import ProductState, reset_product
from src.product.runners import CraRunner

# normalized returns of the best single request for 1..5 stains
PAINT_OPTIMAL_MEDIAN = -0.9


class RequestAllStains(Policy):
    def act(self, ps, rng):
        return len(ps.stack) - 1


@pytest.fixture
def maze3():
    return build_treasure_maze(load_grid_map(MAPS / "maze_3x3.txt"), 1, multi=False, horizon=8)


def test_table_reads_do_not_store():
    table = ActionValueTable(["a", "b"], initial_value=0.5)
    assert list(table.values("k")) == [0.5, 0.5]
    assert len(table) == 0 and "k" not in table
    table.set("k", "b", 2.0)
    assert table.get("k", "b") == 2.0 and table.get("k", "a") == 0.5
    assert table.max_value("k") == 2.0
    assert table.max_value("k", allowed=["a"]) == 0.5
    assert len(table) == 1


def test_abstraction_keys(maze_pdrm):
    env = build_paintworld()
    ps, _ = reset_product(env, maze_pdrm, np.random.default_rng(0), start=(0, None))
    assert AbstractionSpec().key(ps) == (0, "u0", ("Z",))
    assert AbstractionSpec("top_k", 0).key(ps) == (0, "u0", ())
    assert AbstractionSpec("top_k", 2).label() == "top_2"
    with pytest.raises(ValueError):
        AbstractionSpec("window")
    with pytest.raises(ValueError):
        AbstractionSpec("top_k", -1)


def test_hyperparams_layering_and_validation():
    hp = Hyperparams.from_dict({"alpha": 0.3}, {"alpha": 0.2, "episodes": 7})
    assert hp.alpha == 0.3 and hp.episodes == 7
    with pytest.raises(ValueError, match="learning_rate"):
        Hyperparams.from_dict({"learning_rate": 0.1})
    with pytest.raises(ValueError):
        Hyperparams(alpha=0.0)
    with pytest.raises(ValueError):
        Hyperparams(epsilon_end=1.5)
    with pytest.raises(ValueError):
        Hyperparams(eval_every=0)


def test_epsilon_decays_linearly():
    hp = Hyperparams(epsilon_start=1.0, epsilon_end=0.05, epsilon_decay_fraction=0.8, episodes=100)
    assert hp.epsilon_at(0) == 1.0
    assert hp.epsilon_at(40) == pytest.approx(0.525)
    assert hp.epsilon_at(80) == 0.05
    assert hp.epsilon_at(99) == 0.05
    assert Hyperparams(epsilon_decay_fraction=0.0).epsilon_at(0) == 0.05


def test_greedy_ties_are_random():
    rng = np.random.default_rng(1)
    picks = {greedy_choice(np.array([1.0, 1.0, 0.0]), rng) for _ in range(200)}
    assert picks == {0, 1}


def test_epsilon_greedy_extremes():
    table = ActionValueTable(["a", "b", "c"])
    table.set("k", "c", 1.0)
    rng = np.random.default_rng(2)
    assert {select_action_epsilon_greedy(table, "k", table.actions, 0.0, rng) for _ in range(50)} == {"c"}
    assert {select_action_epsilon_greedy(table, "k", table.actions, 1.0, rng) for _ in range(300)} == {"a", "b", "c"}
    assert select_action_epsilon_greedy(table, "k", ["a", "b"], 0.0, rng) in ("a", "b")
    with pytest.raises(ValueError):
        select_action_epsilon_greedy(table, "k", [], 0.0, rng)


def test_spawned_streams_differ_and_repeat():
    train, test = spawn_streams(4)
    again, _ = spawn_streams(4)
    assert train.random() == again.random()
    assert spawn_streams(4)[0].random() != test.random()


def test_percentiles_interpolate():
    stats = EvaluationStats.from_returns([1.0, 2.0, 3.0, 4.0])
    assert (stats.p25, stats.median, stats.p75) == pytest.approx((1.25, 2.5, 3.75))
    single = EvaluationStats.from_returns([0.4])
    assert single.median == single.p25 == single.p75 == 0.4
    with pytest.raises(ValueError):
        EvaluationStats.from_returns([])


def test_evaluation_uses_scripted_starts(paint_pdrm):
    env = build_paintworld()
    stats = evaluate(env, paint_pdrm, RequestAllStains(), 50, np.random.default_rng(0))
    assert len(stats.returns) == 5
    assert sorted(stats.returns) == pytest.approx([-1.0, -0.96, -0.9, -0.8, -0.6])
    assert stats.median == pytest.approx(PAINT_OPTIMAL_MEDIAN)


def test_curve_csv(tmp_path):
    curve = LearningCurve()
    curve.record(10, EvaluationStats.from_returns([0.0, 0.5, 1.0]))
    curve.record(20, EvaluationStats.from_returns([1.0]))
    assert curve.first_episode_reaching(0.75) == 20
    assert curve.first_episode_reaching(2.0) is None
    loaded = LearningCurve.from_csv(curve.to_csv(tmp_path / "curve.csv"))
    assert loaded.points == [CurvePoint(10, 0.5, 0.0, 1.0), CurvePoint(20, 1.0, 1.0, 1.0)]
    lines = curve.returns_to_csv(tmp_path / "returns.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["episode,returns", "10,0.000000 0.500000 1.000000", "20,1.000000"]


def paint_hp(seed=0, episodes=400):
    return Hyperparams(alpha=0.5, episodes=episodes, eval_every=100, eval_episodes=5, seed=seed)


def test_q_learning_solves_paintworld_with_five_symbols(paint_pdrm):
    result = q_learning_train(build_paintworld(), paint_pdrm, AbstractionSpec("top_k", 5), paint_hp())
    assert [p.episode for p in result.curve.points] == [100, 200, 300, 400]
    assert result.curve.final.median == pytest.approx(PAINT_OPTIMAL_MEDIAN)
    assert result.table_size == 5


def test_top_one_aliases_every_stain_count(paint_pdrm):
    result = q_learning_train(build_paintworld(), paint_pdrm, AbstractionSpec("top_k", 1), paint_hp())
    assert result.table_size == 1


def test_q_learning_is_reproducible(paint_pdrm):
    first = q_learning_train(build_paintworld(), paint_pdrm, AbstractionSpec(), paint_hp(seed=3, episodes=200))
    second = q_learning_train(build_paintworld(), paint_pdrm, AbstractionSpec(), paint_hp(seed=3, episodes=200))
    assert first.curve.points == second.curve.points
    assert first.curve.raw_returns == second.curve.raw_returns


def test_q_learning_finds_maze_exit(maze3, maze_pdrm):
    hp = Hyperparams(alpha=0.5, episodes=1500, eval_every=500, eval_episodes=3, seed=0)
    result = q_learning_train(maze3, maze_pdrm, AbstractionSpec(), hp)
    assert result.curve.final.median == pytest.approx(1.0)
    assert result.stats["timeouts"] == 0


def test_top_k_needs_a_stack(maze3):
    runner = CraRunner(PathEncodingCRA())
    with pytest.raises(ValueError, match="pushdown"):
        q_learning_train(maze3, runner, AbstractionSpec("top_k", 1), Hyperparams(episodes=1))


def test_counter_machine_trains_with_full_view(maze3):
    result = q_learning_train(maze3, CraRunner(PathEncodingCRA()), AbstractionSpec(), Hyperparams(episodes=20))
    assert result.table_size > 0
    assert result.curve.final.episode == 20


def test_options_follow_machine_transitions(maze_pdrm):
    options = build_options(maze_pdrm)
    assert len(options) == 20
    assert [o.transitions for o in options] == [(t,) for t in maze_pdrm.transitions]
    assert options[0].signature == ("u0", None, "u & !d & !l & !r & !t")
    assert frozenset({"u"}) in options[0].labels and frozenset({"u", "t"}) not in options[0].labels
    assert {o.transitions[0].target for o in options if o.source == "u1" and o.pop == "r"} == {"u1", "u2", "u3"}
    assert [o.index for o in options] == list(range(20))


def test_options_compare_accepted_inputs_not_guard_text():
    pdrm = pdrm_from_text(
        "pdrm pair\nprops: a b\nstates: q\ninitial: q\nfinal: f\nstack: Z X\nbottom: Z\nmode: lenient\n"
        "T q | a & b | Z | X Z | 0 | q\n"
        "T q | b & a & (a | !a) | X | eps | 1 | f\n"
    )
    first, second = build_options(pdrm)
    assert first.labels == second.labels == frozenset({frozenset({"a", "b"})})
    assert (first.pop, second.pop) == ("Z", "X")


def test_no_option_from_empty_retrace(maze_pdrm):
    options = build_options(maze_pdrm)
    env = build_paintworld()
    ps, _ = reset_product(env, maze_pdrm, None, start=(0, None))
    assert available_options(options, ps) == list(range(8))
    stuck = type(ps)(ps.env_state, type(ps.config)("u1", ("Z",)))
    with pytest.raises(NoAvailableOption):
        available_options(options, stuck)


def test_hierarchical_training_runs(maze3, maze_pdrm):
    hp = Hyperparams(alpha=0.5, episodes=60, eval_every=30, eval_episodes=2, seed=1)
    result = hierarchical_train(maze3, maze_pdrm, hp, option_abstraction_k=1)
    assert [p.episode for p in result.curve.points] == [30, 60]
    assert len(result.stats["options"]) == 20
    assert result.table_size > 0


def test_hierarchical_needs_pushdown_machine(maze3):
    with pytest.raises(ValueError):
        hierarchical_train(maze3, CraRunner(PathEncodingCRA()), Hyperparams(episodes=1))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_paintworld_reproduction(paint_pdrm, seed):
    env = build_paintworld()
    for k in (1, 2, 3, 4):
        aliased = q_learning_train(env, paint_pdrm, AbstractionSpec("top_k", k), paint_hp(seed, 2000))
        assert aliased.curve.final.median <= PAINT_OPTIMAL_MEDIAN + 1e-9
    full = q_learning_train(env, paint_pdrm, AbstractionSpec("top_k", 5), paint_hp(seed, 2000))
    assert full.curve.final.median == pytest.approx(PAINT_OPTIMAL_MEDIAN)


CHAIN_PDRM = """\
pdrm chain
props: g
states: q
initial: q
final: f
stack: Z
bottom: Z
mode: lenient
T q | g | eps | eps | 1 | f
"""


def chain_env(rewarding=True):
    return TabularMDP(
        states=[0, 1],
        actions=["stay", "go"],
        transitions={(0, "stay"): [(0, 1.0)], (0, "go"): [(1, 1.0)], (1, "stay"): [(1, 1.0)], (1, "go"): [(1, 1.0)]},
        labels=lambda s, a, n: {"g"} if rewarding and (s, a) == (0, "go") else (),
        initial=0,
        horizon=5,
        atomic_props={"g"},
        name="chain",
    )


def test_greedy_policy_matches_value_iteration():
    env, pdrm = chain_env(), pdrm_from_text(CHAIN_PDRM)
    mdp = enumerate_bounded_product(env, pdrm, env.horizon, gamma=0.9)
    solution = value_iteration(mdp)
    start = mdp.states[mdp.initial[0][0]]
    assert solution.optimal_actions[mdp.initial[0][0]] == ("go",)
    hp = Hyperparams(alpha=0.5, gamma=0.9, episodes=500, eval_every=100, eval_episodes=1, seed=0)
    result = q_learning_train(env, pdrm, AbstractionSpec(), hp)
    values = result.policy.table.values(AbstractionSpec().key(start))
    assert env.actions[int(np.argmax(values))] == "go"
    assert values.max() == pytest.approx(solution.value_of(mdp, start), abs=1e-2)


def test_zero_rewards_leave_table_at_zero():
    hp = Hyperparams(episodes=50, eval_every=25, eval_episodes=1, seed=4)
    result = q_learning_train(chain_env(rewarding=False), pdrm_from_text(CHAIN_PDRM), AbstractionSpec(), hp)
    table = result.policy.table
    assert len(table) > 0
    assert all(not table.values(key).any() for key in table.keys())


def test_single_transition_gives_single_option():
    pdrm = pdrm_from_text(CHAIN_PDRM)
    assert [o.signature for o in build_options(pdrm)] == [("q", None, "g")]
    hp = Hyperparams(alpha=0.5, episodes=40, eval_every=20, eval_episodes=1, seed=0)
    result = hierarchical_train(chain_env(), pdrm, hp)
    assert len(result.stats["options"]) == 1
    assert result.curve.final.median == pytest.approx(1.0)


def test_treasure_option_fires_only_on_treasure(maze_pdrm):
    treasure = next(o for o in build_options(maze_pdrm) if frozenset({"r", "t"}) in o.labels)
    config, _ = initial_configuration(maze_pdrm)
    fired = []
    for letters in ({"r"}, {"r", "t"}, {"l"}):
        config, _, transition = step_with_transition(maze_pdrm, config, frozenset(letters))
        fired.append(treasure.owns(transition))
    assert fired == [False, True, False]


def test_percentiles_on_mostly_successful_returns():
    stats = EvaluationStats.from_returns([1.0] * 8 + [0.0, 0.0])
    assert (stats.median, stats.p25, stats.p75) == pytest.approx((1.0, 0.75, 1.0))


STUCK_PDRM = """\
pdrm stuck
props: g
states: q p
initial: q
final: f
stack: Z
bottom: Z
mode: lenient
T q | g | eps | eps | 0 | p
"""


def test_configured_fallback_action_where_no_option_starts():
    hp = Hyperparams(episodes=10, eval_every=10, eval_episodes=1, seed=0, fallback_action="stay")
    result = hierarchical_train(chain_env(), pdrm_from_text(STUCK_PDRM), hp)
    assert result.stats["fallback_steps"] > 0
    policy = result.policy
    stuck = ProductState(1, Configuration("p", ("Z",)))
    policy.begin_episode(stuck)
    rng = np.random.default_rng(0)
    assert {policy.act(stuck, rng) for _ in range(20)} == {"stay"}


def test_fallback_action_must_exist():
    hp = Hyperparams(episodes=1, fallback_action="jump")
    with pytest.raises(ValueError, match="jump"):
        hierarchical_train(chain_env(), pdrm_from_text(CHAIN_PDRM), hp)
