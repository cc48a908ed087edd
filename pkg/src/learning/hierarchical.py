"""Hierarchical learning with one option per machine transition group.

The meta-policy sees the full product state (environment state, machine state
and the whole stack) and picks an option; an option's policy sees the
environment state, the machine state and the top ``k`` stack symbols. Options
learn from a pseudo-reward of 1 when one of their transitions fires; the
meta-policy learns by SMDP Q-learning on the real rewards.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from src.automata.guards import all_symbols
from src.automata.pdrm import PdRM, Transition
from src.environments.base import LabeledMDP
from src.learning.evaluation import LearningCurve, evaluate
from src.learning.policies import Policy, greedy_choice, select_action_epsilon_greedy
from src.learning.q_learning import TrainingResult, should_evaluate
from src.learning.tables import AbstractionSpec, ActionValueTable, Hyperparams, spawn_streams
from src.product.product_mdp import ProductState, product_step, reset_product
from src.product.runners import PDRM_KIND, Machine, as_runner

logger = logging.getLogger(__name__)

PSEUDO_REWARD = 1.0
META_VIEW = AbstractionSpec()


class NoAvailableOption(RuntimeError):
    def __init__(self, ps: ProductState):
        super().__init__(f"No option starts in machine state '{ps.machine_state}' with top {ps.stack[:1]}")
        self.state = ps


@dataclass(frozen=True)
class Option:
    """Transitions leaving ``source`` on top symbol ``pop`` (None: any top) on the same input symbols."""

    index: int
    source: str
    pop: Optional[str]
    labels: FrozenSet[frozenset]
    transitions: Tuple[Transition, ...]

    def can_start(self, ps: ProductState) -> bool:
        if ps.terminal or ps.machine_state != self.source:
            return False
        return self.pop is None or ps.stack[:1] == (self.pop,)

    def owns(self, fired: Optional[Transition]) -> bool:
        return fired is not None and fired in self.transitions

    @property
    def guard_text(self) -> str:
        return " | ".join(dict.fromkeys(str(t.input_guard) for t in self.transitions))

    @property
    def signature(self) -> Tuple[str, Optional[str], str]:
        return self.source, self.pop, self.guard_text


def is_self_loop(t: Transition) -> bool:
    if t.source != t.target:
        return False
    return (t.pop is None and not t.push) or (t.pop is not None and t.push == (t.pop,))


def build_options(pdrm: PdRM) -> List[Option]:
    """Group the non-self input transitions by (source, pop, set of input symbols their guard accepts).

    Options are numbered in the order their first transition appears in the machine.
    """
    symbols = all_symbols(pdrm.atomic_props)
    groups: Dict[Tuple[str, Optional[str], FrozenSet[frozenset]], List[Transition]] = {}
    for t in pdrm.transitions:
        if t.is_epsilon or is_self_loop(t):
            continue
        labels = frozenset(s for s in symbols if t.input_guard.matches(s))
        groups.setdefault((t.source, t.pop, labels), []).append(t)
    return [Option(i, *key, tuple(members)) for i, (key, members) in enumerate(groups.items())]


def fallback_action(actions: Sequence[Hashable], configured: Optional[Hashable], rng: np.random.Generator) -> Hashable:
    """The configured primitive action, or a uniformly random one when none is configured."""
    if configured is not None:
        return configured
    return actions[int(rng.integers(len(actions)))]


def available_options(options: Sequence[Option], ps: ProductState) -> List[int]:
    """Indices of the options that can start at ``ps``.

    Raises:
        NoAvailableOption: If none can
    """
    found = [o.index for o in options if o.can_start(ps)]
    if not found:
        raise NoAvailableOption(ps)
    return found


def _local_view(ps: ProductState) -> Tuple[str, Tuple[str, ...]]:
    return ps.machine_state, ps.stack[:1]


class HierarchicalGreedyPolicy(Policy):
    """Greedy meta-policy over options, greedy option policies over actions."""

    def __init__(self, options: Sequence[Option], meta: ActionValueTable,
                 option_tables: Dict[int, ActionValueTable], option_view: AbstractionSpec,
                 actions: Sequence[Hashable], budget: int, fallback: Optional[Hashable] = None):
        self.options = list(options)
        self.meta = meta
        self.option_tables = option_tables
        self.option_view = option_view
        self.actions = tuple(actions)
        self.budget = budget
        self.fallback = fallback
        self._current: Optional[Option] = None
        self._steps = 0

    def begin_episode(self, ps):
        self._current = None
        self._steps = 0

    def act(self, ps, rng):
        if self._current is None:
            try:
                allowed = available_options(self.options, ps)
            except NoAvailableOption:
                return fallback_action(self.actions, self.fallback, rng)
            row = self.meta.values(META_VIEW.key(ps))
            pick = greedy_choice(np.array([row[self.meta.action_index(i)] for i in allowed]), rng)
            self._current = self.options[allowed[pick]]
            self._steps = 0
        table = self.option_tables[self._current.index]
        return select_action_epsilon_greedy(table, self.option_view.key(ps), self.actions, 0.0, rng)

    def observe(self, ps, action, outcome):
        if self._current is None:
            return
        self._steps += 1
        if (
            self._current.owns(outcome.info["fired"])
            or _local_view(ps) != _local_view(outcome.state)
            or outcome.info["terminated"]
            or self._steps >= self.budget
        ):
            self._current = None


def hierarchical_train(
    env: LabeledMDP,
    machine: Machine,
    hp: Hyperparams,
    option_abstraction_k: int = 1,
    eval_env: Optional[LabeledMDP] = None,
) -> TrainingResult:
    """Train options and a meta-policy over the product of ``env`` and a pushdown machine.

    Every primitive step updates all options that could have started in the
    pre-step state (intra-option learning). An option ends when one of its
    transitions fires, when the machine state or top symbol changes, when the
    episode ends or after ``hp.option_budget`` steps (default: horizon).
    Where no option can start, ``hp.fallback_action`` is taken (a uniformly
    random action when unset) and the step is counted in ``fallback_steps``.

    Returns:
        TrainingResult with a HierarchicalGreedyPolicy
    """
    runner = as_runner(machine)
    if runner.kind != PDRM_KIND:
        raise ValueError("Hierarchical learning needs a pushdown machine")
    options = build_options(runner.pdrm)
    if not options:
        raise ValueError(f"Machine '{runner.name}' has no non-self input transitions to build options from")
    eval_env = eval_env or env
    train_rng, eval_rng = spawn_streams(hp.seed)
    actions = tuple(env.actions)
    if hp.fallback_action is not None and hp.fallback_action not in actions:
        raise ValueError(f"fallback_action {hp.fallback_action!r} is not an action of {env.name}: {list(actions)}")
    option_view = AbstractionSpec("top_k", option_abstraction_k)
    meta = ActionValueTable([o.index for o in options], hp.q_init)
    option_tables = {o.index: ActionValueTable(actions, hp.q_init) for o in options}
    budget = hp.option_budget or env.horizon
    policy = HierarchicalGreedyPolicy(options, meta, option_tables, option_view, actions, budget, hp.fallback_action)
    curve = LearningCurve()
    fallbacks = 0
    started = time.monotonic()
    logger.info(f"Hierarchical learning on {env.name} x {runner.name}: {len(options)} options, {hp.episodes} episodes")

    def learn_options(ps: ProductState, action: Hashable, outcome) -> None:
        nxt = outcome.state
        changed = _local_view(ps) != _local_view(nxt)
        for o in options:
            if not o.can_start(ps):
                continue
            fired = o.owns(outcome.info["fired"])
            pseudo = PSEUDO_REWARD if fired else 0.0
            table = option_tables[o.index]
            key = option_view.key(ps)
            target = pseudo
            if not (fired or changed or outcome.info["terminated"]):
                target += hp.gamma * table.max_value(option_view.key(nxt))
            current = table.get(key, action)
            table.set(key, action, current + hp.alpha * (target - current))

    for episode in range(1, hp.episodes + 1):
        epsilon = hp.epsilon_at(episode - 1)
        ps, pending = reset_product(env, runner, train_rng)
        t = 0
        done = ps.terminal
        warned = False
        while not done and t < env.horizon:
            try:
                allowed = available_options(options, ps)
            except NoAvailableOption as exc:
                fallbacks += 1
                if not warned:
                    shown = "a random action" if hp.fallback_action is None else repr(hp.fallback_action)
                    logger.warning(f"Episode {episode}: {exc}; falling back to {shown}")
                    warned = True
                action = fallback_action(actions, hp.fallback_action, train_rng)
                outcome = product_step(env, runner, ps, action, train_rng, steps_taken=t)
                pending = 0.0
                ps, t, done = outcome.state, t + 1, outcome.done
                continue

            meta_key = META_VIEW.key(ps)
            chosen = options[select_action_epsilon_greedy(meta, meta_key, allowed, epsilon, train_rng)]
            table = option_tables[chosen.index]
            discounted, discount, steps = 0.0, 1.0, 0
            while True:
                action = select_action_epsilon_greedy(table, option_view.key(ps), actions, epsilon, train_rng)
                outcome = product_step(env, runner, ps, action, train_rng, steps_taken=t)
                discounted += discount * (outcome.reward + pending)
                pending = 0.0
                discount *= hp.gamma
                steps += 1
                t += 1
                learn_options(ps, action, outcome)
                ended = chosen.owns(outcome.info["fired"]) or _local_view(ps) != _local_view(outcome.state)
                ps = outcome.state
                done = outcome.done
                if done or ended or steps >= budget or t >= env.horizon:
                    break

            target = discounted
            if not outcome.info["terminated"]:
                nxt = [o.index for o in options if o.can_start(ps)]
                if nxt:
                    target += discount * meta.max_value(META_VIEW.key(ps), nxt)
            current = meta.get(meta_key, chosen.index)
            meta.set(meta_key, chosen.index, current + hp.alpha * (target - current))

        if should_evaluate(episode, hp):
            stats = evaluate(eval_env, runner, policy, hp.eval_episodes, eval_rng)
            curve.record(episode, stats)
            logger.info(f"episode {episode}: median {stats.median:.3f} (p25 {stats.p25:.3f}, p75 {stats.p75:.3f})")

    wall_time = time.monotonic() - started
    size = len(meta) + sum(len(tb) for tb in option_tables.values())
    logger.info(f"Finished hierarchical run on {env.name}: {size} keys, {wall_time:.1f}s")
    return TrainingResult(
        policy, curve, size, wall_time,
        {"options": [list(o.signature) for o in options], "fallback_steps": fallbacks,
         "option_reward": "pseudo reward 1 when an owned transition fires"},
    )
