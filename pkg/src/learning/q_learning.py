"""One-step Q-learning on product rollouts."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from src.environments.base import LabeledMDP
from src.learning.evaluation import LearningCurve, evaluate
from src.learning.policies import GreedyTablePolicy, select_action_epsilon_greedy
from src.learning.tables import TOP_K, AbstractionSpec, ActionValueTable, Hyperparams, spawn_streams
from src.product.product_mdp import product_step, reset_product
from src.product.runners import PDRM_KIND, Machine, MachineRunner, as_runner

logger = logging.getLogger(__name__)


@dataclass
class TrainingResult:
    policy: Any
    curve: LearningCurve
    table_size: int
    wall_time: float
    stats: Dict[str, Any] = field(default_factory=dict)


def check_abstraction(runner: MachineRunner, abstraction: AbstractionSpec) -> None:
    if abstraction.kind == TOP_K and runner.kind != PDRM_KIND:
        raise ValueError(f"top_k abstraction needs a pushdown machine, got a {runner.kind} machine")


def should_evaluate(episode: int, hp: Hyperparams) -> bool:
    """Evaluate after every ``eval_every`` training episodes and after the last one."""
    return episode % hp.eval_every == 0 or episode == hp.episodes


def q_learning_train(
    env: LabeledMDP,
    machine: Machine,
    abstraction: AbstractionSpec,
    hp: Hyperparams,
    eval_env: Optional[LabeledMDP] = None,
) -> TrainingResult:
    """Train a tabular Q-learner over the product of ``env`` and ``machine``.

    Terminal steps (final machine state) do not bootstrap; horizon or budget
    truncation does. The initial pending machine reward is credited to the
    first step. Evaluation runs greedy episodes on ``eval_env`` (default
    ``env``) with a random stream separate from training.

    Args:
        env: Training environment
        machine: Reward machine or runner
        abstraction: What part of the machine memory keys the table
        hp: Hyperparameters, including the seed
        eval_env: Evaluation environment

    Returns:
        TrainingResult with a GreedyTablePolicy and the learning curve
    """
    runner = as_runner(machine)
    check_abstraction(runner, abstraction)
    eval_env = eval_env or env
    train_rng, eval_rng = spawn_streams(hp.seed)
    actions = tuple(env.actions)
    table = ActionValueTable(actions, hp.q_init)
    policy = GreedyTablePolicy(table, abstraction)
    curve = LearningCurve()
    limit = getattr(runner, "wall_clock_limit", None)
    timeouts = 0
    started = time.monotonic()
    logger.info(f"Q-learning {abstraction.label()} on {env.name} x {runner.name} for {hp.episodes} episodes")

    for episode in range(1, hp.episodes + 1):
        epsilon = hp.epsilon_at(episode - 1)
        ps, pending = reset_product(env, runner, train_rng)
        began = time.monotonic()
        for t in range(0 if ps.terminal else env.horizon):
            key = abstraction.key(ps)
            action = select_action_epsilon_greedy(table, key, actions, epsilon, train_rng)
            outcome = product_step(env, runner, ps, action, train_rng, steps_taken=t)
            reward = outcome.reward + pending
            pending = 0.0
            target = reward
            if not outcome.info["terminated"]:
                target += hp.gamma * table.max_value(abstraction.key(outcome.state))
            current = table.get(key, action)
            table.set(key, action, current + hp.alpha * (target - current))
            ps = outcome.state
            if outcome.done:
                break
            if limit is not None and time.monotonic() - began > limit:
                timeouts += 1
                break
        if should_evaluate(episode, hp):
            stats = evaluate(eval_env, runner, policy, hp.eval_episodes, eval_rng)
            curve.record(episode, stats)
            logger.info(f"episode {episode}: median {stats.median:.3f} (p25 {stats.p25:.3f}, p75 {stats.p75:.3f})")

    wall_time = time.monotonic() - started
    final = curve.final
    logger.info(
        f"Finished {abstraction.label()} on {env.name}: {len(table)} keys, "
        f"final median {final.median if final else float('nan'):.3f}, {wall_time:.1f}s"
    )
    return TrainingResult(policy, curve, len(table), wall_time, {"timeouts": timeouts})
