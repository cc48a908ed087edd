"""Product of a labelled MDP and a reward machine: stepping and episode rollouts."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, NamedTuple, Optional, Tuple

import numpy as np

from src.automata.errors import TerminalStep
from src.environments.base import LabeledMDP
from src.product.runners import Machine, MachineRunner, as_runner


@dataclass(frozen=True)
class ProductState:
    """Environment state together with the machine configuration.

    ``config`` is a pushdown ``Configuration`` (state and stack) or a
    ``CounterConfiguration`` (state and counters).
    """

    env_state: Hashable
    config: Hashable

    @property
    def machine_state(self) -> str:
        return self.config.state

    @property
    def pdrm_state(self) -> str:
        return self.config.state

    @property
    def stack(self) -> Tuple[str, ...]:
        return self.config.stack

    @property
    def memory(self) -> Tuple:
        stack = getattr(self.config, "stack", None)
        return stack if stack is not None else self.config.counters

    @property
    def terminal(self) -> bool:
        return bool(self.config.terminal)


class ProductStep(NamedTuple):
    state: ProductState
    reward: float
    done: bool
    info: Dict[str, Any]


def reset_product(
    env: LabeledMDP,
    machine: Machine,
    rng: np.random.Generator,
    start: Optional[Tuple[Hashable, Optional[frozenset]]] = None,
) -> Tuple[ProductState, float]:
    """Start an episode.

    Args:
        env: Environment
        machine: Reward machine or runner
        rng: Random stream for the initial distribution
        start: Fixed (environment state, reset label) instead of sampling

    Returns:
        Tuple of (initial product state, pending reward); the pending reward
        collects initial silent steps and the reset label's transition and
        belongs to the first step of the episode
    """
    runner = as_runner(machine)
    env_state, reset_label = start if start is not None else env.sample_initial(rng)
    config, pending = runner.start()
    if reset_label is not None and not runner.is_terminal(config):
        result = runner.advance(config, frozenset(reset_label))
        config, pending = result.config, pending + result.reward
    return ProductState(env_state, config), pending


def product_step(
    env: LabeledMDP,
    machine: Machine,
    ps: ProductState,
    action: Hashable,
    rng: np.random.Generator,
    steps_taken: int = 0,
    horizon: Optional[int] = None,
) -> ProductStep:
    """Advance the product by one environment step.

    The reward is the machine reward (input transition plus silent closure)
    plus the environment reward. ``done`` is set when the machine reaches a
    final state, when ``steps_taken + 1`` reaches ``horizon`` (the environment
    horizon by default), or when a counter runner exceeds its operation budget.

    Raises:
        TerminalStep: If ``ps`` is already in a final machine state
    """
    runner = as_runner(machine)
    if ps.terminal:
        raise TerminalStep(f"Product state in final machine state '{ps.machine_state}' cannot step")
    next_env = env.sample_transition(ps.env_state, action, rng)
    sigma = env.label(ps.env_state, action, next_env)
    result = runner.advance(ps.config, sigma)
    env_reward = env.reward(ps.env_state, action, next_env)
    terminated = runner.is_terminal(result.config)
    over_budget = runner.exceeds_budget(result)
    limit = env.horizon if horizon is None else horizon
    truncated = not terminated and (steps_taken + 1 >= limit or over_budget)
    info = {
        "label": sigma,
        "fired": result.fired,
        "terminated": terminated,
        "truncated": truncated,
        "over_budget": over_budget,
        "machine_reward": result.reward,
        "env_reward": env_reward,
        "unit_ops": result.unit_ops,
    }
    return ProductStep(ProductState(next_env, result.config), result.reward + env_reward, terminated or truncated, info)


def normalize_return(total: float, reward_normalizer: float) -> float:
    return float(np.clip(total / reward_normalizer, -1.0, 1.0))


@dataclass
class RolloutResult:
    total_return: float
    normalized_return: float
    trajectory: List[Tuple[ProductState, Hashable, float]] = field(default_factory=list)
    terminated: bool = False
    timed_out: bool = False


def rollout(
    env: LabeledMDP,
    machine: Machine,
    policy: Any,
    rng: np.random.Generator,
    horizon: Optional[int] = None,
    start: Optional[Tuple[Hashable, Optional[frozenset]]] = None,
) -> RolloutResult:
    """Run one episode with ``policy`` (``begin_episode``/``act``/``observe``).

    Args:
        env: Environment
        machine: Reward machine or runner
        policy: Acting policy; ``act(state, rng)`` picks primitive actions
        rng: Random stream for the environment and the policy
        horizon: Step limit, defaults to the environment horizon
        start: Fixed start instead of the initial distribution

    Returns:
        RolloutResult; the trajectory lists (state, action, reward) per step
    """
    runner = as_runner(machine)
    horizon = env.horizon if horizon is None else horizon
    ps, pending = reset_product(env, runner, rng, start)
    result = RolloutResult(0.0, 0.0)
    if ps.terminal:
        result.total_return, result.terminated = pending, True
        result.normalized_return = normalize_return(pending, env.reward_normalizer)
        return result
    if horizon <= 0:
        return result
    began = time.monotonic()
    limit = getattr(runner, "wall_clock_limit", None)
    policy.begin_episode(ps)
    for t in range(horizon):
        action = policy.act(ps, rng)
        outcome = product_step(env, runner, ps, action, rng, steps_taken=t, horizon=horizon)
        reward = outcome.reward + pending
        pending = 0.0
        policy.observe(ps, action, outcome)
        result.trajectory.append((ps, action, reward))
        result.total_return += reward
        ps = outcome.state
        if outcome.done:
            result.terminated = outcome.info["terminated"]
            break
        if limit is not None and time.monotonic() - began > limit:
            result.timed_out = True
            break
    result.normalized_return = normalize_return(result.total_return, env.reward_normalizer)
    return result
