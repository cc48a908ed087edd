"""Small-step semantics of pushdown reward machines.

Every function here is pure: configurations are immutable values and a
validated machine is never mutated.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

from src.automata.errors import EpsilonDivergence, StrictModeUndefined, TerminalStep
from src.automata.pdrm import STRICT, Configuration, PdRM, Transition

DEFAULT_EPSILON_CAP = 10_000


def make_configuration(pdrm: PdRM, state: str, stack: Iterable[str]) -> Configuration:
    return Configuration(state, tuple(stack), pdrm.is_final(state))


def apply_transition(pdrm: PdRM, config: Configuration, transition: Transition) -> Configuration:
    """Pop (if the transition pops), push, and move to the target state."""
    rest = config.stack[1:] if transition.pop is not None else config.stack
    return make_configuration(pdrm, transition.target, transition.push + rest)


def find_input_transition(pdrm: PdRM, config: Configuration, sigma: frozenset) -> Optional[Transition]:
    """Return the unique input transition applicable at (state, sigma, top), if any."""
    for t in pdrm.input_candidates(config.state, config.top):
        if t.input_guard.matches(sigma):
            return t
    return None


def epsilon_closure(
    pdrm: PdRM, config: Configuration, cap: int = DEFAULT_EPSILON_CAP
) -> Tuple[Configuration, float, int]:
    """Follow silent transitions until none applies or a final state is reached.

    Args:
        pdrm: Validated machine
        config: Starting configuration
        cap: Maximum number of silent steps

    Returns:
        Tuple of (closed configuration, summed reward, number of silent steps)

    Raises:
        EpsilonDivergence: If more than ``cap`` silent steps would be taken
    """
    reward = 0.0
    n_steps = 0
    while not config.terminal:
        candidates = pdrm.silent_candidates(config.state, config.top)
        if not candidates:
            break
        if n_steps >= cap:
            raise EpsilonDivergence(config.state, cap)
        transition = candidates[0]
        config = apply_transition(pdrm, config, transition)
        reward += transition.reward
        n_steps += 1
    return config, reward, n_steps


def initial_configuration(
    pdrm: PdRM, cap: int = DEFAULT_EPSILON_CAP
) -> Tuple[Configuration, float]:
    """Closed start configuration and the reward of any initial silent steps."""
    start = make_configuration(pdrm, pdrm.initial_state, (pdrm.initial_stack_symbol,))
    config, reward, _ = epsilon_closure(pdrm, start, cap)
    return config, reward


def step_with_transition(
    pdrm: PdRM, config: Configuration, sigma: frozenset, cap: int = DEFAULT_EPSILON_CAP
) -> Tuple[Configuration, float, Optional[Transition]]:
    """Like ``step`` but also returns the input transition that fired (None for a self-loop)."""
    if config.terminal:
        raise TerminalStep(f"Configuration in final state '{config.state}' cannot step")
    transition = find_input_transition(pdrm, config, sigma)
    if transition is None:
        if pdrm.mode == STRICT:
            raise StrictModeUndefined(config.state, sigma, config.top)
        return config, 0.0, None
    moved = apply_transition(pdrm, config, transition)
    closed, silent_reward, _ = epsilon_closure(pdrm, moved, cap)
    return closed, transition.reward + silent_reward, transition


def step(
    pdrm: PdRM, config: Configuration, sigma: frozenset, cap: int = DEFAULT_EPSILON_CAP
) -> Tuple[Configuration, float]:
    """Read one input symbol.

    Applies the unique applicable input transition and then the epsilon-closure;
    the returned reward includes the rewards of the silent steps. In lenient
    mode an undefined input leaves the configuration unchanged with reward 0.

    Raises:
        TerminalStep: If ``config`` is terminal
        StrictModeUndefined: In strict mode when no transition applies
        EpsilonDivergence: If the closure exceeds ``cap``
    """
    config, reward, _ = step_with_transition(pdrm, config, sigma, cap)
    return config, reward


def run_word(
    pdrm: PdRM, word: Sequence[Iterable[str]], cap: int = DEFAULT_EPSILON_CAP
) -> Tuple[List[float], Configuration]:
    """Fold ``step`` over a word from the initial configuration.

    Stops at the first terminal configuration; the pending initial reward is
    added to the first trace entry.
    """
    config, pending = initial_configuration(pdrm, cap)
    trace: List[float] = []
    for sigma in word:
        if config.terminal:
            break
        config, reward = step(pdrm, config, frozenset(sigma), cap)
        trace.append(reward + pending)
        pending = 0.0
    return trace, config


def top_k_view(config: Configuration, k: int) -> Tuple[str, Tuple[str, ...]]:
    """State and the first ``min(k, len(stack))`` stack symbols."""
    return config.state, config.stack[: max(k, 0)]
