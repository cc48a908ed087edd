"""Check whether policies that see only the top k stack symbols can be optimal.

States that agree on the environment state, the machine state and the top k
stack symbols are grouped. If every group agrees on its optimal value and its
optimal-action set, optimal top-k policies achieve the optimal value. The
converse does not hold: an insufficient verdict does not prove that top-k
policies lose value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Tuple

from src.analysis.value_iteration import TIE_TOLERANCE, ValueSolution
from src.product.enumeration import ExplicitProductMDP
from src.product.product_mdp import ProductState

SUFFICIENT = "sufficient"
INSUFFICIENT = "insufficient"
INCONCLUSIVE = "inconclusive-overflow"


@dataclass(frozen=True)
class Counterexample:
    first: ProductState
    second: ProductState
    first_value: float
    second_value: float
    first_actions: Tuple
    second_actions: Tuple

    def describe(self) -> str:
        return (
            f"{_show(self.first)} V={self.first_value:.6f} A={list(self.first_actions)}  vs  "
            f"{_show(self.second)} V={self.second_value:.6f} A={list(self.second_actions)}"
        )


def _show(ps: ProductState) -> str:
    return f"<{ps.env_state}, {ps.machine_state}, {''.join(ps.stack) or 'eps'}>"


@dataclass
class KStackReport:
    k: int
    verdict: str
    counterexamples: List[Counterexample] = field(default_factory=list)
    n_groups: int = 0
    n_states: int = 0
    overflow: bool = False
    common_action: bool = True
    identical_action_sets: bool = True
    tolerance: float = TIE_TOLERANCE

    @property
    def sufficient(self) -> bool:
        return self.verdict == SUFFICIENT

    def summary(self) -> str:
        lines = [
            f"k = {self.k}: {self.verdict} ({self.n_groups} groups over {self.n_states} reachable states, "
            f"tolerance {self.tolerance:g})"
        ]
        if self.verdict == SUFFICIENT:
            lines.append("Optimal top-k policies reach the optimal value on this bounded product.")
        elif self.verdict == INSUFFICIENT:
            lines.append("Some grouped states differ; this does not by itself show that top-k policies lose value.")
        else:
            lines.append("The stack cap was reached; raise it or the horizon decides nothing.")
        lines.append(
            f"Every group shares an optimal action: {'yes' if self.common_action else 'no'}; "
            f"identical optimal-action sets: {'yes' if self.identical_action_sets else 'no'}"
        )
        return "\n".join(lines)


def group_states(mdp: ExplicitProductMDP, k: int) -> Dict[Hashable, List[int]]:
    """Indices of the non-absorbing states, grouped by their top-k view."""
    groups: Dict[Hashable, List[int]] = {}
    for i, ps in enumerate(mdp.states):
        if i in mdp.status:
            continue
        groups.setdefault((ps.env_state, ps.machine_state, ps.stack[:k]), []).append(i)
    return groups


def check_k_stack_optimality(
    sol: ValueSolution,
    mdp: ExplicitProductMDP,
    k: int,
    tolerance: float = TIE_TOLERANCE,
) -> KStackReport:
    """Compare values and optimal-action sets inside every top-k group.

    Args:
        sol: Value iteration result on ``mdp``
        mdp: Enumerated bounded product
        k: Number of visible stack symbols
        tolerance: Maximum value difference within a group

    Returns:
        KStackReport; counterexamples pair each disagreeing state with the
        first state of its group
    """
    groups = group_states(mdp, k)
    report = KStackReport(k, SUFFICIENT, n_groups=len(groups), n_states=sum(map(len, groups.values())),
                          overflow=mdp.overflowed, tolerance=tolerance)
    for members in groups.values():
        head = members[0]
        shared = set(sol.optimal_actions[head])
        for other in members[1:]:
            shared &= set(sol.optimal_actions[other])
            value_differs = abs(sol.values[head] - sol.values[other]) > tolerance
            actions_differ = set(sol.optimal_actions[head]) != set(sol.optimal_actions[other])
            if actions_differ:
                report.identical_action_sets = False
            if value_differs or actions_differ:
                report.counterexamples.append(
                    Counterexample(
                        mdp.states[head], mdp.states[other],
                        float(sol.values[head]), float(sol.values[other]),
                        sol.optimal_actions[head], sol.optimal_actions[other],
                    )
                )
        if not shared:
            report.common_action = False
    if report.overflow:
        report.verdict = INCONCLUSIVE
    elif report.counterexamples:
        report.verdict = INSUFFICIENT
    return report
