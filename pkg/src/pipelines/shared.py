"""Console display helpers shared by the CLI subcommands."""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence

from src.analysis.blowup import BlowupReport
from src.analysis.k_stack import KStackReport
from src.counting.equivalence import EquivalenceReport
from src.counting.growth import GrowthRow
from src.learning.evaluation import EvaluationStats


def display_run_artifacts(artifacts) -> None:
    """
    Display the outcome of an experiment run.

    Args:
        artifacts: RunArtifactSet returned by ``run_experiment``
    """
    print(f"✅ Trained: {len(artifacts.trained)} runs")
    if artifacts.skipped:
        print(f"⏭️  Skipped (already complete): {len(artifacts.skipped)} runs")
    for name, path in sorted(artifacts.aggregates.items()):
        print(f"   📈 {name}: {path.name}")
    if artifacts.failures:
        print(f"❌ Failed: {len(artifacts.failures)} runs")
        for failure in artifacts.failures:
            print(f"   - {failure['agent']} seed {failure['seed']}: {failure['error']}")
    if artifacts.summary_path:
        print(f"📊 Summary: {artifacts.summary_path}")


def display_evaluation(agent: str, seed: int, stats: EvaluationStats) -> None:
    print(f"📊 {agent} (seed {seed}) over {len(stats.returns)} episodes:")
    print(f"   median {stats.median:.3f}  p25 {stats.p25:.3f}  p75 {stats.p75:.3f}")


def display_k_stack_report(report: KStackReport, max_counterexamples: int = 20) -> None:
    """
    Display a k-stack check with its first counterexamples.

    Args:
        report: Result of ``check_k_stack_optimality``
        max_counterexamples: Number of disagreeing pairs to print
    """
    icon = {"sufficient": "✅", "insufficient": "❌"}.get(report.verdict, "⚠️ ")
    lines = report.summary().splitlines()
    print(f"{icon} {lines[0]}")
    for line in lines[1:]:
        print(f"   {line}")
    for example in report.counterexamples[:max_counterexamples]:
        print(f"   - {example.describe()}")
    if len(report.counterexamples) > max_counterexamples:
        print(f"   ... and {len(report.counterexamples) - max_counterexamples} more")


def display_equivalence_report(report: EquivalenceReport, max_mismatches: int = 3) -> None:
    undefined = len(report.results) - report.n_checked
    if report.passed:
        print(f"✅ Identical reward traces on {report.n_checked} words ({undefined} undefined for the counter machine)")
        return
    print(f"❌ {len(report.mismatches)} of {report.n_checked} words produced different reward traces")
    for result in report.mismatches[:max_mismatches]:
        word = " ".join("{" + ",".join(sorted(s)) + "}" for s in result.word)
        print(f"   - {word}")
        print(f"     counter: {result.cra_trace}")
        print(f"     pushdown: {result.pdrm_trace}")


def display_stack_counts(gamma_size: int, ks: Sequence[int], counts: Sequence[int]) -> None:
    print(f"📐 Stack strings over {gamma_size} symbols:")
    for k, count in zip(ks, counts):
        print(f"   k = {k}: {count}")


def display_full_bound(gamma_size: int, n: int, m: int, e: int, bound: int) -> None:
    print(f"📐 Full-stack bound over {gamma_size} symbols, n = {n}, m = {m}, e = {e}: {bound}")


def display_blowup_report(report: BlowupReport) -> None:
    print(f"📐 Horizon {report.horizon}: m = {report.m}, e = {report.e}, "
          f"{report.n_env_states} env states x {report.n_machine_states} machine states, |stack alphabet| = {report.gamma_size}")
    print(f"   distinct stacks reached: {report.distinct_stacks}")
    for row in report.rows:
        print(f"   {row.abstraction:>8}: {row.empirical} keys (bound {row.bound})")


def display_growth(rows: Iterable[GrowthRow], stack_counts: Optional[List[int]] = None) -> None:
    print("📈 step  max_counter  unit_ops  stack_length" + ("  reachable_stacks" if stack_counts else ""))
    for i, row in enumerate(rows):
        extra = f"  {stack_counts[i]:>16}" if stack_counts and i < len(stack_counts) else ""
        print(f"   {row.steps:>4}  {row.max_counter:>11}  {row.unit_ops:>8}  {row.stack_length:>12}{extra}")
