"""Periodic greedy evaluation and learning curves."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np

from src.environments.base import LabeledMDP
from src.product.product_mdp import rollout
from src.product.runners import Machine

CURVE_HEADER = ("episode", "median", "p25", "p75")
# (n + 1) * p order-statistic position with linear interpolation between neighbours
PERCENTILE_METHOD = "weibull"


@dataclass(frozen=True)
class EvaluationStats:
    median: float
    p25: float
    p75: float
    returns: tuple

    @classmethod
    def from_returns(cls, returns: Sequence[float]) -> "EvaluationStats":
        values = np.asarray(returns, dtype=float)
        if values.size == 0:
            raise ValueError("Cannot summarize an empty set of returns")
        p25, median, p75 = np.percentile(values, [25, 50, 75], method=PERCENTILE_METHOD)
        return cls(float(median), float(p25), float(p75), tuple(float(v) for v in values))


def evaluate(
    env: LabeledMDP,
    machine: Machine,
    policy: Any,
    n_episodes: int,
    rng: np.random.Generator,
) -> EvaluationStats:
    """Run greedy test episodes and summarize their normalized returns.

    Environments with scripted ``evaluation_starts`` run one episode per start
    instead of ``n_episodes`` sampled starts.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be at least 1")
    starts = env.evaluation_starts
    if starts:
        returns = [rollout(env, machine, policy, rng, start=s).normalized_return for s in starts]
    else:
        returns = [rollout(env, machine, policy, rng).normalized_return for _ in range(n_episodes)]
    return EvaluationStats.from_returns(returns)


@dataclass(frozen=True)
class CurvePoint:
    episode: int
    median: float
    p25: float
    p75: float


@dataclass
class LearningCurve:
    points: List[CurvePoint] = field(default_factory=list)
    raw_returns: List[tuple] = field(default_factory=list)

    def record(self, episode: int, stats: EvaluationStats) -> None:
        self.points.append(CurvePoint(episode, stats.median, stats.p25, stats.p75))
        self.raw_returns.append(stats.returns)

    @property
    def final(self) -> Optional[CurvePoint]:
        return self.points[-1] if self.points else None

    def first_episode_reaching(self, threshold: float) -> Optional[int]:
        """First evaluation episode whose median is at least ``threshold``."""
        for point in self.points:
            if point.median >= threshold:
                return point.episode
        return None

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CURVE_HEADER)
            for p in self.points:
                writer.writerow([p.episode, f"{p.median:.6f}", f"{p.p25:.6f}", f"{p.p75:.6f}"])
        return path

    def returns_to_csv(self, path: Path) -> Path:
        """Raw normalized returns, one row per evaluation point."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["episode", "returns"])
            for p, returns in zip(self.points, self.raw_returns):
                writer.writerow([p.episode, " ".join(f"{r:.6f}" for r in returns)])
        return path

    @classmethod
    def from_csv(cls, path: Path) -> "LearningCurve":
        curve = cls()
        with open(path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                curve.points.append(
                    CurvePoint(int(row["episode"]), float(row["median"]), float(row["p25"]), float(row["p75"]))
                )
        return curve
