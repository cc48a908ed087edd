"""Run every (agent, seed) pair of an experiment and write its artifacts.

Layout under the output directory::

    runs.db                              run registry (config hash, agent, seed)
    runs/<agent>/seed_<s>/curve.csv      episode,median,p25,p75
    runs/<agent>/seed_<s>/returns.csv    raw normalized evaluation returns
    runs/<agent>/seed_<s>/summary.json   final statistics, wall time, table size
    runs/<agent>/seed_<s>/policy.joblib  greedy policy for the eval command
    aggregate/<agent>.csv                percentiles pooled across seeds
    metadata.json, summary.md, plots/
"""

from __future__ import annotations

import logging
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import joblib
import numpy as np
import scipy
from joblib import Parallel, delayed

from src.automata.semantics import DEFAULT_EPSILON_CAP
from src.counting.growth import PathEncodingCRA
from src.counting.translation import translate_cra_to_pdrm
from src.database.run_store import COMPLETED, FAILED, RunStore
from src.environments.registry import build_environment
from src.learning.evaluation import EvaluationStats, LearningCurve, evaluate
from src.learning.hierarchical import hierarchical_train
from src.learning.q_learning import q_learning_train
from src.learning.tables import Hyperparams
from src.parsers.experiment_parser import AgentSpec, ExperimentConfig
from src.product.runners import CraRunner, MachineRunner, PdrmRunner
from src.reporting.report_writer import (
    AGGREGATE_DIR,
    METADATA_FILE,
    emit_plot_data,
    read_returns_csv,
    write_json,
    write_report,
)
from src.reporting.template_loader import render_template

logger = logging.getLogger(__name__)

RUNS_DIR = "runs"
POLICY_FILE = "policy.joblib"


@dataclass
class RunArtifactSet:
    output_dir: Path
    trained: List[Tuple[str, int]] = field(default_factory=list)
    skipped: List[Tuple[str, int]] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    aggregates: Dict[str, Path] = field(default_factory=dict)
    plot_files: List[Path] = field(default_factory=list)
    metadata_path: Optional[Path] = None
    summary_path: Optional[Path] = None

    @property
    def ok(self) -> bool:
        return not self.failures


def run_dir(output_dir: Path, agent: str, seed: int) -> Path:
    return Path(output_dir) / RUNS_DIR / agent / f"seed_{seed}"


def build_runner(cfg: ExperimentConfig, agent: AgentSpec, epsilon_cap: int = DEFAULT_EPSILON_CAP) -> MachineRunner:
    """The machine an agent learns with, wrapped in its runner."""
    if agent.machine == "pdrm":
        return PdrmRunner(cfg.pdrm, epsilon_cap)
    if agent.machine == "translated_cra":
        return PdrmRunner(translate_cra_to_pdrm(cfg.cra), epsilon_cap)
    if agent.machine == "cra":
        return CraRunner(cfg.cra, agent.op_budget, agent.wall_clock_limit)
    if agent.machine == "path_encoding":
        return CraRunner(PathEncodingCRA(), agent.op_budget, agent.wall_clock_limit)
    raise ValueError(f"Unknown machine choice '{agent.machine}' for agent '{agent.name}'")


def train_agent(
    cfg: ExperimentConfig,
    agent: AgentSpec,
    seed: int,
    hyper_defaults: Optional[Dict[str, Any]] = None,
    epsilon_cap: int = DEFAULT_EPSILON_CAP,
) -> Dict[str, Any]:
    """Train one agent with one seed and write its run files.

    Returns:
        The run summary that is also written to ``summary.json``
    """
    env, eval_env = build_environment(cfg.environment)
    runner = build_runner(cfg, agent, epsilon_cap)
    hp = Hyperparams.from_dict({**agent.hyperparams, "seed": seed}, hyper_defaults)
    if agent.algorithm == "hierarchical":
        result = hierarchical_train(env, runner, hp, agent.option_k, eval_env)
    else:
        result = q_learning_train(env, runner, agent.abstraction, hp, eval_env)

    folder = run_dir(cfg.output_dir, agent.name, seed)
    folder.mkdir(parents=True, exist_ok=True)
    result.curve.to_csv(folder / "curve.csv")
    result.curve.returns_to_csv(folder / "returns.csv")
    joblib.dump(
        {"policy": result.policy, "agent": agent.name, "seed": seed, "config_hash": cfg.config_hash},
        folder / POLICY_FILE,
    )
    final = result.curve.final
    summary = {
        "agent": agent.name,
        "seed": seed,
        "algorithm": agent.algorithm,
        "machine": agent.machine,
        "abstraction": agent.abstraction.label(),
        "hyperparams": hp.to_dict(),
        "final": None if final is None else {"median": final.median, "p25": final.p25, "p75": final.p75},
        "first_success": result.curve.first_episode_reaching(1.0),
        "table_size": result.table_size,
        "wall_time": round(result.wall_time, 3),
        "stats": result.stats,
    }
    write_json(summary, folder / "summary.json")
    return summary


def _guarded_train(cfg, agent, seed, hyper_defaults, epsilon_cap) -> Dict[str, Any]:
    try:
        return {"status": COMPLETED, "summary": train_agent(cfg, agent, seed, hyper_defaults, epsilon_cap)}
    except Exception as exc:
        logger.error(f"Run {agent.name} seed {seed} failed: {exc}")
        return {"status": FAILED, "error": f"{type(exc).__name__}: {exc}"}


def aggregate_agent(output_dir: Path, agent: str, seeds: List[int]) -> LearningCurve:
    """Pool the evaluation returns of all seeds at each evaluation episode."""
    pooled: Dict[int, List[float]] = {}
    for seed in seeds:
        for episode, returns in read_returns_csv(run_dir(output_dir, agent, seed) / "returns.csv").items():
            pooled.setdefault(episode, []).extend(returns)
    curve = LearningCurve()
    for episode in sorted(pooled):
        curve.record(episode, EvaluationStats.from_returns(pooled[episode]))
    return curve


def _run_files_present(output_dir: Path, agent: str, seed: int) -> bool:
    folder = run_dir(output_dir, agent, seed)
    return all((folder / name).exists() for name in ("curve.csv", "returns.csv", "summary.json"))


def run_experiment(
    cfg: ExperimentConfig,
    n_jobs: int = 1,
    hyper_defaults: Optional[Dict[str, Any]] = None,
    epsilon_cap: int = DEFAULT_EPSILON_CAP,
) -> RunArtifactSet:
    """Train every (agent, seed) pair not yet completed, then aggregate and report.

    Args:
        cfg: Parsed experiment
        n_jobs: Worker pool size; 1 runs in-process
        hyper_defaults: Hyperparameter defaults under the agents' own values
        epsilon_cap: Silent-step cap for pushdown machines

    Returns:
        RunArtifactSet; ``ok`` is False if any run failed

    Raises:
        ConfigHashMismatch: If the output directory belongs to another config
    """
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    store = RunStore(out / "runs.db")
    store.bind(cfg.name, cfg.config_hash)
    artifacts = RunArtifactSet(out)

    pending: List[Tuple[AgentSpec, int]] = []
    for agent in cfg.agents:
        for seed in cfg.seeds:
            if store.is_completed(cfg.config_hash, agent.name, seed) and _run_files_present(out, agent.name, seed):
                artifacts.skipped.append((agent.name, seed))
            else:
                pending.append((agent, seed))
    logger.info(f"{cfg.name}: {len(pending)} runs to train, {len(artifacts.skipped)} already complete")

    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_guarded_train)(cfg, agent, seed, hyper_defaults, epsilon_cap) for agent, seed in pending
    )
    for (agent, seed), outcome in zip(pending, outcomes):
        if outcome["status"] == COMPLETED:
            store.record(cfg.config_hash, agent.name, seed, COMPLETED, outcome["summary"])
            artifacts.trained.append((agent.name, seed))
        else:
            store.record(cfg.config_hash, agent.name, seed, FAILED, error=outcome["error"])

    runs = store.runs(cfg.config_hash)
    artifacts.failures = [
        {"agent": r["agent"], "seed": r["seed"], "error": r["error"]} for r in runs if r["status"] != COMPLETED
    ]
    completed = {(r["agent"], r["seed"]) for r in runs if r["status"] == COMPLETED}
    for agent in cfg.agents:
        if all((agent.name, s) in completed for s in cfg.seeds):
            curve = aggregate_agent(out, agent.name, cfg.seeds)
            artifacts.aggregates[agent.name] = curve.to_csv(out / AGGREGATE_DIR / f"{agent.name}.csv")
        else:
            logger.warning(f"Not aggregating {agent.name}: some seeds did not complete")

    artifacts.metadata_path = write_json(_metadata(cfg, runs, artifacts), out / METADATA_FILE)
    artifacts.summary_path = write_report(_render_summary(cfg, runs, artifacts), out)
    if artifacts.aggregates:
        artifacts.plot_files = emit_plot_data(out, [a.name for a in cfg.agents])
    return artifacts


def _metadata(cfg: ExperimentConfig, runs: List[Dict[str, Any]], artifacts: RunArtifactSet) -> Dict[str, Any]:
    return {
        "experiment": cfg.name,
        "config": str(cfg.path.name),
        "config_hash": cfg.config_hash,
        "environment": cfg.environment.get("kind"),
        "agents": [a.name for a in cfg.agents],
        "seeds": cfg.seeds,
        "versions": {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__},
        "runs": [
            {"agent": r["agent"], "seed": r["seed"], "status": r["status"],
             "wall_time": r["summary"].get("wall_time"), "table_size": r["summary"].get("table_size")}
            for r in runs
        ],
        "failures": artifacts.failures,
        "aggregated": sorted(artifacts.aggregates),
    }


def _render_summary(cfg: ExperimentConfig, runs: List[Dict[str, Any]], artifacts: RunArtifactSet) -> str:
    rows = []
    for agent in cfg.agents:
        curve = LearningCurve.from_csv(artifacts.aggregates[agent.name]) if agent.name in artifacts.aggregates else None
        final = curve.final if curve else None
        rows.append({
            "name": agent.name,
            "algorithm": agent.algorithm,
            "machine": agent.machine,
            "abstraction": "options" if agent.algorithm == "hierarchical" else agent.abstraction.label(),
            "median": final.median if final else None,
            "p25": final.p25 if final else None,
            "p75": final.p75 if final else None,
            "first_success": curve.first_episode_reaching(1.0) if curve else None,
        })
    return render_template("run_summary.md.j2", {
        "experiment": cfg.name,
        "environment": cfg.environment.get("kind"),
        "config_hash": cfg.config_hash,
        "seeds": cfg.seeds,
        "agents": rows,
        "failures": artifacts.failures,
        "n_runs": len(runs),
    })


def load_policy(cfg: ExperimentConfig, agent: str, seed: int) -> Any:
    """Load a persisted policy, checking that it belongs to this config.

    Raises:
        FileNotFoundError: If the run has no stored policy
        ValueError: If the policy was trained under another config hash
    """
    path = run_dir(cfg.output_dir, agent, seed) / POLICY_FILE
    if not path.exists():
        raise FileNotFoundError(f"No stored policy for {agent} seed {seed}: {path}")
    stored = joblib.load(path)
    if stored.get("config_hash") != cfg.config_hash:
        raise ValueError(f"Policy at {path} was trained under another config")
    return stored["policy"]


def evaluate_agent(
    cfg: ExperimentConfig,
    agent_name: str,
    seed: int,
    n_episodes: Optional[int] = None,
    epsilon_cap: int = DEFAULT_EPSILON_CAP,
) -> EvaluationStats:
    """Re-run greedy evaluation of a stored policy on the evaluation environment."""
    agent = cfg.agent(agent_name)
    policy = load_policy(cfg, agent_name, seed)
    _, eval_env = build_environment(cfg.environment)
    runner = build_runner(cfg, agent, epsilon_cap)
    episodes = n_episodes or int(agent.hyperparams.get("eval_episodes", 10))
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[1])
    return evaluate(eval_env, runner, policy, episodes, rng)
