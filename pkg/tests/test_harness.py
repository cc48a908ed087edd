import csv
import json
import shutil
from dataclasses import replace

import jinja2
import pytest

from config.config_loader import get_hyperparam_defaults, load_config
from conftest import EXPERIMENTS, MACHINES
from src.database.run_store import COMPLETED, FAILED, ConfigHashMismatch, RunStore
from src.learning.evaluation import LearningCurve
from src.parsers.errors import AssetError, ParseError
from src.parsers.experiment_parser import compute_config_hash, parse_config
from src.pipelines import experiment_runner
from src.pipelines.experiment_runner import aggregate_agent, evaluate_agent, load_policy, run_dir, run_experiment
from src.reporting.report_writer import MissingAggregate, emit_plot_data, read_json
from src.reporting.template_loader import render_template

TINY = """\
name: tiny_paint
environment:
  kind: paintworld
  horizon: 5
machine:
  pdrm: {pdrm}
agents:
  - name: top1
    algorithm: q_learning
    abstraction: {{kind: top_k, k: 1}}
    hyperparams: {{episodes: 20, eval_every: 10, eval_episodes: 5}}
  - name: top5
    algorithm: q_learning
    abstraction: {{kind: top_k, k: 5}}
    hyperparams: {{episodes: 20, eval_every: 10, eval_episodes: 5}}
seeds: {seeds}
output_dir: out
"""

NONDETERMINISTIC = """\
pdrm broken
props: a b
states: q
initial: q
final: f
stack: Z
bottom: Z
mode: lenient
T q | a | Z | Z | 0 | q
T q | b | Z | Z | 1 | f
"""


def write_config(tmp_path, seeds="[0, 1]", pdrm=None):
    path = tmp_path / "tiny.exp"
    path.write_text(TINY.format(pdrm=pdrm or MACHINES / "paintworld.pdrm", seeds=seeds), encoding="utf-8")
    return path


def test_shipped_configs_parse():
    for path in sorted(EXPERIMENTS.glob("*.exp")):
        cfg = parse_config(path)
        assert cfg.agents and cfg.seeds
        assert len(cfg.config_hash) == 64


def test_letterenv_config():
    cfg = parse_config(EXPERIMENTS / "letterenv.exp")
    assert [a.name for a in cfg.agents] == ["pdrm_top1", "pdrm_full", "q_cra", "translated_top1"]
    assert cfg.agent("translated_top1").abstraction.label() == "top_1"
    assert cfg.pdrm is not None and cfg.cra is not None
    assert cfg.seeds == [0, 1, 2, 3, 4]
    with pytest.raises(KeyError):
        cfg.agent("nobody")


def test_duplicate_agent_names(tmp_path):
    text = TINY.format(pdrm=MACHINES / "paintworld.pdrm", seeds="[0]").replace("name: top5", "name: top1")
    path = tmp_path / "dup.exp"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ParseError, match="Duplicate agent name") as info:
        parse_config(path)
    assert info.value.line == 12


def test_schema_violation(tmp_path):
    path = tmp_path / "bad.exp"
    path.write_text(TINY.format(pdrm=MACHINES / "paintworld.pdrm", seeds="[0]") + "colour: blue\n", encoding="utf-8")
    with pytest.raises(ParseError, match="colour"):
        parse_config(path)


def test_yaml_syntax_error_has_location(tmp_path):
    path = tmp_path / "broken.exp"
    path.write_text("name: x\nagents: [\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        parse_config(path)
    assert info.value.line > 0


def test_nondeterministic_machine_is_an_asset_error(tmp_path):
    machine = tmp_path / "broken.pdrm"
    machine.write_text(NONDETERMINISTIC, encoding="utf-8")
    with pytest.raises(AssetError, match="broken.pdrm"):
        parse_config(write_config(tmp_path, pdrm=machine))


def test_missing_machine_is_an_asset_error(tmp_path):
    with pytest.raises(AssetError, match="file not found"):
        parse_config(write_config(tmp_path, pdrm=tmp_path / "absent.pdrm"))


def test_config_hash_tracks_assets(tmp_path):
    machine = tmp_path / "paint.pdrm"
    shutil.copy(MACHINES / "paintworld.pdrm", machine)
    path = write_config(tmp_path, pdrm=machine)
    first = parse_config(path).config_hash
    assert parse_config(path).config_hash == first
    machine.write_text(machine.read_text(encoding="utf-8") + "# edited\n", encoding="utf-8")
    assert parse_config(path).config_hash != first


def test_config_hash_ignores_key_order(tmp_path):
    assert compute_config_hash({"a": 1, "b": [1, 2]}, []) == compute_config_hash({"b": [1, 2], "a": 1}, [])


def test_run_experiment_writes_artifacts(tmp_path):
    cfg = parse_config(write_config(tmp_path))
    artifacts = run_experiment(cfg)
    assert artifacts.ok
    assert sorted(artifacts.trained) == [("top1", 0), ("top1", 1), ("top5", 0), ("top5", 1)]
    folder = run_dir(cfg.output_dir, "top5", 1)
    for name in ("curve.csv", "returns.csv", "summary.json", "policy.joblib"):
        assert (folder / name).exists()
    summary = read_json(folder / "summary.json")
    assert summary["abstraction"] == "top_5" and summary["hyperparams"]["seed"] == 1
    metadata = read_json(artifacts.metadata_path)
    assert metadata["config_hash"] == cfg.config_hash
    assert metadata["agents"] == ["top1", "top5"]
    assert metadata["aggregated"] == ["top1", "top5"]
    assert "All 4 runs completed." in artifacts.summary_path.read_text(encoding="utf-8")
    assert [p.name for p in artifacts.plot_files] == ["tiny_paint.tsv", "tiny_paint.manifest.json"]


def test_aggregates_do_not_depend_on_worker_count(tmp_path):
    produced = {}
    for workers in (1, 2):
        folder = tmp_path / f"workers_{workers}"
        folder.mkdir()
        artifacts = run_experiment(parse_config(write_config(folder)), n_jobs=workers)
        assert artifacts.ok
        produced[workers] = {name: path.read_bytes() for name, path in artifacts.aggregates.items()}
    assert sorted(produced[1]) == ["top1", "top5"]
    assert produced[1] == produced[2]


def test_resume_skips_completed_runs(tmp_path):
    cfg = parse_config(write_config(tmp_path))
    first = run_experiment(cfg)
    before = {name: path.read_bytes() for name, path in first.aggregates.items()}
    second = run_experiment(parse_config(write_config(tmp_path)))
    assert second.trained == []
    assert len(second.skipped) == 4
    assert {name: path.read_bytes() for name, path in second.aggregates.items()} == before


def test_failed_run_is_isolated_and_retried(tmp_path, monkeypatch):
    cfg = parse_config(write_config(tmp_path))
    real = experiment_runner.train_agent

    def flaky(cfg, agent, seed, *args):
        if agent.name == "top5" and seed == 1:
            raise RuntimeError("worker crashed")
        return real(cfg, agent, seed, *args)

    monkeypatch.setattr(experiment_runner, "train_agent", flaky)
    artifacts = run_experiment(cfg)
    assert not artifacts.ok
    assert artifacts.failures == [{"agent": "top5", "seed": 1, "error": "RuntimeError: worker crashed"}]
    assert sorted(artifacts.aggregates) == ["top1"]
    assert "worker crashed" in artifacts.summary_path.read_text(encoding="utf-8")

    monkeypatch.setattr(experiment_runner, "train_agent", real)
    retried = run_experiment(cfg)
    assert retried.ok
    assert retried.trained == [("top5", 1)]
    assert sorted(retried.aggregates) == ["top1", "top5"]


def test_changed_config_refuses_old_results(tmp_path):
    run_experiment(parse_config(write_config(tmp_path, seeds="[0]")))
    with pytest.raises(ConfigHashMismatch):
        run_experiment(parse_config(write_config(tmp_path, seeds="[0, 1]")))


def test_stored_policy_round_trip(tmp_path):
    cfg = parse_config(write_config(tmp_path, seeds="[0]"))
    run_experiment(cfg)
    assert hasattr(load_policy(cfg, "top5", 0), "act")
    stats = evaluate_agent(cfg, "top5", 0)
    assert len(stats.returns) == 5
    assert all(-1.0 <= r <= 0.0 for r in stats.returns)
    with pytest.raises(FileNotFoundError):
        load_policy(cfg, "top5", 9)


def test_policy_from_other_config_is_rejected(tmp_path):
    cfg = parse_config(write_config(tmp_path, seeds="[0]"))
    run_experiment(cfg)
    cfg.config_hash = "0" * 64
    with pytest.raises(ValueError, match="another config"):
        load_policy(cfg, "top1", 0)


def test_single_constant_seed_has_collapsed_band(tmp_path):
    folder = run_dir(tmp_path, "solo", 0)
    folder.mkdir(parents=True)
    (folder / "returns.csv").write_text("episode,returns\n10,0.500000\n20,1.000000 1.000000\n", encoding="utf-8")
    curve = aggregate_agent(tmp_path, "solo", [0])
    for point in curve.points:
        assert point.median == point.p25 == point.p75
    assert [p.median for p in curve.points] == [0.5, 1.0]


def test_plot_data_columns(tmp_path):
    aggregate = tmp_path / "aggregate"
    aggregate.mkdir()
    (aggregate / "b.csv").write_text("episode,median,p25,p75\n10,0.5,0.25,0.75\n", encoding="utf-8")
    (aggregate / "a.csv").write_text(
        "episode,median,p25,p75\n10,0.1,0.0,0.2\n20,0.3,0.2,0.4\n", encoding="utf-8"
    )
    data, manifest = emit_plot_data(tmp_path, ["b", "a"])
    with open(data, encoding="utf-8") as f:
        rows = list(csv.reader(f, delimiter="\t"))
    assert rows[0] == ["episode", "b_median", "b_p25", "b_p75", "a_median", "a_p25", "a_p75"]
    assert rows[1] == ["10", "0.500000", "0.250000", "0.750000", "0.100000", "0.000000", "0.200000"]
    assert rows[2] == ["20", "", "", "", "0.300000", "0.200000", "0.400000"]
    lines = json.loads(manifest.read_text(encoding="utf-8"))["lines"]
    assert [line["agent"] for line in lines] == ["b", "a"]


def test_plot_data_needs_aggregates(tmp_path):
    with pytest.raises(MissingAggregate):
        emit_plot_data(tmp_path)


def test_run_store(tmp_path):
    store = RunStore(tmp_path / "db" / "runs.db")
    store.bind("exp", "h1")
    store.bind("exp", "h1")
    with pytest.raises(ConfigHashMismatch):
        store.bind("exp", "h2")
    store.record("h1", "a", 0, COMPLETED, {"wall_time": 1.5})
    store.record("h1", "a", 1, FAILED, error="boom")
    assert store.is_completed("h1", "a", 0)
    assert not store.is_completed("h1", "a", 1)
    runs = store.runs("h1")
    assert [(r["seed"], r["status"]) for r in runs] == [(0, COMPLETED), (1, FAILED)]
    assert runs[0]["summary"] == {"wall_time": 1.5}
    assert store.clear() == 2
    assert store.bound_hash() is None
    store.bind("exp", "h2")


def test_report_template_rejects_missing_values(tmp_path):
    (tmp_path / "row.md.j2").write_text("{{ name }}: {{ value | fixed(2) }} {{ episode | optional }}\n", encoding="utf-8")
    assert render_template("row.md.j2", {"name": "top1", "value": None, "episode": 40}, tmp_path) == "top1: - 40\n"
    assert render_template("row.md.j2", {"name": "top1", "value": 0.5, "episode": None}, tmp_path) == "top1: 0.50 -\n"
    with pytest.raises(jinja2.UndefinedError):
        render_template("row.md.j2", {"value": 1.0, "episode": 1}, tmp_path)


def shipped_pair(name, tmp_path, first, second):
    cfg = parse_config(EXPERIMENTS / f"{name}.exp")
    cfg = replace(cfg, output_dir=tmp_path, agents=[cfg.agent(first), cfg.agent(second)])
    artifacts = run_experiment(cfg, hyper_defaults=get_hyperparam_defaults(load_config()))
    assert artifacts.ok
    return (LearningCurve.from_csv(artifacts.aggregates[first]), LearningCurve.from_csv(artifacts.aggregates[second]))


@pytest.mark.slow
def test_letterenv_top1_matches_counter_baseline(tmp_path):
    top1, counter = shipped_pair("letterenv", tmp_path, "pdrm_top1", "q_cra")
    assert top1.final.median >= counter.final.median


@pytest.mark.slow
def test_deliverworld_options_learn_sooner(tmp_path):
    hierarchical, flat = shipped_pair("deliverworld_4", tmp_path, "hierarchical_top1", "flat_top1")
    reached = hierarchical.first_episode_reaching(1.0)
    assert reached is not None
    assert flat.first_episode_reaching(1.0) is None or reached < flat.first_episode_reaching(1.0)
