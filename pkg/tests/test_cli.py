import pytest

from config.config_loader import DEFAULT_SYSTEM, get_hyperparam_defaults, get_value_iteration_config, get_worker_count, load_config
from conftest import EXPERIMENTS, MACHINES
from src.analysis.k_stack import INSUFFICIENT, Counterexample, KStackReport
from src.automata.pdrm import Configuration
from src.cli import main
from src.parsers.pdrm_parser import load_pdrm
from src.pipelines.shared import display_k_stack_report
from src.product.product_mdp import ProductState


def test_validate_shipped_machines(capsys):
    assert main(["validate", str(MACHINES / "maze.pdrm")]) == 0
    assert main(["validate", str(MACHINES / "letterenv.cra")]) == 0
    assert "is valid" in capsys.readouterr().out


def test_validate_reports_problems(tmp_path, capsys):
    broken = tmp_path / "broken.pdrm"
    broken.write_text(
        "pdrm broken\nprops: a\nstates: q\ninitial: q\nfinal: f\nstack: Z\nbottom: Y\nmode: lenient\n",
        encoding="utf-8",
    )
    assert main(["validate", str(broken)]) == 1
    assert "bottom" in capsys.readouterr().out
    assert main(["validate", str(tmp_path / "notes.txt")]) == 1


def test_malformed_machine_is_a_handled_error(tmp_path, capsys):
    bad = tmp_path / "bad.pdrm"
    bad.write_text("pdrm bad\nprops a\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    assert "ParseError" in capsys.readouterr().out


def test_translate_cra_writes_valid_machine(tmp_path, capsys):
    target = tmp_path / "translated.pdrm"
    assert main(["translate-cra", str(MACHINES / "letterenv.cra"), "-o", str(target)]) == 0
    assert "1 helper" in capsys.readouterr().out
    assert load_pdrm(target).stack_alphabet == frozenset({"#", "A"})


def test_check_equivalence(capsys):
    assert main(["check-equiv", str(MACHINES / "letterenv.cra"), "--words", "50", "--max-length", "12"]) == 0
    assert main([
        "check-equiv", str(MACHINES / "letterenv.cra"), str(MACHINES / "letterenv.pdrm"), "--words", "50",
    ]) == 0
    assert "Identical reward traces" in capsys.readouterr().out


def test_closed_form_counts(capsys):
    assert main(["count", "--gamma", "2", "--k", "0", "1", "2"]) == 0
    out = capsys.readouterr().out
    assert "k = 0: 1" in out and "k = 1: 3" in out and "k = 2: 7" in out


def test_full_bound_count(capsys):
    assert main(["count", "--gamma", "2", "--full", "2", "1", "0"]) == 0
    assert "n = 2, m = 1, e = 0: 7" in capsys.readouterr().out


def test_measured_counts(capsys):
    assert main(["count", "--config", str(EXPERIMENTS / "paintworld.exp"), "--k", "1", "5"]) == 0
    out = capsys.readouterr().out
    assert "top_1: 2 keys" in out and "full: 6 keys" in out


def test_growth_table(capsys):
    assert main(["count", "--config", str(EXPERIMENTS / "maze_5x5.exp"), "--path", "rrdd", "--reachable"]) == 0
    assert "reachable_stacks" in capsys.readouterr().out


def test_check_topk_on_paintworld(tmp_path, capsys):
    config = str(EXPERIMENTS / "paintworld.exp")
    export = tmp_path / "paint.tsv"
    assert main(["check-topk", config, "--k", "1", "5", "--export", str(export)]) == 0
    out = capsys.readouterr().out
    assert "k = 1: insufficient" in out and "k = 5: sufficient" in out
    assert export.read_text(encoding="utf-8").startswith("state\taction")
    assert main(["check-topk", config, "--k", "1", "--strict"]) == 2
    assert main(["check-topk", config, "--k", "5", "--strict"]) == 0


def test_plot_data_without_aggregates(tmp_path, capsys):
    assert main(["plot-data", str(tmp_path)]) == 1
    assert "MissingAggregate" in capsys.readouterr().out


def test_missing_experiment_config(tmp_path):
    assert main(["train", str(tmp_path / "absent.exp")]) == 1


def test_config_file_and_environment(tmp_path, monkeypatch):
    settings = tmp_path / "settings.yaml"
    settings.write_text("system:\n  workers: 3\ndefaults:\n  hyperparams:\n    alpha: 0.2\n", encoding="utf-8")
    monkeypatch.delenv("PDRM_LAB_WORKERS", raising=False)
    config = load_config(settings)
    assert get_worker_count(config) == 3
    assert get_hyperparam_defaults(config) == {"alpha": 0.2}
    assert config.system["epsilon_cap"] == 10_000
    monkeypatch.setenv("PDRM_LAB_WORKERS", "5")
    assert get_worker_count(config) == 5
    monkeypatch.setenv("PDRM_LAB_WORKERS", "many")
    with pytest.raises(ValueError):
        get_worker_count(config)
    monkeypatch.setenv("PDRM_LAB_LOG_LEVEL", "DEBUG")
    assert load_config(settings).logging["level"] == "DEBUG"


def test_partial_system_override_keeps_nested_defaults(tmp_path):
    settings = tmp_path / "settings.yaml"
    settings.write_text("system:\n  value_iteration:\n    gamma: 0.9\n", encoding="utf-8")
    config = load_config(settings)
    assert config.system["value_iteration"] == {**DEFAULT_SYSTEM["value_iteration"], "gamma": 0.9}
    assert config.system["equivalence"] == DEFAULT_SYSTEM["equivalence"]
    assert get_value_iteration_config(config)["tol"] == 1e-8
    assert DEFAULT_SYSTEM["value_iteration"]["gamma"] == 0.99


def test_missing_settings_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.yaml")


def test_topk_report_lists_twenty_counterexamples(capsys):
    ps = ProductState(0, Configuration("q", ("Z",)))
    pairs = [Counterexample(ps, ps, 0.0, float(i), ("a",), ("b",)) for i in range(25)]
    display_k_stack_report(KStackReport(1, INSUFFICIENT, pairs, n_groups=1, n_states=26))
    out = capsys.readouterr().out
    assert out.count("   - <0, q, Z>") == 20
    assert "... and 5 more" in out
