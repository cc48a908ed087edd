import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to Python path for IDE debugging
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from config.config_loader import (
    get_epsilon_cap,
    get_equivalence_config,
    get_explosion_cap,
    get_hyperparam_defaults,
    get_value_iteration_config,
    get_worker_count,
    load_config,
)
from src.analysis.blowup import (
    BlowupBoundViolation,
    count_full_bound,
    count_stack_strings,
    measure_blowup,
    reachable_stack_counts,
)
from src.analysis.k_stack import check_k_stack_optimality
from src.analysis.value_iteration import NonFiniteValue, value_iteration
from src.automata.errors import PdrmRuntimeError, PdrmValidationError
from src.counting.cra import CraValidationError, NegativeCounter
from src.counting.equivalence import check_reward_equivalence, generate_words
from src.counting.growth import compare_growth
from src.counting.translation import helper_state_count, translate_cra_to_pdrm
from src.database.run_store import ConfigHashMismatch
from src.environments.base import BadConfig
from src.environments.registry import build_environment
from src.parsers.cra_parser import load_cra, parse_cra
from src.parsers.errors import AssetError, ParseError
from src.parsers.experiment_parser import parse_config
from src.parsers.pdrm_parser import load_pdrm, parse_pdrm, serialize_pdrm, write_pdrm
from src.pipelines.experiment_runner import evaluate_agent, run_experiment
from src.pipelines.shared import (
    display_blowup_report,
    display_equivalence_report,
    display_evaluation,
    display_full_bound,
    display_growth,
    display_k_stack_report,
    display_run_artifacts,
    display_stack_counts,
)
from src.product.enumeration import EpsilonCycle, ExplosionGuard, enumerate_bounded_product, export_triplets
from src.reporting.report_writer import MissingAggregate, emit_plot_data
from src.validation.cra_validator import find_cra_errors
from src.validation.pdrm_validator import find_pdrm_errors

logger = logging.getLogger(__name__)

# Failures reported as a single ❌ line and exit status 1
HANDLED_ERRORS = (
    ParseError,
    AssetError,
    PdrmValidationError,
    PdrmRuntimeError,
    CraValidationError,
    NegativeCounter,
    BadConfig,
    ConfigHashMismatch,
    MissingAggregate,
    ExplosionGuard,
    EpsilonCycle,
    NonFiniteValue,
    BlowupBoundViolation,
    FileNotFoundError,
    KeyError,
)


def cmd_validate(args, config) -> int:
    path = Path(args.file)
    if path.suffix == ".cra":
        spec = parse_cra(path)
        errors = find_cra_errors(spec)
    elif path.suffix == ".pdrm":
        spec = parse_pdrm(path)
        errors = find_pdrm_errors(spec)
    else:
        print(f"❌ Unknown machine file type: {path.suffix or path.name} (expected .pdrm or .cra)")
        return 1
    if errors:
        print(f"❌ {path.name}: {len(errors)} problem(s)")
        for error in errors:
            print(f"   - {error}")
        return 1
    print(f"✅ {path.name} is valid ({len(spec.states)} states, {len(spec.transitions)} transitions)")
    return 0


def cmd_train(args, config) -> int:
    print("📋 Parsing experiment config...")
    cfg = parse_config(Path(args.config))
    print(f"✅ {cfg.name}: {len(cfg.agents)} agents x {len(cfg.seeds)} seeds (config hash {cfg.config_hash[:12]})")
    workers = args.workers or get_worker_count(config)
    print(f"🚀 Training with {workers} worker(s)...")
    artifacts = run_experiment(cfg, workers, get_hyperparam_defaults(config), get_epsilon_cap(config))
    display_run_artifacts(artifacts)
    return 0 if artifacts.ok else 1


def cmd_eval(args, config) -> int:
    cfg = parse_config(Path(args.config))
    stats = evaluate_agent(cfg, args.agent, args.seed, args.episodes, get_epsilon_cap(config))
    display_evaluation(args.agent, args.seed, stats)
    return 0


def cmd_check_topk(args, config) -> int:
    cfg = parse_config(Path(args.config))
    if cfg.pdrm is None:
        print("❌ check-topk needs machine.pdrm in the experiment config")
        return 1
    horizon = args.horizon if args.horizon is not None else int(cfg.environment.get("horizon", 0))
    vi = get_value_iteration_config(config)
    env, _ = build_environment(cfg.environment)
    print(f"🔍 Enumerating product up to horizon {horizon}...")
    mdp = enumerate_bounded_product(
        env, cfg.pdrm, horizon, args.stack_cap,
        state_cap=get_explosion_cap(config), epsilon_cap=get_epsilon_cap(config), gamma=float(vi["gamma"]),
    )
    print(f"✅ {mdp.n_states} states, stack cap {mdp.stack_cap}")
    if args.export:
        export_triplets(mdp, Path(args.export))
        print(f"📄 Transitions written to {args.export}")
    sol = value_iteration(mdp, tol=float(vi["tol"]), tie_tolerance=float(vi["tie_tol"]),
                          max_iterations=int(vi["max_iterations"]))
    print(f"✅ Value iteration converged in {sol.iterations} iterations; initial value {sol.initial_value(mdp):.6f}")
    failed = False
    for k in args.k:
        report = check_k_stack_optimality(sol, mdp, k, float(vi["tie_tol"]))
        display_k_stack_report(report)
        failed = failed or not report.sufficient
    return 2 if failed and args.strict else 0


def cmd_translate_cra(args, config) -> int:
    cra = load_cra(Path(args.file))
    pdrm = translate_cra_to_pdrm(cra)
    print(f"✅ Translated {cra.name}: {len(pdrm.all_states)} states ({helper_state_count(cra)} helper), "
          f"{len(pdrm.transitions)} transitions")
    if args.output:
        write_pdrm(pdrm, Path(args.output))
        print(f"📄 Written to {args.output}")
    else:
        print(serialize_pdrm(pdrm))
    return 0


def cmd_check_equiv(args, config) -> int:
    defaults = get_equivalence_config(config)
    cra = load_cra(Path(args.cra))
    pdrm = load_pdrm(Path(args.pdrm)) if args.pdrm else translate_cra_to_pdrm(cra)
    n_words = args.words or int(defaults["words"])
    max_length = args.max_length or int(defaults["max_length"])
    seed = args.seed if args.seed is not None else int(defaults["seed"])
    words = generate_words(cra.atomic_props, n_words, max_length, seed)
    report = check_reward_equivalence(cra, pdrm, words, seed=seed, n_jobs=args.workers or get_worker_count(config))
    display_equivalence_report(report)
    return 0 if report.passed else 1


def cmd_count(args, config) -> int:
    if args.full is not None:
        n, m, e = args.full
        display_full_bound(args.gamma, n, m, e, count_full_bound(args.gamma, n, m, e))
        return 0
    ks = args.k or list(range(0, 6))
    if args.config is None:
        display_stack_counts(args.gamma, ks, [count_stack_strings(args.gamma, k) for k in ks])
        return 0
    cfg = parse_config(Path(args.config))
    if cfg.pdrm is None:
        print("❌ count needs machine.pdrm in the experiment config")
        return 1
    env, _ = build_environment(cfg.environment)
    if args.path:
        rows = compare_growth(cfg.pdrm, list(args.path))
        stacks = reachable_stack_counts(env, cfg.pdrm, [r.steps for r in rows]) if args.reachable else None
        display_growth(rows, stacks)
        return 0
    horizon = args.horizon if args.horizon is not None else int(cfg.environment.get("horizon", 0))
    display_blowup_report(measure_blowup(env, cfg.pdrm, horizon, ks))
    return 0


def cmd_plot_data(args, config) -> int:
    paths = emit_plot_data(Path(args.output_dir))
    for path in paths:
        print(f"📄 {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdrm-lab", description="Pushdown reward machines for tabular RL")
    parser.add_argument("--config-file", type=Path, default=None, help="system settings (default config/pdrm_lab.yaml)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a .pdrm or .cra file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("train", help="run every agent and seed of an experiment")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a stored policy")
    p.add_argument("config")
    p.add_argument("--agent", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--episodes", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-topk", help="bounded value iteration and k-stack check")
    p.add_argument("config")
    p.add_argument("--k", type=int, nargs="+", default=[1])
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--stack-cap", type=int, default=None)
    p.add_argument("--export", default=None, help="write the enumerated transitions as TSV")
    p.add_argument("--strict", action="store_true", help="exit 2 unless every k is sufficient")
    p.set_defaults(func=cmd_check_topk)

    p = sub.add_parser("translate-cra", help="translate a 1-counter CRA into a pdRM")
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_translate_cra)

    p = sub.add_parser("check-equiv", help="compare reward traces of a CRA and a pdRM on random words")
    p.add_argument("cra")
    p.add_argument("pdrm", nargs="?", default=None, help="defaults to the translation of the CRA")
    p.add_argument("--words", type=int, default=None)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_check_equiv)

    p = sub.add_parser("count", help="stack-string counts, measured blowup or counter growth")
    p.add_argument("--gamma", type=int, default=2, help="stack alphabet size for closed-form counts")
    p.add_argument("--k", type=int, nargs="+", default=None)
    p.add_argument("--full", type=int, nargs=3, metavar=("N", "M", "E"), default=None,
                   help="closed-form bound on full-stack keys: horizon N, push length M, silent steps E")
    p.add_argument("--config", default=None, help="experiment whose environment and pdRM are measured")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--path", default=None, help="moves such as 'rrdd' for the counter-growth comparison")
    p.add_argument("--reachable", action="store_true", help="also count reachable stacks per path length")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("plot-data", help="write figure TSV and manifest from aggregate curves")
    p.add_argument("output_dir")
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the pdrm-lab command line."""
    args = build_parser().parse_args(argv)
    config = load_config(args.config_file)
    logging.basicConfig(level=getattr(logging, str(config.logging.get("level", "INFO")).upper(), logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s')
    try:
        return args.func(args, config)
    except HANDLED_ERRORS as exc:
        print(f"❌ {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
