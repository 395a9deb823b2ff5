"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 simulation divergence,
4 passivity-audit violation beyond tolerance.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import harness, metrics, passivity, trajlog
from .config import load_model, load_scenario
from .errors import AuditError, ConfigError, DivergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_AUDIT = 4


def _cmd_run(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for rep in range(args.repeat):
        scenario = load_scenario(args.scenario, variant_override=args.variant)
        scenario.seed += rep
        result = harness.execute(scenario)
        results.append(result)
        suffix = f"_r{rep}" if args.repeat > 1 else ""
        log_path = out_dir / f"{scenario.name}_{scenario.controller.variant}{suffix}.csv"
        result.log.to_csv(log_path)
        summary_path = log_path.with_suffix(".summary.txt")
        summary_path.write_text(harness.summary_text(result) + "\n")
        print(harness.summary_text(result))
        print(f"log written to {log_path}")
    if args.repeat > 1:
        pre = np.nanmean([r.metrics.nmae_pre for r in results], axis=0)
        post = np.nanmean([r.metrics.nmae_post for r in results], axis=0)
        print(f"\nmean over {args.repeat} repeats: NMAE pre {pre}, post {post}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    if not variants:
        raise ConfigError("--variants must name at least one variant")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = []
    for variant in variants:
        scenario = load_scenario(args.scenario, variant_override=variant)
        result = harness.execute(scenario)
        result.log.to_csv(out_dir / f"{scenario.name}_{variant}.csv")
        runs.append(result.metrics)
        print(f"{variant}: done ({result.wall_time:.1f} s wall)")
    csv_text, table_text = metrics.comparison_table(runs)
    (out_dir / "comparison.csv").write_text(csv_text)
    (out_dir / "comparison.txt").write_text(table_text + "\n")
    print()
    print(table_text)
    return EXIT_OK


def _cmd_audit(args) -> int:
    log = trajlog.from_csv(args.log)
    report = passivity.audit(log, tol_fraction=args.tol_fraction)
    print(report.text())
    return EXIT_OK if report.ok else EXIT_AUDIT


def _cmd_validate(args) -> int:
    model = load_model(args.model)
    print(f"model '{model.name}': {model.n} joints, all invariants satisfied")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compliantarm",
        description="Compliant-control simulation harness for redundant serial arms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario, write log CSV + summary")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--variant", default=None, help="override the controller variant")
    p_run.add_argument("--repeat", type=int, default=1, help="repeat count for mean metrics")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="run several variants and tabulate the metrics")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("--variants", required=True, help="comma-separated variant list")
    p_cmp.add_argument("--out", default=".", help="output directory")
    p_cmp.set_defaults(func=_cmd_compare)

    p_aud = sub.add_parser("audit", help="passivity audit of a trajectory log CSV")
    p_aud.add_argument("log")
    p_aud.add_argument("--tol-fraction", type=float, default=0.05)
    p_aud.set_defaults(func=_cmd_audit)

    p_val = sub.add_parser("validate", help="check a model file against all invariants")
    p_val.add_argument("model")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except AuditError as exc:
        print(f"audit error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
