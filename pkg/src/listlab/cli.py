"""Command-line interface: run experiments, summarize result files,
render report figures.

Exit codes: 0 success, 2 audit violation, 3 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .core import LabelingError, ParseError
from .harness import (
    DEFAULT_AUDITS,
    ExperimentConfig,
    emit_csv,
    emit_json,
    emit_summary_csv,
    read_csv,
    run_config,
    summarize_rows,
)
from .oracle import AuditFailure, independence_trial
from .workloads import make_trace

EXIT_OK = 0
EXIT_AUDIT = 2
EXIT_CONFIG = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="listlab",
        description="Sorted-array labeling experiments: run, summarize, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run trials and emit one CSV row per trial")
    run_p.add_argument("--algo", default="classic",
                       help="structure expression: a name or layer(f,r[,eps=..][,beta=..]) "
                            "(default: classic)")
    run_p.add_argument("--workload", default="uniform",
                       help="workload spec: name[:k=v,..], names uniform|mixed|hammer|adversarial, "
                            "knobs p (delete probability), r0 (hammer rank) (default: uniform)")
    run_p.add_argument("--n", type=_int_list, default=[1024],
                       help="capacities, comma separated (default: 1024)")
    run_p.add_argument("--T", type=int, default=None,
                       help="operations per trial (default: n)")
    run_p.add_argument("--seed", type=_int_list, default=[0],
                       help="seeds, comma separated (default: 0)")
    run_p.add_argument("--reps", type=int, default=1,
                       help="extra consecutive seeds per listed seed (default: 1)")
    run_p.add_argument("--eps", type=float, default=0.25,
                       help="layer slack fraction (default: 0.25)")
    run_p.add_argument("--beta", type=float, default=1.0,
                       help="rebuild budget multiplier (default: 1.0)")
    run_p.add_argument("--out", default=None,
                       help="output CSV path (default: stdout)")
    run_p.add_argument("--json", default=None,
                       help="also write rows as JSON to this path")
    run_p.add_argument("--audits", default="all",
                       help="inline audit toggles: all, none, or a comma list from "
                            "order,deadweight,span,fast (default: all)")
    run_p.add_argument("--no-timing", action="store_true",
                       help="omit the wall_ms column for byte-stable output")
    run_p.add_argument("--audit", choices=["independence"], default=None,
                       help="run a named audit instead of emitting rows")
    run_p.add_argument("--pairs", type=int, default=5,
                       help="seed pairs per trace for --audit independence (default: 5)")
    run_p.add_argument("--traces", type=int, default=100,
                       help="trace count for --audit independence (default: 100)")

    sum_p = sub.add_parser("summarize", help="aggregate a result CSV over seeds")
    sum_p.add_argument("input", help="result CSV from `run`")
    sum_p.add_argument("--out", default=None, help="summary CSV path (default: stdout)")

    rep_p = sub.add_parser("report", help="render figures for a result CSV")
    rep_p.add_argument("input", help="result CSV from `run`")
    rep_p.add_argument("--outdir", default=None,
                       help="directory for the image files (default: alongside the CSV)")
    return parser


def _parse_audits(text: str) -> frozenset[str]:
    if text == "all":
        return DEFAULT_AUDITS
    if text == "none":
        return frozenset()
    toggles = frozenset(part.strip() for part in text.split(",") if part.strip())
    unknown = toggles - DEFAULT_AUDITS
    if unknown:
        raise ParseError(f"unknown audit toggles: {sorted(unknown)}")
    return toggles


def _cmd_run(args: argparse.Namespace) -> int:
    seeds = []
    for s in args.seed:
        seeds.extend(range(s, s + max(1, args.reps)))
    seeds = sorted(set(seeds))
    if args.audit == "independence":
        return _cmd_independence(args, seeds)
    cfg = ExperimentConfig(
        algo=args.algo, workload=args.workload, n_values=args.n,
        T=args.T, seeds=seeds, eps=args.eps, beta=args.beta,
        out=args.out, audits=_parse_audits(args.audits),
        timing=not args.no_timing,
    )
    rows = run_config(cfg)
    if args.out:
        emit_csv(rows, args.out, timing=cfg.timing)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        emit_csv(rows, sys.stdout, timing=cfg.timing)
    if args.json:
        emit_json(rows, args.json, timing=cfg.timing)
    return EXIT_OK


def _cmd_independence(args: argparse.Namespace, seeds: list[int]) -> int:
    algo = args.algo
    if not algo.startswith("layer"):
        algo = "layer(classic,bounded)"
    n = args.n[0]
    T = args.T if args.T is not None else n
    base = seeds[0] if seeds else 0
    trials = 0
    for trace_idx in range(args.traces):
        trace = make_trace(args.workload, n, T, base + trace_idx)
        for pair in range(args.pairs):
            step = independence_trial(
                trace, algo, seed=base + trace_idx,
                r_seed_a=1_000 + 2 * pair, r_seed_b=1_001 + 2 * pair,
                eps=args.eps, beta=args.beta)
            trials += 1
            if step is not None:
                print(f"independence: trace {trace_idx} pair {pair} "
                      f"diverges at shell op {step}")
                return EXIT_AUDIT
    print(f"all R-traces identical ({trials} twin runs, "
          f"{args.traces} traces x {args.pairs} pairs)")
    return EXIT_OK


def _cmd_summarize(args: argparse.Namespace) -> int:
    rows = read_csv(args.input)
    summary = summarize_rows(rows)
    if args.out:
        emit_summary_csv(summary, args.out)
        print(f"wrote {len(summary)} groups to {args.out}")
    else:
        emit_summary_csv(summary, sys.stdout)
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    from .figures import render_report

    paths = render_report(args.input, args.outdir)
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
        return _cmd_report(args)
    except AuditFailure as exc:
        print(f"audit violation: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except AssertionError as exc:
        print(f"audit violation: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except (ParseError, LabelingError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
