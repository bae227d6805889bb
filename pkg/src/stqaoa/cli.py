"""Command line: ``stqaoa <subcommand> [options]``.

Subcommands: gen-ensemble, run, gw-sweep, vst-check, plot, audit.
Worker count comes from ``--workers`` or the STQAOA_WORKERS variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from .classical_solvers import GwConfig
from .experiments import (
    ALGORITHMS,
    AlgoSpec,
    EnsembleConfig,
    audit,
    canonical_sub,
    generate_ensemble,
    gw_repetition_sweep,
    load_records,
    rows_csv,
    run_ensemble,
    summarize,
    vst_check,
    _write_atomic,
    _dumps,
)
from .optimizer import OptimizeConfig
from .signed_graph import format_graph

log = logging.getLogger("stqaoa")


def parse_int_list(text: str) -> list[int]:
    """'1-4' -> [1, 2, 3, 4]; '1,2,8' -> [1, 2, 8]."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def _sub_type(text: str) -> str:
    try:
        return canonical_sub(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _dataclass_update(obj, values: dict, what: str):
    names = {f.name for f in fields(obj)}
    unknown = set(values) - names
    if unknown:
        raise SystemExit(f"unknown {what} options in config file: {sorted(unknown)}")
    return replace(obj, **values)


def _ensemble_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=16, help="vertices per graph")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--count", type=int, default=None, help="graphs (default 50, 250 with --paper-scale)")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=-1, help="edge sign (-1 is plain MAXCUT)")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", type=Path, required=True, help="output directory")


def _run_args(p: argparse.ArgumentParser) -> None:
    _ensemble_args(p)
    p.add_argument("--starts", type=int, default=None, help="random optimizer starts (default 20, 100 with --paper-scale)")
    p.add_argument("--paper-scale", action="store_true", help="250 graphs x 100 starts")
    p.add_argument("--sampled", action="store_true", help="also report the best cut among sampled bitstrings")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--no-warm-start", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--config", type=Path, help='JSON file with "optimizer" and/or "gw" sections')
    p.add_argument("--max-iter", type=int, help="optimizer iterations per start")
    p.add_argument("--tol", type=float, help="optimizer stopping gain")
    p.add_argument("--gw-rank", type=int)
    p.add_argument("--gw-max-iter", type=int)
    p.add_argument("--gw-grad-tol", type=float)
    p.add_argument("--gw-rounding", type=int, help="hyperplane roundings per GW run")
    p.add_argument("--no-local-search", action="store_true")


def _configs(args) -> tuple[OptimizeConfig, GwConfig]:
    opt, gw = OptimizeConfig(), GwConfig()
    if args.config:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"cannot read config {args.config}: {exc}")
        opt = _dataclass_update(opt, data.get("optimizer", {}), "optimizer")
        gw = _dataclass_update(gw, data.get("gw", {}), "gw")
    opt_over = {"max_iter": args.max_iter, "tol": args.tol}
    gw_over = {"rank": args.gw_rank, "max_iter": args.gw_max_iter, "grad_tol": args.gw_grad_tol,
               "rounding_rounds": args.gw_rounding}
    opt = replace(opt, **{k: v for k, v in opt_over.items() if v is not None})
    gw = replace(gw, **{k: v for k, v in gw_over.items() if v is not None})
    if args.no_local_search:
        gw = replace(gw, local_search=False)
    return opt, gw


def _ensemble_config(args, algos) -> EnsembleConfig:
    opt, gw = _configs(args)
    kw = dict(n=args.n, degree=args.degree, sign=args.sign, seed=args.seed, algos=tuple(algos),
              warm_start=not args.no_warm_start, sampled=args.sampled, shots=args.shots,
              optimizer=opt, gw=gw)
    if args.count is not None:
        kw["count"] = args.count
    if args.starts is not None:
        kw["starts"] = args.starts
    return EnsembleConfig.paper_scale(**kw) if args.paper_scale else EnsembleConfig(**kw)


def _print_rows(rows: list[dict]) -> None:
    sys.stdout.write(rows_csv(rows) if rows and "algorithm" in rows[0] else "")


def cmd_gen_ensemble(args) -> int:
    count = args.count if args.count is not None else 50
    graphs = generate_ensemble(args.n, args.degree, count, args.seed, args.sign)
    gdir = args.out / "graphs"
    gdir.mkdir(parents=True, exist_ok=True)
    for i, g in enumerate(graphs):
        _write_atomic(gdir / f"graph_{i:04d}.txt", format_graph(g))
    print(f"wrote {count} graphs to {gdir}")
    return 0


def cmd_run(args) -> int:
    algos = [AlgoSpec(a, r, s) for a in args.algo for s in args.sub for r in args.rounds]
    algos = list(dict.fromkeys(algos))
    cfg = _ensemble_config(args, algos)
    records, rows = run_ensemble(cfg, args.out, args.workers)
    _print_rows(rows)
    failed = sum(bool(r["errors"]) for r in records)
    if failed:
        log.warning("%d graphs recorded errors", failed)
    return 0


def cmd_gw_sweep(args) -> int:
    cfg = _ensemble_config(args, ())
    _, table = gw_repetition_sweep(cfg, args.k, args.rounds, args.out, args.workers)
    print("k,count,mean_B,stderr_B,min_B")
    for row in table:
        print(f"{row['k']},{row['count']},{row['mean_B']!r},{row['stderr_B']!r},{row['min_B']!r}")
    return 0


def cmd_vst_check(args) -> int:
    rows = vst_check(args.draws, args.max_n, args.seed)
    worst = max(rows, key=lambda r: r["error"])
    print(f"draws={len(rows)} max_error={worst['error']:.3e} (draw {worst['draw']}, n={worst['n']})")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        _write_atomic(args.out / "vst_check.json", _dumps(rows))
    return 0 if worst["error"] <= args.tol else 1


def _all_records(out: Path) -> list[dict]:
    records = load_records(out)
    if (out / "gw_sweep" / "records").is_dir():
        records += load_records(out / "gw_sweep")
    return records


def cmd_plot(args) -> int:
    from .plots import emit_plots

    records = _all_records(args.out)
    try:
        paths = emit_plots(records, args.out / "plots")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


def cmd_audit(args) -> int:
    problems = []
    for sub in (args.out, args.out / "gw_sweep"):
        if not (sub / "records").is_dir():
            continue
        records = load_records(sub)
        found = audit(records)
        summary = sub / "summary.csv"
        if summary.exists() and summary.read_text() != rows_csv(summarize(records)):
            found.append("summary.csv does not match the records")
        problems += [f"{sub}: {p}" for p in found]
        print(f"{sub}: {len(records)} records, {len(found)} problems")
    for p in problems:
        print(p)
    return 1 if problems else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stqaoa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-ensemble", help="write a seeded random regular graph ensemble")
    _ensemble_args(p)
    p.set_defaults(func=cmd_gen_ensemble)

    p = sub.add_parser("run", help="run algorithms over an ensemble")
    _run_args(p)
    p.add_argument("--algo", action="append", choices=ALGORITHMS, help="repeatable (default st-qaoa)")
    p.add_argument("--sub", action="append", type=_sub_type, help="rst, gw or gw:k; repeatable (default rst)")
    p.add_argument("--rounds", type=parse_int_list, default=[1], help="p or r values, e.g. 1-4 or 1,2")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gw-sweep", help="ST-QAOA against GW best-of-k for several k")
    _run_args(p)
    p.add_argument("--k", type=parse_int_list, default=[1, 4, 16])
    p.add_argument("--rounds", type=int, default=1)
    p.set_defaults(func=cmd_gw_sweep)

    p = sub.add_parser("vst-check", help="closed-form VST objective vs statevector")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_vst_check)

    p = sub.add_parser("plot", help="render panels from records in --out")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("audit", help="recheck records and summaries in --out")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "algo", None) is None and args.command == "run":
        args.algo = ["st-qaoa"]
    if getattr(args, "sub", None) is None and args.command == "run":
        args.sub = ["rst"]
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
