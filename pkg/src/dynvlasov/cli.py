"""Command-line interface.

Subcommands: run (single path), converge (coupled-path convergence study),
timing (adaptive vs non-adaptive wall clock), mc (Monte Carlo averages).
Every subcommand takes --config plus --set key=value overrides; --out names
a directory for artifacts; --threads bounds worker parallelism over samples.

Exit codes: 0 success, 2 configuration error, 3 numerical abort (the failing
step index goes to standard error).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .harness import (DEFAULT_NODE_BUDGET, run_convergence_study,
                      run_monte_carlo, run_timing_study)
from .io import (FMT, ConfigError, apply_overrides, config_hash,
                 parse_config, write_snapshot, write_timeseries)
from .noise import BrownianIncrements, sample_path
from .solver import NumericalAbort, run


def _fmt(x: float) -> str:
    return FMT % (x,)


def _load(args) -> "SimulationConfig":
    text = Path(args.config).read_text()
    if args.set:
        text = apply_overrides(text, args.set)
    return parse_config(text)


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(args) -> int:
    cfg = _load(args)
    if cfg.N > 0:
        inc = sample_path(cfg.K, cfg.N, cfg.tau, cfg.seed)
    else:
        inc = BrownianIncrements(cfg.K, 0, 1.0, np.zeros((cfg.K, 0)), cfg.seed)
    result = run(cfg, inc)
    last = result.records[-1]
    first = result.records[0]
    print(f"run: cfg={config_hash(cfg)[:12]} seed={cfg.seed} "
          f"steps={cfg.N} grid=({result.final.grid.nx}x{result.final.grid.nv})")
    print(f"  mass drift {abs(last.mass - first.mass):.3e}  "
          f"L2 drift {abs(last.l2 - first.l2):.3e}  "
          f"final U {last.U:g}  growth events {len(result.growth_log)}  "
          f"wall {result.elapsed:.2f}s")
    out = _out_dir(args)
    if out is not None:
        write_timeseries(result, out / "timeseries.csv")
        for i, (t, field) in enumerate(result.snapshots):
            write_snapshot(field, t, out / f"snapshot_{i:03d}.txt")
        print(f"  wrote {out / 'timeseries.csv'} and "
              f"{len(result.snapshots)} snapshot(s)")
    return 0


def _cmd_converge(args) -> int:
    cfg = _load(args)
    samples = args.samples if args.samples is not None else cfg.samples
    table = run_convergence_study(cfg, levels=args.levels, samples=samples,
                                  node_budget=args.node_budget,
                                  threads=args.threads)
    print(f"converge: cfg={config_hash(cfg)[:12]} integrator="
          f"{cfg.integrator.value} levels={args.levels} samples={samples}")
    print("  level      tau            h        error      order")
    for row in table.rows:
        print(f"  {row.level:5d}  {row.tau:11.5g}  {row.h:11.5g}  "
              f"{row.error:.3e}  {row.order:8.3f}")
    print(f"  fitted order {table.fitted_order:.3f}")
    out = _out_dir(args)
    if out is not None:
        path = out / "convergence.csv"
        lines = [f"# vlasov-convergence v1 cfg={config_hash(cfg)} "
                 f"seed={cfg.seed} samples={samples} "
                 f"fitted_order={_fmt(table.fitted_order)} "
                 f"path={table.path_checksum}",
                 "level,tau,h,error,order"]
        lines += [",".join([str(r.level), _fmt(r.tau), _fmt(r.h),
                            _fmt(r.error), _fmt(r.order)])
                  for r in table.rows]
        path.write_text("\n".join(lines) + "\n")
        print(f"  wrote {path}")
    return 0


def _cmd_timing(args) -> int:
    cfg = _load(args)
    n_values = ([int(s) for s in args.n_values.split(",")]
                if args.n_values else [cfg.N])
    cfgs = [replace(cfg, N=n) for n in n_values]
    rows = run_timing_study(cfgs, repetitions=args.repetitions)
    print(f"timing: cfg={config_hash(cfg)[:12]} repetitions={args.repetitions}")
    print("      T/N    non-adaptive     adaptive    ratio")
    for r in rows:
        print(f"  {r.T:g}/{r.N:<6d} {r.nonadaptive_seconds:10.3f}s  "
              f"{r.adaptive_seconds:10.3f}s  {r.ratio:7.2f}")
    out = _out_dir(args)
    if out is not None:
        path = out / "timing.csv"
        lines = [f"# vlasov-timing v1 cfg={config_hash(cfg)} seed={cfg.seed}",
                 "T,N,adaptive_seconds,nonadaptive_seconds,ratio"]
        lines += [",".join([_fmt(r.T), str(r.N), _fmt(r.adaptive_seconds),
                            _fmt(r.nonadaptive_seconds), _fmt(r.ratio)])
                  for r in rows]
        path.write_text("\n".join(lines) + "\n")
        print(f"  wrote {path}")
    return 0


def _cmd_mc(args) -> int:
    cfg = _load(args)
    samples = args.samples if args.samples is not None else cfg.samples
    mc = run_monte_carlo(cfg, samples=samples, threads=args.threads)
    print(f"mc: cfg={config_hash(cfg)[:12]} samples={samples}")
    for name, coeffs in sorted(mc.reference.items()):
        fitted = mc.fits.get(name)
        print(f"  {name}: reference coefficients "
              f"({', '.join(_fmt(c) for c in coeffs)}); fitted "
              f"({', '.join(_fmt(c) for c in fitted)})")
    out = _out_dir(args)
    if out is not None:
        path = out / "mc_curves.csv"
        lines = [f"# vlasov-timeseries v1 cfg={config_hash(cfg)} seed={cfg.seed}"]
        if mc.reference:
            parts = [f"{k}=" + ",".join(_fmt(c) for c in v)
                     for k, v in sorted(mc.reference.items())]
            lines.append("# reference " + " ".join(parts))
        names = sorted(mc.mean)
        header = ["t"] + [f"{n}_mean" for n in names] + [f"{n}_se" for n in names]
        lines.append(",".join(header))
        for i, t in enumerate(mc.t):
            row = [_fmt(t)] + [_fmt(mc.mean[n][i]) for n in names] \
                + [_fmt(mc.se[n][i]) for n in names]
            lines.append(",".join(row))
        path.write_text("\n".join(lines) + "\n")
        print(f"  wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynvlasov",
        description="dynamic-domain semi-Lagrangian kinetic solver")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config key (dotted for sections)")
        p.add_argument("--out", default=None, help="artifact directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for sample parallelism")

    p = sub.add_parser("run", help="single-path run")
    common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("converge", help="coupled-path convergence study")
    common(p)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--samples", type=int, default=None,
                   help="defaults to the config's samples value")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(fn=_cmd_converge)

    p = sub.add_parser("timing", help="adaptive vs non-adaptive wall clock")
    common(p)
    p.add_argument("--n-values", default=None,
                   help="comma-separated step counts, e.g. 300,500")
    p.add_argument("--repetitions", type=int, default=3)
    p.set_defaults(fn=_cmd_timing)

    p = sub.add_parser("mc", help="Monte Carlo diagnostic averages")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(fn=_cmd_mc)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
