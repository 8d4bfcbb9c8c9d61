"""Curve plots from time-series CSVs and log-log convergence plots.

Time-series mode overlays the selected columns across input files (legend
from file stems) and can draw the closed-form reference curve whose
polynomial coefficients ride in the CSV metadata.  A convergence table
(`# vlasov-convergence` header) switches to a log-log error-vs-tau plot with
the least-squares slope recomputed and annotated.

Usage:
    plot-timeseries CSV [CSV ...] --columns l2 --out fig.png
    plot-timeseries CSV --columns momentum_mean --reference momentum --out f.png
    plot-timeseries convergence.csv --out order.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .parsing import (VizError, is_convergence_table, read_convergence,  # noqa: E402
                      read_timeseries)


def plot_convergence(path, out_path) -> float:
    """Log-log error vs tau; returns the recomputed least-squares slope."""
    _, data, columns = read_convergence(path)
    tau = data[:, columns.index("tau")]
    err = data[:, columns.index("error")]
    slope = float(np.polynomial.polynomial.polyfit(
        np.log(tau), np.log(err), 1)[1])
    fig, ax = plt.subplots(figsize=(4.8, 3.6), constrained_layout=True)
    ax.loglog(tau, err, "o-", label=Path(path).stem)
    anchor = err[-1] * (tau / tau[-1])
    ax.loglog(tau, anchor, "k--", linewidth=0.9, label="order 1")
    ax.set_xlabel("tau")
    ax.set_ylabel("error")
    ax.set_title(f"fitted order {slope:.2f}")
    ax.legend()
    fig.savefig(out_path, dpi=130, metadata={"Software": None})
    plt.close(fig)
    return slope


def plot_timeseries(csv_paths, columns, out_path, reference=None) -> None:
    if len(csv_paths) == 1 and is_convergence_table(csv_paths[0]):
        slope = plot_convergence(csv_paths[0], out_path)
        print(f"log-log slope: {slope:.3f}")
        return
    if not columns:
        raise VizError("no columns requested; use --columns")
    fig, ax = plt.subplots(figsize=(5.4, 3.6), constrained_layout=True)
    ref_meta = None
    for path in csv_paths:
        meta, data, names = read_timeseries(path)
        for col in columns:
            if col not in names:
                raise VizError(f"{path}: no column {col!r}; available: "
                               + ", ".join(names))
            label = f"{Path(path).stem}:{col}" if len(csv_paths) > 1 \
                or len(columns) > 1 else Path(path).stem
            ax.plot(data[:, names.index("t")], data[:, names.index(col)],
                    label=label)
        if reference and "reference" in meta and reference in meta["reference"]:
            ref_meta = (meta["reference"][reference],
                        data[:, names.index("t")])
    if reference:
        if ref_meta is None:
            raise VizError(f"no reference coefficients for {reference!r} "
                           "in the CSV metadata")
        coeffs, t = ref_meta
        ax.plot(t, np.polynomial.polynomial.polyval(t, np.asarray(coeffs)),
                "k--", linewidth=1.0, label=f"{reference} law")
    ax.set_xlabel("t")
    ax.legend()
    fig.savefig(out_path, dpi=130, metadata={"Software": None})
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-timeseries",
        description="diagnostic curves or log-log convergence plots")
    parser.add_argument("csvs", nargs="+", help="CSV file paths")
    parser.add_argument("--columns", default="",
                        help="comma-separated column names to plot")
    parser.add_argument("--reference", default=None,
                        help="draw this closed-form law from CSV metadata "
                             "(momentum | kinetic | total)")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    try:
        plot_timeseries(args.csvs, columns, args.out, reference=args.reference)
    except (VizError, OSError) as exc:
        print(f"plot-timeseries: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
