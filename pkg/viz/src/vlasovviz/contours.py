"""Phase-space contour panels from snapshot files.

One panel per snapshot on a common color scale, x in [0, L] and v in
[-U_max, U_max] with U_max the largest half-width among the inputs.

Usage:  plot-contours SNAPSHOT [SNAPSHOT ...] --out figure.png
"""

from __future__ import annotations

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .parsing import VizError, read_snapshot  # noqa: E402


def plot_contours(snapshot_paths, out_path, levels: int = 40) -> None:
    snaps = [read_snapshot(p) for p in snapshot_paths]
    first = snaps[0]
    for p, s in zip(snapshot_paths[1:], snaps[1:]):
        if (s.L, s.dx, s.dv) != (first.L, first.dx, first.dv):
            raise VizError(f"{p}: grid (L, dx, dv) differs from "
                           f"{snapshot_paths[0]}")
    vmax = max(s.values.max() for s in snaps)
    vmin = min(0.0, min(s.values.min() for s in snaps))
    u_max = max(s.U for s in snaps)

    n = len(snaps)
    ncols = min(3, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(4.2 * ncols, 3.2 * nrows),
                             constrained_layout=True)
    mesh = None
    for i, snap in enumerate(snaps):
        ax = axes[i // ncols][i % ncols]
        mesh = ax.pcolormesh(snap.x_edges, snap.v_edges, snap.values.T,
                             vmin=vmin, vmax=vmax, cmap="viridis",
                             rasterized=True)
        ax.set_xlim(0.0, snap.L)
        ax.set_ylim(-u_max, u_max)
        ax.set_title(f"t = {snap.t:g}")
        ax.set_xlabel("x")
        if i % ncols == 0:
            ax.set_ylabel("v")
    for i in range(n, nrows * ncols):
        axes[i // ncols][i % ncols].set_axis_off()
    fig.colorbar(mesh, ax=[a for row in axes for a in row], shrink=0.85)
    fig.savefig(out_path, dpi=130, metadata={"Software": None})
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-contours",
        description="phase-space contour panels from snapshot files")
    parser.add_argument("snapshots", nargs="+", help="snapshot file paths")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        plot_contours(args.snapshots, args.out)
    except (VizError, OSError) as exc:
        print(f"plot-contours: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
