"""Parsers for the solver's text artifacts.

Snapshot format:
    # vlasov-snapshot v1 L=<f> dx=<f> dv=<f> U=<f> t=<f>
    j k value                (position node index j outer; k signed)

Time-series CSV:
    # vlasov-timeseries v1 cfg=<hash> seed=<int>
    # reference name=<c0>,<c1>[,...] ...        (optional)
    t,col,...
    rows

Convergence table:
    # vlasov-convergence v1 ...
    level,tau,h,error,order
    rows
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class VizError(ValueError):
    """Malformed input artifact."""


_SNAPSHOT_HEADER = re.compile(
    r"# vlasov-snapshot v1 L=(?P<L>\S+) dx=(?P<dx>\S+) dv=(?P<dv>\S+) "
    r"U=(?P<U>\S+) t=(?P<t>\S+)\s*$")


@dataclass
class Snapshot:
    L: float
    dx: float
    dv: float
    U: float
    t: float
    values: np.ndarray  # (nx, nv)

    @property
    def x_edges(self) -> np.ndarray:
        nx = self.values.shape[0]
        return (np.arange(nx + 1) - 0.5) * self.dx

    @property
    def v_edges(self) -> np.ndarray:
        nv = self.values.shape[1]
        half = (nv - 1) // 2
        return (np.arange(nv + 1) - half - 0.5) * self.dv


def read_snapshot(path) -> Snapshot:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise VizError(f"{path}: line 1: empty snapshot file")
    m = _SNAPSHOT_HEADER.match(lines[0])
    if m is None:
        raise VizError(f"{path}: line 1: malformed snapshot header")
    L, dx, dv, U, t = (float(m.group(g)) for g in ("L", "dx", "dv", "U", "t"))
    nx = int(round(L / dx))
    half = int(round(U / dv))
    nv = 2 * half + 1
    values = np.full((nx, nv), np.nan)
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise VizError(f"{path}: line {lineno}: expected 'j k value'")
        try:
            j, k, val = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise VizError(f"{path}: line {lineno}: unparseable node line") \
                from None
        if not (0 <= j < nx and -half <= k <= half):
            raise VizError(f"{path}: line {lineno}: node ({j}, {k}) outside "
                           "the declared grid")
        values[j, k + half] = val
    if np.isnan(values).any():
        raise VizError(f"{path}: missing node lines "
                       f"({int(np.isnan(values).sum())} of {nx * nv})")
    return Snapshot(L=L, dx=dx, dv=dv, U=U, t=t, values=values)


def read_timeseries(path) -> tuple[dict, np.ndarray, list[str]]:
    """(metadata, data rows, column names) of a time-series CSV."""
    meta: dict = {}
    columns: list[str] = []
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("reference"):
                ref = {}
                for part in body.split()[1:]:
                    name, _, coeffs = part.partition("=")
                    ref[name] = tuple(float(c) for c in coeffs.split(","))
                meta["reference"] = ref
            else:
                for part in body.split():
                    key, sep, val = part.partition("=")
                    if sep:
                        meta[key] = val
            continue
        if not columns:
            columns = [c.strip() for c in line.split(",")]
            continue
        try:
            rows.append([float(c) for c in line.split(",")])
        except ValueError:
            raise VizError(f"{path}: line {lineno}: unparseable row") from None
    if not columns:
        raise VizError(f"{path}: no header row found")
    if not rows:
        raise VizError(f"{path}: header-only CSV, nothing to plot")
    data = np.array(rows)
    if data.shape[1] != len(columns):
        raise VizError(f"{path}: rows have {data.shape[1]} fields, header "
                       f"names {len(columns)}")
    return meta, data, columns


def is_convergence_table(path) -> bool:
    with open(path) as fh:
        first = fh.readline()
    return first.startswith("# vlasov-convergence")


def read_convergence(path) -> tuple[dict, np.ndarray, list[str]]:
    meta, data, columns = read_timeseries(path)
    for needed in ("tau", "error"):
        if needed not in columns:
            raise VizError(f"{path}: convergence table lacks a {needed!r} "
                           f"column (has {', '.join(columns)})")
    return meta, data, columns
