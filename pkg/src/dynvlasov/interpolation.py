"""Reconstruction operators on a phase-space grid.

Multilinear (tensor-product first-order Lagrange) interpolation with periodic
wrap in position and hard zero extension outside the velocity domain, plus an
optional tensor cubic-spline reconstruction.  Zero extension is part of the
interpolation contract, so solver code needs no boundary special cases.

The multilinear weights are convex products of 1D hat weights, evaluated in a
form whose floating-point result is a sum of nonnegative products whenever
the corner values are nonnegative; positivity of reconstructed densities is
therefore exact, not approximate.  The cubic spline does not preserve
positivity.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import NdBSpline, make_interp_spline

from .grid import DensityField

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

#: Barycentric coordinates within this distance of a node snap onto it, so a
#: probe at (floating-point images of) a node returns the nodal value exactly.
SNAP_TOL = 1e-9


def _cells_1d(s: np.ndarray, n_nodes: int):
    """Cell index and offset for coordinates s measured in units of cells.

    Snaps near-integer coordinates, then clamps into the valid cell range
    [0, n_nodes - 2] so that s = n_nodes - 1 (the upper domain edge) lands in
    the last cell with offset 1.  Out-of-domain coordinates yield clamped
    indices and meaningless offsets; callers mask those lanes themselves.
    """
    r = np.rint(s)
    snap = np.abs(s - r) < SNAP_TOL
    s = np.where(snap, r, s)
    idx = np.floor(s).astype(np.intp)
    np.clip(idx, 0, n_nodes - 2, out=idx)
    t = s - idx
    return idx, t


def _interp_linear_numpy(vals: np.ndarray, x: np.ndarray, v: np.ndarray,
                         L: float, dx: float, dv: float, U: float,
                         nx: int, nv: int) -> np.ndarray:
    sx = np.mod(x, L) * (1.0 / dx)
    # np.mod can round up to exactly L for tiny negative x, so allow cell
    # index nx - 1 with offset 1, whose right corner wraps to node 0.
    jx0, tx = _cells_1d(sx, nx + 1)
    jx1 = jx0 + 1
    jx1 = np.where(jx1 == nx, 0, jx1)

    inside = np.abs(v) <= U
    sv = (v + U) * (1.0 / dv)
    kv, tv = _cells_1d(sv, nv)

    f00 = vals[jx0, kv]
    f10 = vals[jx1, kv]
    f01 = vals[jx0, kv + 1]
    f11 = vals[jx1, kv + 1]
    wx1 = tx
    wx0 = 1.0 - tx
    out = (1.0 - tv) * (wx0 * f00 + wx1 * f10) + tv * (wx0 * f01 + wx1 * f11)
    return np.where(inside, out, 0.0)


if numba is not None:

    # The jitted path mirrors the numpy path operation for operation so the
    # two give bit-identical results.

    @numba.njit(cache=True)
    def _interp_point(vals, xw, vi, inv_dx, inv_dv, U, nx,
                      nv):  # pragma: no cover - jitted
        """Bilinear value at one point; xw must already lie in [0, L]."""
        if abs(vi) > U:
            return 0.0
        sx = xw * inv_dx
        rx = np.rint(sx)
        if abs(sx - rx) < SNAP_TOL:
            sx = rx
        jx0 = int(np.floor(sx))
        if jx0 < 0:
            jx0 = 0
        elif jx0 > nx - 1:
            jx0 = nx - 1
        tx = sx - jx0
        jx1 = jx0 + 1
        if jx1 == nx:
            jx1 = 0
        sv = (vi + U) * inv_dv
        rv = np.rint(sv)
        if abs(sv - rv) < SNAP_TOL:
            sv = rv
        kv = int(np.floor(sv))
        if kv < 0:
            kv = 0
        elif kv > nv - 2:
            kv = nv - 2
        tv = sv - kv
        wx1 = tx
        wx0 = 1.0 - tx
        return ((1.0 - tv) * (wx0 * vals[jx0, kv] + wx1 * vals[jx1, kv])
                + tv * (wx0 * vals[jx0, kv + 1] + wx1 * vals[jx1, kv + 1]))

    @numba.njit(cache=True)
    def _interp_linear_kernel(vals, x, v, L, dx, dv, U, nx, nv,
                              out):  # pragma: no cover - jitted
        inv_dx = 1.0 / dx
        inv_dv = 1.0 / dv
        for i in range(x.size):
            xm = x[i] % L
            out[i] = _interp_point(vals, xm, v[i], inv_dx, inv_dv, U, nx, nv)
        return out


def interp_linear_many(field: DensityField, x: np.ndarray,
                       v: np.ndarray) -> np.ndarray:
    """Vectorized multilinear interpolation at points (x, v).

    x is wrapped modulo L; points with |v| > U return exactly 0.
    """
    g = field.grid
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if numba is not None:
        xb, vb = np.broadcast_arrays(x, v)
        out = np.empty(xb.shape)
        _interp_linear_kernel(field.values, np.ascontiguousarray(xb).ravel(),
                              np.ascontiguousarray(vb).ravel(), g.L, g.dx,
                              g.dv, g.U, g.nx, g.nv, out.reshape(-1))
        return out
    return _interp_linear_numpy(field.values, x, v, g.L, g.dx, g.dv, g.U,
                                g.nx, g.nv)


def interp_linear(field: DensityField, point: tuple[float, float]) -> float:
    """Multilinear interpolation at a single point (x, v)."""
    x, v = point
    return float(interp_linear_many(field, np.array([x]), np.array([v]))[0])


class SplineInterpolant:
    """Tensor-product cubic spline of a density field.

    Periodic end conditions in x, natural (zero second derivative) end
    conditions in v, zero outside |v| > U.  Coefficients are built once per
    field and immutable afterwards, so evaluation is parallel-safe.
    """

    def __init__(self, field: DensityField):
        g = field.grid
        if g.nx < 4 or g.nv < 4:
            raise ValueError(
                f"cubic spline needs >= 4 nodes per axis, grid has "
                f"({g.nx}, {g.nv})")
        x_ext = np.arange(g.nx + 1) * g.dx
        f_ext = np.concatenate([field.values, field.values[:1]], axis=0)
        spl_x = make_interp_spline(x_ext, f_ext, k=3, axis=0,
                                   bc_type="periodic")
        # BSpline stores coefficients with the spline axis first whatever
        # `axis` says, so the v pass leaves them (v-coef, x-coef).
        spl_v = make_interp_spline(g.v_nodes, spl_x.c, k=3, axis=1,
                                   bc_type="natural")
        coef = np.ascontiguousarray(spl_v.c.transpose(1, 0))
        self._nd = NdBSpline((spl_x.t, spl_v.t), coef, k=3)
        self.grid = g

    def __call__(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        g = self.grid
        x = np.asarray(x, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        xw = np.mod(x, g.L)
        inside = np.abs(v) <= g.U
        vq = np.clip(v, -g.U, g.U)
        pts = np.stack([np.ravel(xw), np.ravel(vq)], axis=-1)
        out = self._nd(pts).reshape(np.shape(x))
        return np.where(inside, out, 0.0)


def interp_spline(field: DensityField, point: tuple[float, float]) -> float:
    """Cubic-spline interpolation at a single point.

    Builds the interpolant on every call; for repeated evaluation construct a
    :class:`SplineInterpolant` once.
    """
    x, v = point
    return float(SplineInterpolant(field)(np.array([x]), np.array([v]))[0])
