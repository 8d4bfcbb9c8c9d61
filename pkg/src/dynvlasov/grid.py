"""Phase-space mesh, density storage, and the growing velocity-domain state.

The mesh is uniform on the torus [0, L) times a symmetric velocity interval
[-U, U].  Position nodes are j*dx for 0 <= j < nx (the node at x = L is
identified with the node at 0 and never stored); velocity nodes are k*dv for
-U/dv <= k <= U/dv.  The velocity half-width U only ever grows, in integer
multiples of dv, so nodal data of an old grid stays valid on any grown grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridAlignmentError(ValueError):
    """A length is not an integer multiple of the corresponding stepsize."""


#: Relative tolerance when checking that a length/stepsize ratio is integer.
ALIGN_RTOL = 1e-9


def aligned_count(total: float, step: float, what: str, minimum: int = 1) -> int:
    """Return round(total/step) after checking the ratio is an integer.

    Raises GridAlignmentError naming the offending ratio otherwise.
    """
    if step <= 0:
        raise GridAlignmentError(f"{what}: stepsize must be positive, got {step!r}")
    ratio = total / step
    count = int(round(ratio))
    if abs(ratio - count) > ALIGN_RTOL * max(1.0, abs(ratio)):
        raise GridAlignmentError(
            f"{what} = {ratio!r} is not an integer within tolerance {ALIGN_RTOL:g}"
        )
    if count < minimum:
        raise GridAlignmentError(f"{what} = {count} must be >= {minimum}")
    return count


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform rectangular mesh on [0, L) x [-U, U].

    nx = L/dx position nodes (periodic), nv = 2*U/dv + 1 velocity nodes.
    Construct via :func:`make_grid`, which validates grid alignment.
    """

    L: float
    dx: float
    dv: float
    U: float
    nx: int
    nv: int

    @property
    def half(self) -> int:
        """Number of velocity cells on each side of v = 0 (U/dv)."""
        return (self.nv - 1) // 2

    @property
    def x_nodes(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @property
    def v_nodes(self) -> np.ndarray:
        return (np.arange(self.nv) - self.half) * self.dv

    @property
    def n_nodes(self) -> int:
        return self.nx * self.nv


def make_grid(L: float, dx: float, dv: float, U: float) -> PhaseGrid:
    """Build an aligned phase-space grid; misaligned ratios are rejected.

    The stored half-width is normalized to an exact integer multiple of dv so
    that node coordinates and half-width arithmetic stay mutually consistent.
    """
    nx = aligned_count(L, dx, "L/dx")
    m = aligned_count(U, dv, "U/dv")
    return PhaseGrid(L=float(L), dx=float(dx), dv=float(dv), U=m * float(dv),
                     nx=nx, nv=2 * m + 1)


@dataclass
class DensityField:
    """Nodal values of the numerical density on a PhaseGrid.

    values has shape (nx, nv) with the position index outermost.  Fields are
    treated as immutable once built: a time step reads one field and writes a
    fresh one, so concurrent readers never race a writer.
    """

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.nx, self.grid.nv):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.nv})"
            )


def sample_on_grid(func, grid: PhaseGrid) -> DensityField:
    """Pointwise nodal sampling of func(x, v) on the grid (no cell averaging)."""
    x = grid.x_nodes[:, None]
    v = grid.v_nodes[None, :]
    values = np.asarray(func(x, v), dtype=np.float64)
    values = np.broadcast_to(values, (grid.nx, grid.nv)).copy()
    return DensityField(grid, values)


def grow_grid(field_: DensityField, xi: float) -> DensityField:
    """Widen the velocity domain by xi (a nonnegative multiple of dv).

    Old nodal values are copied bit-identically into the aligned interior;
    the new velocity rows are zero.  xi = 0 returns the input field.
    """
    g = field_.grid
    if xi < 0:
        raise GridAlignmentError(f"half-width increment must be >= 0, got {xi!r}")
    m = aligned_count(xi, g.dv, "Xi/dv", minimum=0)
    if m == 0:
        return field_
    half_new = g.half + m
    new_grid = PhaseGrid(L=g.L, dx=g.dx, dv=g.dv, U=half_new * g.dv,
                         nx=g.nx, nv=2 * half_new + 1)
    values = np.zeros((g.nx, new_grid.nv))
    values[:, m:m + g.nv] = field_.values
    return DensityField(new_grid, values)


def update_halfwidth(field_: DensityField, xi_n: float,
                     epsilon0: float) -> tuple[float, bool]:
    """Decide whether the velocity half-width grows this step.

    Returns (U, False) when |f| <= epsilon0 at every node of the boundary
    band { ||v||_inf in [U - xi_n, U] }, and (U + xi_n, True) otherwise.
    A band covering the whole domain (xi_n >= U) always grows.
    """
    if not epsilon0 > 0:
        raise ValueError(f"epsilon0 must be positive, got {epsilon0!r}")
    g = field_.grid
    m = aligned_count(xi_n, g.dv, "Xi/dv", minimum=0)
    if m == 0:
        return g.U, False
    if m >= g.half:
        return g.U + m * g.dv, True
    # Band rows: velocity offsets half-m .. half on each side, inclusive.
    lo = np.abs(field_.values[:, :m + 1]).max()
    hi = np.abs(field_.values[:, g.nv - m - 1:]).max()
    if max(lo, hi) <= epsilon0:
        return g.U, False
    return g.U + m * g.dv, True


@dataclass
class DomainState:
    """Current half-width, decay threshold, and the log of applied growths."""

    U: float
    epsilon0: float
    growth_log: list[tuple[int, float]] = field(default_factory=list)

    def update(self, field_: DensityField, xi_n: float, step_index: int) -> bool:
        """Apply the half-width recursion for one step; log growth events."""
        u_new, grew = update_halfwidth(field_, xi_n, self.epsilon0)
        if u_new < self.U:
            raise ValueError("half-width must be nondecreasing")
        if grew:
            self.growth_log.append((step_index, xi_n))
        self.U = u_new
        return grew
