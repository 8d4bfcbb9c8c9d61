"""Electric-field models and noise-coefficient models.

Case I: closed-form fields with analytic sup bounds.  Case II: the 1D
self-consistent field obtained from the density's charge deviation rho - 1
through the zero-mean kernel

    K(x, y) = y/L - 1  for x < y,      K(x, y) = y/L  for y < x,

so that E' = rho - 1 and the gauge int E dx = 0 holds.  Positivity of the
density bounds the Case II field by 2L a priori; nodal values are clamped
into [-2L, 2L] accordingly.

Noise coefficients sigma_k are closed-form on the torus with certified
per-component sup bounds; those bounds feed the per-step velocity
displacement estimate of the solver.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .characteristics import FieldEval
from .grid import DensityField

TWO_PI = 2.0 * np.pi

SIGMA_KINDS = ("zero", "constant", "sine", "cosine_shifted")
FIELD_KINDS = ("constant", "cosine", "gradient")


@dataclass(frozen=True)
class SigmaComponent:
    """One closed-form noise coefficient sigma_k on the torus [0, L).

    kinds: zero; constant a; sine a*sin(2 pi x / L);
    cosine_shifted a*(cos(2 pi x / L) + 1).
    """

    kind: str
    amplitude: float
    L: float

    def __post_init__(self) -> None:
        if self.kind not in SIGMA_KINDS:
            raise ValueError(f"unknown sigma kind {self.kind!r}")

    @property
    def sup(self) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "cosine_shifted":
            return 2.0 * abs(self.amplitude)
        return abs(self.amplitude)

    def __call__(self, x):
        w = TWO_PI / self.L
        if self.kind == "zero":
            return np.zeros_like(np.asarray(x, dtype=float))
        if self.kind == "constant":
            return np.full_like(np.asarray(x, dtype=float), self.amplitude)
        if self.kind == "sine":
            return self.amplitude * np.sin(w * x)
        return self.amplitude * (np.cos(w * x) + 1.0)

    def deriv(self, x):
        w = TWO_PI / self.L
        if self.kind in ("zero", "constant"):
            return np.zeros_like(np.asarray(x, dtype=float))
        if self.kind == "sine":
            return self.amplitude * w * np.cos(w * x)
        return -self.amplitude * w * np.sin(w * x)


@dataclass(frozen=True)
class SigmaModel:
    """Stacked noise coefficients (sigma_1, ..., sigma_K)."""

    components: tuple[SigmaComponent, ...]

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def sup_bounds(self) -> np.ndarray:
        return np.array([c.sup for c in self.components])

    @property
    def is_constant(self) -> bool:
        return all(c.kind in ("zero", "constant") for c in self.components)

    def trace_sigma_squared(self) -> float:
        """Tr(sigma sigma^T) for constant coefficients; rejected otherwise."""
        if not self.is_constant:
            raise ValueError("Tr(sigma sigma^T) is x-dependent for "
                             "non-constant coefficients")
        consts = [0.0 if c.kind == "zero" else c.amplitude
                  for c in self.components]
        return float(sum(a * a for a in consts))

    def __call__(self, x):
        return np.stack([c(x) for c in self.components])

    def deriv(self, x):
        return np.stack([c.deriv(x) for c in self.components])


@dataclass(frozen=True)
class CaseOneField:
    """Closed-form external field with an analytic sup bound.

    kinds: constant E0 = amplitude; cosine amplitude*cos(2 pi x / L);
    gradient E = -u' for the potential u(x) = amplitude*sin(2 pi x / L).
    Only the gradient kind carries a potential, so only it (and Case II)
    supports the total-energy diagnostic.
    """

    kind: str
    amplitude: float
    L: float

    def __post_init__(self) -> None:
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def emax(self) -> float:
        if self.kind == "gradient":
            return abs(self.amplitude) * TWO_PI / self.L
        return abs(self.amplitude)

    def __call__(self, t, x):
        w = TWO_PI / self.L
        if self.kind == "constant":
            return np.full_like(np.asarray(x, dtype=float), self.amplitude)
        if self.kind == "cosine":
            return self.amplitude * np.cos(w * x)
        return -self.amplitude * w * np.cos(w * x)

    def deriv(self, t, x):
        w = TWO_PI / self.L
        if self.kind == "constant":
            return np.zeros_like(np.asarray(x, dtype=float))
        if self.kind == "cosine":
            return -self.amplitude * w * np.sin(w * x)
        return self.amplitude * w * w * np.sin(w * x)

    def potential(self, x):
        """u with E = -grad u, or None when the kind carries no potential."""
        if self.kind != "gradient":
            return None
        return self.amplitude * np.sin(TWO_PI / self.L * x)


def density_rho(field: DensityField) -> np.ndarray:
    """Mass density: composite trapezoid of f over [-U, U] at each x node."""
    g = field.grid
    wv = np.full(g.nv, g.dv)
    wv[0] *= 0.5
    wv[-1] *= 0.5
    return field.values @ wv


@functools.lru_cache(maxsize=8)
def _kernel_matrix(nx: int) -> np.ndarray:
    """Scale-free kernel K(x_j, y_m)*L: columns sum to -1/2 each.

    Entries m/nx - [j < m], with the diagonal averaged between the two
    one-sided branches (m/nx - 1/2); the symmetric diagonal is what makes
    the nodal quadrature second-order accurate.
    """
    j = np.arange(nx)[:, None]
    m = np.arange(nx)[None, :]
    kern = m / nx - (j < m)
    np.fill_diagonal(kern, np.arange(nx) / nx - 0.5)
    return kern


@dataclass
class CaseTwoField:
    """Self-consistent 1D field: nodal values at the step's left endpoint.

    Nodal values are zero-mean before clamping and bounded by 2L after.
    Between nodes the field is evaluated by periodic linear interpolation.
    """

    L: float
    dx: float
    e_nodes: np.ndarray

    @property
    def emax(self) -> float:
        return 2.0 * self.L

    def __call__(self, t, x):
        nx = len(self.e_nodes)
        s = np.mod(np.asarray(x, dtype=float), self.L) * (1.0 / self.dx)
        j = np.clip(np.floor(s).astype(np.intp), 0, nx)
        w = s - j
        j0 = np.where(j >= nx, 0, j)
        j1 = j0 + 1
        j1 = np.where(j1 == nx, 0, j1)
        return (1.0 - w) * self.e_nodes[j0] + w * self.e_nodes[j1]


def solve_field(rho: np.ndarray, L: float) -> CaseTwoField:
    """Field from nodal density by kernel quadrature, gauge-projected
    to exact discrete zero mean, then clamped into [-2L, 2L]."""
    rho = np.asarray(rho, dtype=float)
    nx = len(rho)
    dx = L / nx
    e = dx * (_kernel_matrix(nx) @ (rho - 1.0))
    e -= e.mean()
    np.clip(e, -2.0 * L, 2.0 * L, out=e)
    return CaseTwoField(L=float(L), dx=dx, e_nodes=e)


def make_field_eval(field_model, sigma: SigmaModel) -> FieldEval:
    """Bundle a Case I or Case II field with noise coefficients.

    Analytic derivatives are attached when the field model provides them
    (Case I); the Case II nodal field only supports finite differences.
    """
    if isinstance(field_model, CaseOneField):
        return FieldEval(e=field_model, emax=field_model.emax,
                         sigma=sigma, sigmax=sigma.sup_bounds,
                         de=field_model.deriv, dsigma=sigma.deriv)
    if isinstance(field_model, CaseTwoField):
        return FieldEval(e=field_model, emax=field_model.emax,
                         sigma=sigma, sigmax=sigma.sup_bounds,
                         de=None, dsigma=sigma.deriv)
    raise TypeError(f"unsupported field model {type(field_model).__name__}")
