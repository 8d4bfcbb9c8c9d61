"""Quadrature-based physical quantities and their closed-form mean laws.

All quadratures are composite trapezoid on the field's current grid: uniform
weights dx in the periodic position direction, half-weighted endpoints in
velocity.  That matches the second-order accuracy of the reconstruction, so
quadrature error never dominates.

With velocity noise the mean momentum, kinetic energy, and total energy obey
closed-form laws (linear or quadratic in time) under specific hypotheses on E
and sigma; :func:`reference_law_coeffs` returns the polynomial coefficients
of every law whose hypothesis the configuration satisfies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .field import CaseOneField, CaseTwoField, density_rho, solve_field
from .grid import DensityField

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None


def _v_weights(field: DensityField) -> np.ndarray:
    g = field.grid
    wv = np.full(g.nv, g.dv)
    wv[0] *= 0.5
    wv[-1] *= 0.5
    return wv


if numba is not None:

    @numba.njit(cache=True)
    def _moments_kernel(vals, wv, vk):  # pragma: no cover - jitted
        nx, nv = vals.shape
        mass = l1 = l2 = mom = kin = 0.0
        for j in range(nx):
            m0 = m1 = m2 = mp = mk = 0.0
            for k in range(nv):
                fw = wv[k] * vals[j, k]
                m0 += fw
                m1 += abs(fw)
                m2 += fw * vals[j, k]
                mp += vk[k] * fw
                mk += vk[k] * vk[k] * fw
            mass += m0
            l1 += m1
            l2 += m2
            mom += mp
            kin += mk
        return mass, l1, l2, mom, kin


def _moments(field: DensityField) -> tuple[float, float, float, float, float]:
    """(mass, L1, L2^2, momentum, kinetic) in one pass over the table."""
    g = field.grid
    wv = _v_weights(field)
    if numba is not None:
        m0, m1, m2, mp, mk = _moments_kernel(field.values, wv, g.v_nodes)
    else:
        fw = field.values * wv
        m0 = float(fw.sum())
        m1 = float(np.abs(fw).sum())
        m2 = float((fw * field.values).sum())
        mp = float((fw @ g.v_nodes).sum())
        mk = float((fw @ (g.v_nodes ** 2)).sum())
    dx = g.dx
    return m0 * dx, m1 * dx, m2 * dx, mp * dx, 0.5 * mk * dx


def mass(field: DensityField) -> float:
    """Signed integral of f over the phase space."""
    return _moments(field)[0]


def lp_norm(field: DensityField, p: int) -> float:
    """L^p norm (p in {1, 2}) of f over the torus times [-U, U]."""
    if p not in (1, 2):
        raise ValueError(f"p must be 1 or 2, got {p}")
    m = _moments(field)
    return m[1] if p == 1 else math.sqrt(m[2])


def momentum(field: DensityField) -> float:
    """Integral of v * f."""
    return _moments(field)[3]


def kinetic_energy(field: DensityField) -> float:
    """Integral of |v|^2 f / 2."""
    return _moments(field)[4]


def potential_energy(field: DensityField, field_model) -> Optional[float]:
    """Potential part of the total energy, or None when unavailable.

    Case I gradient kind: integral of u(x) f.  Case II: (1/2) integral of
    E^2 over the torus, with E rebuilt from the field's own density.  Other
    Case I kinds carry no potential.
    """
    g = field.grid
    if isinstance(field_model, CaseOneField):
        u = field_model.potential(g.x_nodes)
        if u is None:
            return None
        row_mass = field.values @ _v_weights(field)
        return float((u * row_mass).sum() * g.dx)
    if isinstance(field_model, CaseTwoField):
        e = field_model.e_nodes
        return float(0.5 * (e @ e) * field_model.dx)
    return None


def total_energy(field: DensityField, field_model) -> Optional[float]:
    """Kinetic plus potential energy; None when the potential is unavailable."""
    pot = potential_energy(field, field_model)
    if pot is None:
        return None
    return kinetic_energy(field) + pot


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step scalars recorded by a run.  total = kinetic + potential
    whenever the potential is defined."""

    t: float
    mass: float
    l1: float
    l2: float
    momentum: float
    kinetic: float
    potential: Optional[float]
    total: Optional[float]
    U: float
    grew: bool


def record(field: DensityField, t: float, field_model,
           grew: bool = False) -> DiagnosticsRecord:
    """Evaluate every diagnostic of a field at time t."""
    m0, l1, l2sq, mom, kin = _moments(field)
    pot = potential_energy(field, field_model)
    return DiagnosticsRecord(
        t=t,
        mass=m0,
        l1=l1,
        l2=math.sqrt(l2sq),
        momentum=mom,
        kinetic=kin,
        potential=pot,
        total=None if pot is None else kin + pot,
        U=field.grid.U,
        grew=grew,
    )


def record_for_config(field: DensityField, t: float, cfg,
                      grew: bool = False) -> DiagnosticsRecord:
    """Like :func:`record`, rebuilding the Case II field from the density."""
    from .solver import make_field_model  # deferred to avoid an import cycle

    if cfg.case == "II":
        model = solve_field(density_rho(field), cfg.L)
    else:
        model = make_field_model(cfg)
    return record(field, t, model, grew=grew)


def reference_law_coeffs(cfg, initial: DensityField) -> dict[str, tuple[float, ...]]:
    """Closed-form mean-evolution laws available for this configuration.

    Returns ascending polynomial coefficients keyed by diagnostic name; a
    diagnostic is absent when the configuration lies outside the hypotheses
    of its law.  The constants (initial momentum P0, kinetic energy K0, total
    energy H0, and the mass) are taken from grid quadrature of the initial
    field and the laws are scaled by the mass, which the evolution preserves
    (the unit-mass statements are the special case mass = 1):

      * E constant:                momentum(t) = P0 + E0 * mass * t
      * E, sigma constant:         kinetic(t) = K0 + (E0 P0 + Tr(ss^T) mass/2) t
                                                + E0^2 mass t^2 / 2
      * gradient E or Case II,
        sigma constant:            total(t) = H0 + Tr(ss^T) mass * t / 2
      * Case II:                   momentum(t) = P0
    """
    from .solver import make_field_model, make_sigma_model

    sigma = make_sigma_model(cfg)
    laws: dict[str, tuple[float, ...]] = {}
    m0 = mass(initial)
    p0 = momentum(initial)

    if cfg.case == "II":
        laws["momentum"] = (p0,)
        if sigma.is_constant:
            model = solve_field(density_rho(initial), cfg.L)
            h0 = total_energy(initial, model)
            laws["total"] = (h0, 0.5 * sigma.trace_sigma_squared() * m0)
        return laws

    model = make_field_model(cfg)
    if model.kind == "constant":
        e0 = model.amplitude
        laws["momentum"] = (p0, e0 * m0)
        if sigma.is_constant:
            k0 = kinetic_energy(initial)
            tr = sigma.trace_sigma_squared()
            laws["kinetic"] = (k0, e0 * p0 + 0.5 * tr * m0,
                               0.5 * e0 * e0 * m0)
    elif model.kind == "gradient" and sigma.is_constant:
        h0 = total_energy(initial, model)
        laws["total"] = (h0, 0.5 * sigma.trace_sigma_squared() * m0)
    return laws


def reference_laws(cfg, t) -> dict[str, np.ndarray]:
    """Evaluate the available mean laws at time(s) t.

    Unavailable diagnostics are simply absent from the result.
    """
    from .solver import initial_field

    coeffs = reference_law_coeffs(cfg, initial_field(cfg))
    t = np.asarray(t, dtype=float)
    return {name: np.polynomial.polynomial.polyval(t, np.asarray(c))
            for name, c in coeffs.items()}


def fit_line(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Ordinary least squares line: returns (intercept, slope)."""
    c = np.polynomial.polynomial.polyfit(t, y, 1)
    return float(c[0]), float(c[1])


def fit_quadratic(t: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares quadratic: returns ascending coefficients (c0, c1, c2)."""
    c = np.polynomial.polynomial.polyfit(t, y, 2)
    return float(c[0]), float(c[1]), float(c[2])
