"""One-step inverse-flow maps for the stochastic characteristics.

The characteristics of the transport equation are
    dX = V dt,   dV = E(t, X) dt + sum_k sigma_k(X) dbeta_k.
A time step of the solver traces every grid node backward through the inverse
of a one-step integrator for this system.  Three splitting integrators (SEM,
LTSM, SSM) have closed-form inverses with unit Jacobian determinant; the
Euler-Maruyama baseline (EM) freezes the coefficients at the arrival point
and is not volume-preserving, which is exactly why it serves as a baseline.

All maps are pure functions of their arguments and vectorize over arrays of
arrival points.  Positions are reduced modulo L into [0, L); velocities are
never wrapped.  The electric field is always evaluated at the left endpoint
t_{n-1} of the step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class IntegratorKind(enum.Enum):
    SEM = "sem"
    LTSM = "ltsm"
    SSM = "ssm"
    EM_BASELINE = "em"


@dataclass(frozen=True)
class FieldEval:
    """Evaluation bundle for E and sigma with certified sup bounds.

    e(t, x) returns the field value(s) at position(s) x; sigma(x) returns an
    array of shape (K,) + x.shape.  emax and sigmax are honored bounds:
    |E(t, .)| <= emax and |sigma_k(.)| <= sigmax[k] everywhere.  de/dsigma
    are optional spatial derivatives, needed only for analytic Jacobians.
    """

    e: Callable[[float, np.ndarray], np.ndarray]
    emax: float
    sigma: Callable[[np.ndarray], np.ndarray]
    sigmax: np.ndarray
    de: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    dsigma: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def K(self) -> int:
        return len(self.sigmax)


def _wrap(x, L: float):
    return np.mod(x, L)


def _sigma_dot(field: FieldEval, x, dbeta: np.ndarray):
    """sum_k sigma_k(x) * dbeta_k, vectorized over x.

    dbeta is normally one K-vector shared by every point; a (K,) + x.shape
    array supplies per-point increments (used when integrating many sample
    paths side by side).
    """
    sig = np.asarray(field.sigma(x))
    dbeta = np.asarray(dbeta, dtype=float)
    if dbeta.ndim == 1:
        return np.einsum("k,k...->...", dbeta, sig)
    return np.einsum("k...,k...->...", dbeta, sig)


def _dsigma_dot(field: FieldEval, x, dbeta: np.ndarray):
    dsig = np.asarray(field.dsigma(x))
    return np.einsum("k,k...->...", np.asarray(dbeta, dtype=float), dsig)


def inverse_step_sem(x, v, tau: float, t_prev: float, field: FieldEval,
                     dbeta: np.ndarray, L: float, wrap: bool = True):
    """Inverse symplectic-Euler step: X = x - tau v, coefficients at X."""
    X = x - tau * v
    if wrap:
        X = _wrap(X, L)
    V = v - tau * field.e(t_prev, X) - _sigma_dot(field, X, dbeta)
    return X, V


def inverse_step_ltsm(x, v, tau: float, t_prev: float, field: FieldEval,
                      dbeta: np.ndarray, L: float, wrap: bool = True):
    """Inverse Lie-Trotter step: E frozen at x, sigma at the backtraced X."""
    e_at_x = field.e(t_prev, x)
    X = x - tau * v + tau * tau * e_at_x
    if wrap:
        X = _wrap(X, L)
    V = v - tau * e_at_x - _sigma_dot(field, X, dbeta)
    return X, V


def inverse_step_ssm(x, v, tau: float, t_prev: float, field: FieldEval,
                     dbeta: np.ndarray, L: float, wrap: bool = True):
    """Inverse Strang step: coefficients at the half-point x - tau v / 2."""
    xh = x - 0.5 * tau * v
    if wrap:
        xh = _wrap(xh, L)
    V = v - tau * field.e(t_prev, xh) - _sigma_dot(field, xh, dbeta)
    X = x - 0.5 * tau * (v + V)
    if wrap:
        X = _wrap(X, L)
    return X, V


def inverse_step_em(x, v, tau: float, t_prev: float, field: FieldEval,
                    dbeta: np.ndarray, L: float, wrap: bool = True):
    """Backward Euler-Maruyama step with coefficients frozen at the arrival
    point; the minimal modification of SEM that breaks volume preservation."""
    X = x - tau * v
    if wrap:
        X = _wrap(X, L)
    V = v - tau * field.e(t_prev, x) - _sigma_dot(field, x, dbeta)
    return X, V


_STEPS = {
    IntegratorKind.SEM: inverse_step_sem,
    IntegratorKind.LTSM: inverse_step_ltsm,
    IntegratorKind.SSM: inverse_step_ssm,
    IntegratorKind.EM_BASELINE: inverse_step_em,
}


def inverse_step(kind: IntegratorKind, x, v, tau: float, t_prev: float,
                 field: FieldEval, dbeta: np.ndarray, L: float,
                 wrap: bool = True):
    """Dispatch to the inverse one-step map of the requested integrator."""
    return _STEPS[kind](x, v, tau, t_prev, field, dbeta, L, wrap=wrap)


def displacement_bound(tau: float, emax: float, sigmax: np.ndarray,
                       dbeta: np.ndarray) -> float:
    """Per-step sup bound on the velocity displacement of every inverse map:

        tau * emax + sum_k sigmax[k] * |dbeta[k]|.

    Holds pointwise for SEM, LTSM, SSM and the EM baseline.
    """
    sigmax = np.asarray(sigmax, dtype=float)
    dbeta = np.asarray(dbeta, dtype=float)
    if emax < 0 or (sigmax < 0).any():
        raise ValueError("emax and sigmax must be nonnegative")
    return float(tau * emax + np.abs(sigmax) @ np.abs(dbeta))


def jacobian_det(kind: IntegratorKind, point: tuple[float, float], tau: float,
                 t_prev: float, field: FieldEval, dbeta: np.ndarray, L: float,
                 spacing: float = 1e-6, method: str = "fd") -> float:
    """Jacobian determinant of the inverse one-step map at a phase point.

    method="fd" uses central finite differences with the given spacing on the
    unwrapped map (wrapping would put spurious jumps at the torus seam).
    method="analytic" propagates exact derivatives and requires field.de and
    field.dsigma; for the affine-in-perturbation maps it is exact.
    """
    x0, v0 = point
    if method == "fd":
        h = spacing

        def m(x, v):
            return inverse_step(kind, x, v, tau, t_prev, field, dbeta, L,
                                wrap=False)

        xp, vp = m(x0 + h, v0)
        xm, vm = m(x0 - h, v0)
        dX_dx = (xp - xm) / (2 * h)
        dV_dx = (vp - vm) / (2 * h)
        xp, vp = m(x0, v0 + h)
        xm, vm = m(x0, v0 - h)
        dX_dv = (xp - xm) / (2 * h)
        dV_dv = (vp - vm) / (2 * h)
        return float(dX_dx * dV_dv - dX_dv * dV_dx)

    if method != "analytic":
        raise ValueError(f"unknown method {method!r}")
    if field.de is None or field.dsigma is None:
        raise ValueError("analytic Jacobian needs field.de and field.dsigma")

    if kind is IntegratorKind.SEM:
        X = x0 - tau * v0
        a = -tau * field.de(t_prev, X) - _dsigma_dot(field, X, dbeta)
        # rows: (dX/dx, dX/dv) = (1, -tau); (dV/dx, dV/dv) = (a, 1 - tau*a)
        return float(1.0 * (1.0 - tau * a) - (-tau) * a)
    if kind is IntegratorKind.LTSM:
        de = field.de(t_prev, x0)
        X = x0 - tau * v0 + tau * tau * field.e(t_prev, x0)
        ds = _dsigma_dot(field, X, dbeta)
        dX_dx = 1.0 + tau * tau * de
        dX_dv = -tau
        dV_dx = -tau * de - ds * dX_dx
        dV_dv = 1.0 + tau * ds
        return float(dX_dx * dV_dv - dX_dv * dV_dx)
    if kind is IntegratorKind.SSM:
        xh = x0 - 0.5 * tau * v0
        g = -tau * field.de(t_prev, xh) - _dsigma_dot(field, xh, dbeta)
        dV_dx = g
        dV_dv = 1.0 - 0.5 * tau * g
        dX_dx = 1.0 - 0.5 * tau * dV_dx
        dX_dv = -0.5 * tau * (1.0 + dV_dv)
        return float(dX_dx * dV_dv - dX_dv * dV_dx)
    # EM baseline: det = 1 - tau^2 E'(x) - tau sigma'(x).dbeta, generically != 1.
    de = field.de(t_prev, x0)
    ds = _dsigma_dot(field, x0, dbeta)
    return float(1.0 - tau * tau * de - tau * ds)
