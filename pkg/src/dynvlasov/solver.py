"""Dynamic-domain semi-Lagrangian time loop and the non-adaptive baseline.

One step, starting from the density at t_{n-1} on the domain [-U_{n-1}, U_{n-1}]:

1. Case II only: build rho from the stored density and solve the field at
   t_{n-1} (Case I fields are closed-form).
2. Bound the step's velocity displacement by Xi~ = tau*Emax + sum_k
   sigmax_k |dbeta_k|, round it up to the smallest dv-multiple Xi, and grow
   the domain by Xi only if the density exceeds epsilon0 somewhere in the
   boundary band of width Xi.
3. Trace every node of the (possibly grown) grid backward through the
   configured inverse map and evaluate the old field's interpolant at the
   departure point; the interpolant is zero outside the old domain, which
   realizes the "0 outside" rule with no boundary special cases.
4. The resulting nodal table, together with the reconstruction rule, is the
   new density (the interpolant at nodes equals the nodal values).

The non-adaptive baseline instead truncates the Brownian increments at
A_tau = (sum_k sigmax_k) * sqrt(tau |log tau|) and grows the half-width
unconditionally every step by the dv-aligned ceiling of tau*Emax + A_tau.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional

import numpy as np

from . import _kernels, diagnostics
from .characteristics import FieldEval, IntegratorKind, displacement_bound, inverse_step
from .field import (CaseOneField, SigmaComponent, SigmaModel, density_rho,
                    make_field_eval, solve_field)
from .grid import (DensityField, DomainState, PhaseGrid, grow_grid, make_grid,
                   sample_on_grid)
from .interpolation import SplineInterpolant, interp_linear_many
from .noise import BrownianIncrements

#: Use the fused numba back-trace for linear reconstruction when available.
#: The modular path below defines the semantics; the kernel agrees with it
#: to coefficient roundoff (~1 ulp).
USE_FUSED_KERNEL = _kernels.numba is not None

SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Nodes processed per chunk when back-tracing, to bound peak memory on the
#: very wide grids the non-adaptive baseline produces.
CHUNK_NODES = 2_000_000


class NumericalAbort(RuntimeError):
    """A step produced non-finite nodal values (always a bug, never noise)."""

    def __init__(self, step_index: int):
        super().__init__(f"non-finite density values at step {step_index}")
        self.step_index = step_index


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # constant | cosine | gradient
    amplitude: float


@dataclass(frozen=True)
class SigmaSpec:
    kinds: tuple[str, ...]
    amplitudes: tuple[float, ...]


@dataclass(frozen=True)
class InitialSpec:
    kind: str  # landau | two_stream | custom
    alpha: float = 0.0
    func: Optional[Callable] = None  # custom only; not serializable


@dataclass(frozen=True)
class SimulationConfig:
    """Full description of one run; see io.load_config for the file format."""

    case: str  # "I" | "II"
    L: float
    T: float
    N: int
    dx: float
    dv: float
    U0: float
    epsilon0: float
    integrator: IntegratorKind
    sigma: SigmaSpec
    initial: InitialSpec
    field: Optional[FieldSpec] = None  # required for Case I, None for Case II
    reconstruction: str = "linear"
    K: int = 1
    seed: int = 0
    snapshot_times: tuple[float, ...] = ()
    samples: int = 1
    error_window: float = 1.0

    @property
    def tau(self) -> float:
        return self.T / self.N if self.N > 0 else 0.0

    def validate(self) -> "SimulationConfig":
        if self.case not in ("I", "II"):
            raise ValueError(f"case must be 'I' or 'II', got {self.case!r}")
        if self.case == "I" and self.field is None:
            raise ValueError("Case I requires a field spec")
        if self.case == "II" and self.field is not None:
            raise ValueError("Case II computes its own field; drop the field spec")
        if self.N < 0 or self.T <= 0:
            raise ValueError("need T > 0 and N >= 0")
        if not self.epsilon0 > 0:
            raise ValueError("epsilon0 must be positive")
        if self.reconstruction not in ("linear", "spline"):
            raise ValueError(f"unknown reconstruction {self.reconstruction!r}")
        if len(self.sigma.kinds) != self.K:
            raise ValueError(f"sigma has {len(self.sigma.kinds)} components "
                             f"but K = {self.K}")
        if self.initial.kind not in ("landau", "two_stream", "custom"):
            raise ValueError(f"unknown initial kind {self.initial.kind!r}")
        if self.initial.kind == "custom" and self.initial.func is None:
            raise ValueError("custom initial density needs a callable")
        make_grid(self.L, self.dx, self.dv, self.U0)  # alignment check
        return self


@dataclass
class RunResult:
    config: SimulationConfig
    records: list[diagnostics.DiagnosticsRecord]
    final: DensityField
    growth_log: list[tuple[int, float]]
    elapsed: float
    seed: int
    snapshots: list[tuple[float, DensityField]] = dataclass_field(default_factory=list)


def initial_density_landau(x, v, alpha: float, L: float):
    """Gaussian velocity profile with a small cosine density perturbation."""
    return (np.exp(-0.5 * v ** 2) / SQRT_2PI
            * (1.0 + alpha * np.cos(2.0 * np.pi * x / L)))


def initial_density_two_stream(x, v, alpha: float, L: float):
    """Counter-streaming profile v^2 exp(-v^2/2), even in v, zero at v = 0."""
    return (v ** 2 * np.exp(-0.5 * v ** 2) / SQRT_2PI
            * (1.0 + alpha * np.cos(2.0 * np.pi * x / L)))


def make_sigma_model(cfg: SimulationConfig) -> SigmaModel:
    comps = tuple(SigmaComponent(kind=k, amplitude=a, L=cfg.L)
                  for k, a in zip(cfg.sigma.kinds, cfg.sigma.amplitudes))
    return SigmaModel(components=comps)


def make_field_model(cfg: SimulationConfig) -> Optional[CaseOneField]:
    if cfg.case == "II":
        return None
    return CaseOneField(kind=cfg.field.kind, amplitude=cfg.field.amplitude,
                        L=cfg.L)


def initial_density_func(cfg: SimulationConfig) -> Callable:
    if cfg.initial.kind == "landau":
        return lambda x, v: initial_density_landau(x, v, cfg.initial.alpha, cfg.L)
    if cfg.initial.kind == "two_stream":
        return lambda x, v: initial_density_two_stream(x, v, cfg.initial.alpha, cfg.L)
    return cfg.initial.func


def initial_field(cfg: SimulationConfig) -> DensityField:
    """Pointwise nodal sampling of the initial density on the U0 grid."""
    grid = make_grid(cfg.L, cfg.dx, cfg.dv, cfg.U0)
    return sample_on_grid(initial_density_func(cfg), grid)


def choose_U0(density: Callable, epsilon0: float, dv: float, L: float = 1.0,
              x_samples: int = 64) -> float:
    """Smallest dv-multiple U0 with |f0| < epsilon0 for all sampled |v| >= U0.

    The tail is probed on a 4x finer velocity grid out to 2*U0 at each
    candidate; densities that never decay are rejected after 1e4 cells.
    """
    if not epsilon0 > 0:
        raise ValueError("epsilon0 must be positive")
    xs = np.linspace(0.0, L, x_samples, endpoint=False)[:, None]
    cap = 10_000
    for m in range(1, cap + 1):
        u = m * dv
        # Cheap pre-check on the band edge before probing [u, 2u].
        edge = np.abs(density(xs, np.array([[u]]))).max()
        if edge >= epsilon0:
            continue
        vs = np.arange(4 * m, 8 * m + 1) * (dv / 4.0)
        tail = np.abs(density(xs, vs[None, :])).max()
        neg = np.abs(density(xs, -vs[None, :])).max()
        if max(tail, neg) < epsilon0:
            return u
    raise ValueError(
        f"density does not decay below {epsilon0:g} within {cap} cells")


def _truncate_increments(inc: BrownianIncrements, bound: float) -> BrownianIncrements:
    """Clamp every increment into [-bound, bound] (non-adaptive baseline)."""
    delta = np.clip(inc.delta, -bound, bound)
    delta.setflags(write=False)
    return BrownianIncrements(K=inc.K, N=inc.N, tau=inc.tau, delta=delta,
                              seed=inc.seed)


class _StepContext:
    """Per-run immutable pieces shared by every step."""

    def __init__(self, cfg: SimulationConfig):
        cfg.validate()
        self.cfg = cfg
        self.sigma = make_sigma_model(cfg)
        self.field_model = make_field_model(cfg)  # None for Case II
        self.emax = (2.0 * cfg.L if cfg.case == "II"
                     else self.field_model.emax)
        self._static_eval = (None if cfg.case == "II"
                             else make_field_eval(self.field_model, self.sigma))

    def field_eval(self, state: DensityField):
        """(FieldEval, concrete field model) for the step leaving `state`."""
        if self._static_eval is not None:
            return self._static_eval, self.field_model
        ctwo = solve_field(density_rho(state), self.cfg.L)
        return make_field_eval(ctwo, self.sigma), ctwo


def _backtrace(state: DensityField, new_grid: PhaseGrid, kind: IntegratorKind,
               tau: float, t_prev: float, feval: FieldEval, field_model,
               sigma: SigmaModel, dbeta: np.ndarray,
               reconstruction: str) -> np.ndarray:
    """Nodal table of the new field: old interpolant at departure points."""
    if reconstruction == "linear" and USE_FUSED_KERNEL:
        return _kernels.fused_backtrace(state, new_grid, kind, tau, t_prev,
                                        field_model, sigma, dbeta)
    if reconstruction == "spline":
        interp = SplineInterpolant(state)
    else:
        interp = lambda x, v: interp_linear_many(state, x, v)
    x = new_grid.x_nodes[:, None]
    v = new_grid.v_nodes[None, :]
    out = np.empty((new_grid.nx, new_grid.nv))
    cols = max(1, CHUNK_NODES // new_grid.nx)
    for start in range(0, new_grid.nv, cols):
        sl = slice(start, min(start + cols, new_grid.nv))
        X, V = inverse_step(kind, x, v[:, sl], tau, t_prev, feval, dbeta,
                            new_grid.L)
        out[:, sl] = interp(X, V)
    return out


def _advance(state: DensityField, n: int, inc: BrownianIncrements,
             ctx: _StepContext, domain: DomainState,
             grow_cells: Optional[int] = None) -> DensityField:
    """One step from t_{n-1} to t_n.  grow_cells = None follows the adaptive
    rule; otherwise the domain grows unconditionally by that many cells."""
    cfg = ctx.cfg
    tau = cfg.tau
    dbeta = inc.delta[:, n - 1]
    feval, field_model = ctx.field_eval(state)

    if grow_cells is None:
        xi_tilde = displacement_bound(tau, ctx.emax, feval.sigmax, dbeta)
        m = math.ceil(xi_tilde / cfg.dv - 1e-12)
        xi = m * cfg.dv
        grew = domain.update(state, xi, n)
        work = grow_grid(state, xi) if grew else state
    else:
        xi = grow_cells * cfg.dv
        grew = grow_cells > 0
        if grew:
            domain.growth_log.append((n, xi))
        work = grow_grid(state, xi)
    domain.U = work.grid.U  # grid-normalized half-width is the truth

    values = _backtrace(state, work.grid, cfg.integrator, tau,
                        (n - 1) * tau, feval, field_model, ctx.sigma, dbeta,
                        cfg.reconstruction)
    if not np.isfinite(values).all():
        raise NumericalAbort(n)
    return DensityField(work.grid, values)


def step(state: DensityField, n: int, inc: BrownianIncrements,
         cfg: SimulationConfig) -> DensityField:
    """Single adaptive step (standalone form of the loop body of :func:`run`)."""
    ctx = _StepContext(cfg)
    domain = DomainState(U=state.grid.U, epsilon0=cfg.epsilon0)
    return _advance(state, n, inc, ctx, domain)


def _check_increments(cfg: SimulationConfig, inc: BrownianIncrements) -> None:
    if inc.N != cfg.N or inc.K != cfg.K:
        raise ValueError(f"increments have (K={inc.K}, N={inc.N}), config "
                         f"needs (K={cfg.K}, N={cfg.N})")
    if cfg.N > 0 and abs(inc.tau - cfg.tau) > 1e-12 * max(1.0, cfg.tau):
        raise ValueError(f"increment stepsize {inc.tau!r} != T/N = {cfg.tau!r}")


def _run_loop(cfg: SimulationConfig, inc: BrownianIncrements,
              grow_cells: Optional[int]) -> RunResult:
    ctx = _StepContext(cfg)
    state = initial_field(cfg)
    domain = DomainState(U=state.grid.U, epsilon0=cfg.epsilon0)
    if cfg.N > 0:
        snap_steps = {int(round(t / cfg.tau)): t for t in cfg.snapshot_times}
    else:
        snap_steps = {0: 0.0} if 0.0 in cfg.snapshot_times else {}

    records = [diagnostics.record_for_config(state, 0.0, cfg)]
    snapshots = []
    if 0 in snap_steps:
        snapshots.append((0.0, state))

    start = time.perf_counter()
    for n in range(1, cfg.N + 1):
        state = _advance(state, n, inc, ctx, domain, grow_cells=grow_cells)
        assert state.grid.U == domain.U
        grew = bool(domain.growth_log) and domain.growth_log[-1][0] == n
        records.append(diagnostics.record_for_config(state, n * cfg.tau, cfg,
                                                      grew=grew))
        if n in snap_steps:
            snapshots.append((n * cfg.tau, state))
    elapsed = time.perf_counter() - start

    return RunResult(config=cfg, records=records, final=state,
                     growth_log=domain.growth_log, elapsed=elapsed,
                     seed=inc.seed, snapshots=snapshots)


def run(cfg: SimulationConfig, inc: BrownianIncrements) -> RunResult:
    """Adaptive-domain run over N steps from the sampled initial density."""
    cfg.validate()
    _check_increments(cfg, inc)
    return _run_loop(cfg, inc, grow_cells=None)


def run_nonadaptive(cfg: SimulationConfig, inc: BrownianIncrements) -> RunResult:
    """Baseline: truncated increments, unconditional per-step domain growth.

    Increments are clamped at A_tau = (sum_k sigmax_k) sqrt(tau |log tau|)
    and the half-width grows by ceil((tau*Emax + A_tau)/dv) cells per step
    regardless of the density values.
    """
    cfg.validate()
    _check_increments(cfg, inc)
    ctx = _StepContext(cfg)
    c = float(ctx.sigma.sup_bounds.sum())
    a_tau = c * math.sqrt(cfg.tau * abs(math.log(cfg.tau)))
    grow_cells = math.ceil((cfg.tau * ctx.emax + a_tau) / cfg.dv - 1e-12)
    return _run_loop(cfg, _truncate_increments(inc, a_tau), grow_cells)
