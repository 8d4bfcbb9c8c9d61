"""Experiment orchestration: convergence, timing, and Monte Carlo studies.

Convergence studies couple all resolutions through common random numbers:
each sample draws one Brownian path at the finest level and every coarser
level uses its sum-coarsening, so differences between adjacent resolutions
measure discretization error rather than noise.  The per-pair error is

    sup over coarse probe nodes of sqrt(mean over samples of |f_fine - f_coarse|^2)

with probe nodes taken from the coarsest grid restricted to x in [0, L) and
|v| <= error_window.

Monte Carlo studies average the per-step diagnostics over independent seeds
(seed + sample index) and fit slopes/curvatures for comparison against the
closed-form mean laws.  Sample work can be dispatched to a process pool;
results are merged by sample index so the output is identical for any
worker count.
"""

from __future__ import annotations

import hashlib
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import fit_line, fit_quadratic, reference_law_coeffs
from .grid import DensityField
from .noise import coarsen, sample_path
from .solver import SimulationConfig, initial_field, run, run_nonadaptive

#: Refuse convergence studies whose finest grid exceeds this many nodes.
DEFAULT_NODE_BUDGET = 20_000_000


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    tau: float
    h: float
    error: float
    order: float  # log2 ratio against the previous row; nan for the first


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    fitted_order: float
    samples: int
    path_checksum: str  # sha256 of the finest-level increment table


def _level_config(cfg: SimulationConfig, level: int) -> SimulationConfig:
    f = 2 ** level
    return replace(cfg, N=cfg.N * f, dx=cfg.dx / f, dv=cfg.dv / f)


def _probe_values(field: DensityField, base_cfg: SimulationConfig,
                  level: int) -> np.ndarray:
    """Field values at the coarsest grid's probe nodes, |v| <= error_window.

    All grids are dyadically nested and growth preserves dv alignment, so
    every probe point is an exact node of the level's final grid.
    """
    g = field.grid
    f = 2 ** level
    jx = np.arange(round(base_cfg.L / base_cfg.dx)) * f
    w_cells = int(round(base_cfg.error_window / base_cfg.dv))
    kv_signed = np.arange(-w_cells, w_cells + 1) * f
    kv = kv_signed + g.half
    if kv[0] < 0 or kv[-1] >= g.nv:
        raise ValueError("error window exceeds the velocity domain")
    return field.values[np.ix_(jx, kv)].ravel()


def _conv_sample(args) -> list[np.ndarray]:
    cfg, levels, sample_seed = args
    cfgs = [_level_config(cfg, lv) for lv in range(levels)]
    finest = sample_path(cfg.K, cfgs[-1].N, cfgs[-1].tau, sample_seed)
    probes = []
    for lv, cfg_l in enumerate(cfgs):
        inc = coarsen(finest, 2 ** (levels - 1 - lv))
        # Coupling invariant: coarsening preserves the path endpoint.
        assert np.allclose(inc.delta.sum(axis=1), finest.delta.sum(axis=1),
                           rtol=0, atol=1e-10)
        result = run(cfg_l, inc)
        probes.append(_probe_values(result.final, cfg, lv))
    return probes


def run_convergence_study(cfg: SimulationConfig, levels: int, samples: int,
                          node_budget: int = DEFAULT_NODE_BUDGET,
                          threads: int = 1) -> ConvergenceTable:
    """Coupled-path convergence study across dyadic refinements of (tau, h).

    cfg describes the coarsest level; each refinement halves tau, dx, and dv
    together so h/tau stays constant.
    """
    if levels < 2:
        raise ValueError("need at least 2 levels")
    if samples < 1:
        raise ValueError("need at least 1 sample")
    ratio = cfg.error_window / cfg.dv
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError("error_window must be a multiple of dv")
    finest = _level_config(cfg, levels - 1)
    nv = 2 * int(round(finest.U0 / finest.dv)) + 1
    n_nodes = int(round(finest.L / finest.dx)) * nv
    if n_nodes > node_budget:
        raise ValueError(f"finest grid has {n_nodes} nodes, over the budget "
                         f"of {node_budget}")

    jobs = [(cfg, levels, cfg.seed + s) for s in range(samples)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_sample = list(pool.map(_conv_sample, jobs))
    else:
        per_sample = [_conv_sample(j) for j in jobs]

    # Every level reports the same probe set, so the pairwise differences
    # line up node by node.
    sq_sums = [np.zeros_like(per_sample[0][0]) for _ in range(levels - 1)]
    for probes in per_sample:
        for lv in range(1, levels):
            diff = probes[lv] - probes[lv - 1]
            sq_sums[lv - 1] += diff * diff
    errors = [float(np.sqrt(s / samples).max()) for s in sq_sums]

    rows = []
    for i, err in enumerate(errors):
        lvl = i + 1
        order = math.nan if i == 0 else math.log2(errors[i - 1] / err)
        cfg_l = _level_config(cfg, lvl)
        rows.append(ConvergenceRow(level=lvl, tau=cfg_l.tau,
                                   h=max(cfg_l.dx, cfg_l.dv),
                                   error=err, order=order))
    if len(errors) >= 2:
        slope = np.polynomial.polynomial.polyfit(
            np.arange(len(errors)), np.log2(errors), 1)[1]
        fitted = float(-slope)
    else:
        fitted = math.nan

    finest_inc = sample_path(cfg.K, finest.N, finest.tau, cfg.seed)
    checksum = hashlib.sha256(finest_inc.delta.tobytes()).hexdigest()
    return ConvergenceTable(rows=tuple(rows), fitted_order=fitted,
                            samples=samples, path_checksum=checksum)


@dataclass(frozen=True)
class TimingRow:
    T: float
    N: int
    adaptive_seconds: float
    nonadaptive_seconds: float
    ratio: float


def _timed(fn, cfg, inc, repetitions: int) -> float:
    times = []
    for _ in range(repetitions):
        result = fn(cfg, inc)
        times.append(result.elapsed)
    return statistics.median(times)


def run_timing_study(cfgs: list[SimulationConfig],
                     repetitions: int = 3) -> list[TimingRow]:
    """Median wall-clock of the adaptive run against the non-adaptive baseline.

    Both variants of each configuration consume the same pre-generated path,
    and the measured time excludes path generation and I/O.
    """
    rows = []
    for cfg in cfgs:
        inc = sample_path(cfg.K, cfg.N, cfg.tau, cfg.seed)
        t_adaptive = _timed(run, cfg, inc, repetitions)
        t_baseline = _timed(run_nonadaptive, cfg, inc, repetitions)
        rows.append(TimingRow(T=cfg.T, N=cfg.N,
                              adaptive_seconds=t_adaptive,
                              nonadaptive_seconds=t_baseline,
                              ratio=t_baseline / t_adaptive))
    return rows


@dataclass(frozen=True)
class MonteCarloResult:
    t: np.ndarray
    mean: dict[str, np.ndarray]
    se: dict[str, np.ndarray]
    reference: dict[str, tuple[float, ...]]
    fits: dict[str, tuple[float, ...]]
    fit_se: dict[str, tuple[float, ...]]
    samples: int


_MC_COLUMNS = ("mass", "l1", "l2", "momentum", "kinetic", "potential", "total")


def _mc_sample(args) -> dict[str, np.ndarray]:
    cfg, sample_seed = args
    inc = sample_path(cfg.K, cfg.N, cfg.tau, sample_seed)
    result = run(replace(cfg, seed=sample_seed), inc)
    out = {}
    for name in _MC_COLUMNS:
        out[name] = np.array([math.nan if getattr(r, name) is None
                              else getattr(r, name) for r in result.records])
    return out


def run_monte_carlo(cfg: SimulationConfig, samples: int,
                    threads: int = 1) -> MonteCarloResult:
    """Mean and standard error of every diagnostic over independent paths.

    Also fits the mean momentum and total energy with lines and the mean
    kinetic energy with a quadratic, for comparison with the closed-form
    laws in the `reference` field.
    """
    if samples < 2:
        raise ValueError("standard errors need at least 2 samples")
    jobs = [(cfg, cfg.seed + s) for s in range(samples)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            curves = list(pool.map(_mc_sample, jobs))
    else:
        curves = [_mc_sample(j) for j in jobs]

    t = np.arange(cfg.N + 1) * cfg.tau
    mean: dict[str, np.ndarray] = {}
    se: dict[str, np.ndarray] = {}
    stacks: dict[str, np.ndarray] = {}
    for name in _MC_COLUMNS:
        stack = np.stack([c[name] for c in curves])
        stacks[name] = stack
        mean[name] = stack.mean(axis=0)
        se[name] = stack.std(axis=0, ddof=1) / math.sqrt(samples)

    # Per-sample fits: OLS is linear, so their mean equals the fit of the
    # mean curve, and their spread yields the fitted coefficients' SE.
    def coeff_stats(name, fit):
        per_sample = np.array([fit(t, row) for row in stacks[name]])
        return (tuple(per_sample.mean(axis=0)),
                tuple(per_sample.std(axis=0, ddof=1) / math.sqrt(samples)))

    fits: dict[str, tuple[float, ...]] = {}
    fit_se: dict[str, tuple[float, ...]] = {}
    fits["momentum"], fit_se["momentum"] = coeff_stats("momentum", fit_line)
    fits["kinetic"], fit_se["kinetic"] = coeff_stats("kinetic", fit_quadratic)
    if np.isfinite(mean["total"]).all():
        fits["total"], fit_se["total"] = coeff_stats("total", fit_line)
    reference = reference_law_coeffs(cfg, initial_field(cfg))
    return MonteCarloResult(t=t, mean=mean, se=se, reference=reference,
                            fits=fits, fit_se=fit_se, samples=samples)
