"""Reproducible Brownian increments with dyadic sum-coarsening.

Convergence studies generate one path at the finest resolution and derive
every coarser path by summing blocks of fine increments, so that solvers at
nested resolutions share a single underlying Brownian path (common random
numbers).  Increment tables are immutable after creation and safe to share
read-only across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BrownianIncrements:
    """Per-step, per-component Gaussian increments delta[k, n] ~ N(0, tau)."""

    K: int
    N: int
    tau: float
    delta: np.ndarray  # shape (K, N)
    seed: int

    def __post_init__(self) -> None:
        if self.delta.shape != (self.K, self.N):
            raise ValueError(
                f"delta shape {self.delta.shape} != ({self.K}, {self.N})")


def sample_path(K: int, N: int, tau: float, seed: int) -> BrownianIncrements:
    """Draw a (K, N) table of independent N(0, tau) increments.

    Deterministic function of (K, N, tau, seed): the same arguments always
    reproduce the identical table.
    """
    if K < 1 or N < 1:
        raise ValueError(f"K and N must be >= 1, got K={K}, N={N}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    rng = np.random.default_rng(seed)
    delta = rng.standard_normal((K, N)) * math.sqrt(tau)
    delta.setflags(write=False)
    return BrownianIncrements(K=K, N=N, tau=float(tau), delta=delta, seed=seed)


def coarsen(inc: BrownianIncrements, factor: int) -> BrownianIncrements:
    """Merge blocks of `factor` consecutive increments by exact summation.

    The result has N/factor steps of size factor*tau and describes the same
    Brownian path as the input; in particular the per-component endpoint
    sum is preserved up to floating-point rounding.
    """
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if inc.N % factor != 0:
        raise ValueError(f"factor {factor} does not divide N = {inc.N}")
    delta = inc.delta.reshape(inc.K, inc.N // factor, factor).sum(axis=2)
    delta.setflags(write=False)
    return BrownianIncrements(K=inc.K, N=inc.N // factor, tau=inc.tau * factor,
                              delta=delta, seed=inc.seed)
