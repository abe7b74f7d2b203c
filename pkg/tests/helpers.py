"""Shared generators and norms for the test suite."""

import numpy as np

from stablekern import SS1, WIENER, KernelSpec, SamplingGrid, make_grid


def random_grid(rng: np.random.Generator, n: int, inc_low: float = 0.1, inc_high: float = 2.0) -> SamplingGrid:
    """Grid whose first time and increments are uniform in [inc_low, inc_high]."""
    return make_grid(np.cumsum(rng.uniform(inc_low, inc_high, size=n)))


def random_spec(rng: np.random.Generator, family: str) -> KernelSpec:
    c = float(rng.uniform(0.1, 10.0))
    if family == WIENER:
        return KernelSpec(family=WIENER, c=c)
    return KernelSpec(family=SS1, c=c, beta=float(rng.uniform(0.05, 2.0)))


def inf_norm(m: np.ndarray) -> float:
    """Matrix infinity norm (max absolute row sum)."""
    return float(np.max(np.sum(np.abs(np.atleast_2d(m)), axis=1)))
