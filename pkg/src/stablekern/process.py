"""Gaussian process samplers on time grids, plus Monte Carlo audits.

Both kernels are sampled directly from their independent-increment
constructions, so a path costs O(n) draws and one cumulative sum:

* Wiener: increments over (t_{i-1}, t_i] with t_0 = 0, accumulated
  left to right.
* SS-1: increments in the exponential coordinate exp(-beta*t),
  accumulated right to left; the increment past t_n down to the virtual
  instant t_{n+1} = +infinity carries the tail variance c*exp(-beta*t_n).

The exponential time transformation maps one construction onto the
other: sampling Wiener paths on the transformed grid and reversing the
column order reproduces the SS-1 law exactly.

Gaussian draws are produced by the inverse CDF applied to PCG64
uniforms (algorithm id ``pcg64-inverse-cdf``), so a seed reproduces
paths bit-exactly across runs of the same build.  Paths are generated
in one vectorized draw from a single generator; a parallel
implementation must instead derive the generator for path k from
(seed, k) to keep results deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import ndtri

from .errors import DimensionMismatch, InvalidParameter, TooFewPaths
from .grid import SamplingGrid, make_grid
from .kernels import SS1, WIENER, KernelSpec, stable_increments

__all__ = [
    "NOISE_ALGORITHM",
    "WhiteNoiseSource",
    "PathSet",
    "TimeTransform",
    "IncrementCheck",
    "ConstraintAuditReport",
    "sample_wiener",
    "sample_ss1",
    "stable_time_transform",
    "audit_constraints",
]

NOISE_ALGORITHM = "pcg64-inverse-cdf"


@dataclass(eq=False)
class WhiteNoiseSource:
    """Stream of i.i.d. N(0, variance) draws, deterministic given seed."""

    seed: int
    variance: float = 1.0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (isinstance(self.variance, (int, float)) and math.isfinite(self.variance) and self.variance > 0):
            raise InvalidParameter(f"noise variance must be finite and > 0, got {self.variance!r}")
        self._rng = np.random.default_rng(self.seed)

    def draw(self, shape) -> np.ndarray:
        u = self._rng.random(shape)
        # rng.random can return exactly 0.0, where the inverse CDF is -inf.
        u[u == 0.0] = np.nextafter(0.0, 1.0)
        return math.sqrt(self.variance) * ndtri(u)


@dataclass(frozen=True, eq=False)
class PathSet:
    """p sampled paths over a common grid, one path per row."""

    grid: SamplingGrid
    paths: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.paths.ndim != 2 or self.paths.shape[1] != self.grid.n:
            raise DimensionMismatch(
                f"paths must have shape (p, {self.grid.n}), got {self.paths.shape}"
            )

    @property
    def p(self) -> int:
        return self.paths.shape[0]

    def __repr__(self) -> str:
        return f"PathSet(p={self.p}, n={self.grid.n})"


def _check_sampling_args(c: float, p: int) -> None:
    if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0):
        raise InvalidParameter(f"scale c must be finite and > 0, got {c!r}")
    if p < 1:
        raise InvalidParameter(f"need at least one path, got p={p}")


def sample_wiener(grid: SamplingGrid, c: float, seed: int, p: int) -> PathSet:
    """Sample p Wiener paths: cumulative sums of N(0, c*(t_i - t_{i-1})) increments."""
    _check_sampling_args(c, p)
    noise = WhiteNoiseSource(seed=seed, variance=c)
    w = noise.draw((p, grid.n))
    w *= np.sqrt(np.diff(grid.times, prepend=0.0))
    return PathSet(grid=grid, paths=np.cumsum(w, axis=1))


def sample_ss1(grid: SamplingGrid, c: float, beta: float, seed: int, p: int) -> PathSet:
    """Sample p SS-1 paths: right-to-left sums of exponential-coordinate increments."""
    _check_sampling_args(c, p)
    delta = stable_increments(grid, beta)
    noise = WhiteNoiseSource(seed=seed, variance=c)
    w = noise.draw((p, grid.n))
    w *= np.sqrt(delta)
    return PathSet(grid=grid, paths=np.cumsum(w[:, ::-1], axis=1)[:, ::-1])


@dataclass(frozen=True, eq=False)
class TimeTransform:
    """Exponential change of time mapping the Wiener law to the SS-1 law.

    The transformed grid holds tau_j = exp(-beta * t_{n+1-j}); reversing
    the column order of Wiener paths sampled on it (variance parameter
    c) yields paths with the SS-1 covariance on the original grid.
    """

    original: SamplingGrid
    tau: SamplingGrid
    reversal: np.ndarray = field(repr=False)

    def reverse_paths(self, ps: PathSet) -> PathSet:
        """Map paths sampled on the tau grid back onto the original grid."""
        if ps.grid != self.tau:
            raise DimensionMismatch("paths were not sampled on the transformed grid")
        return PathSet(grid=self.original, paths=np.ascontiguousarray(ps.paths[:, self.reversal]))


def stable_time_transform(grid: SamplingGrid, beta: float) -> TimeTransform:
    """Transformed grid tau_j = exp(-beta * t_{n+1-j}) with its reversal map."""
    if not (isinstance(beta, (int, float)) and math.isfinite(beta) and beta > 0):
        raise InvalidParameter(f"time transform needs finite beta > 0, got {beta!r}")
    tau = np.exp(-beta * grid.times[::-1])
    if tau[0] <= 0.0:
        raise InvalidParameter("beta * t_n is too large: the transformed grid underflows to 0")
    return TimeTransform(original=grid, tau=make_grid(tau), reversal=np.arange(grid.n)[::-1])


@dataclass(frozen=True)
class IncrementCheck:
    """Sample statistics of one increment against its model values."""

    index: int
    mean: float
    mean_se: float
    mean_z: float
    variance: float
    variance_target: float
    variance_se: float
    variance_z: float
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "mean": self.mean,
            "mean_se": self.mean_se,
            "mean_z": self.mean_z,
            "variance": self.variance,
            "variance_target": self.variance_target,
            "variance_se": self.variance_se,
            "variance_z": self.variance_z,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class ConstraintAuditReport:
    """Per-increment Monte Carlo audit of a path set against a kernel."""

    family: str
    n_paths: int
    checks: tuple
    max_abs_z: float
    ok: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n_paths": self.n_paths,
            "checks": [c.to_dict() for c in self.checks],
            "max_abs_z": self.max_abs_z,
            "ok": self.ok,
        }


def _z_score(deviation: float, se: float) -> float:
    if se == 0.0:
        return 0.0 if deviation == 0.0 else math.inf
    return deviation / se


def audit_constraints(ps: PathSet, spec: KernelSpec, z_limit: float = 5.0) -> ConstraintAuditReport:
    """Check sampled increments against the kernel's mean and variance targets.

    The increments audited are the defining ones of each construction:
    differences between consecutive grid points (taken toward the
    origin for Wiener, toward the virtual instant at +infinity for
    SS-1), each with model mean 0 and model variance c*increment.  A
    check is flagged when the sample mean or sample variance sits more
    than ``z_limit`` standard errors from its target.
    """
    p = ps.p
    if p < 100:
        raise TooFewPaths(f"audit needs at least 100 paths, got {p}")
    paths = ps.paths
    if spec.family == WIENER:
        increments = np.diff(paths, axis=1, prepend=0.0)
        targets = spec.c * np.diff(ps.grid.times, prepend=0.0)
    else:
        increments = np.empty_like(paths)
        increments[:, :-1] = paths[:, :-1] - paths[:, 1:]
        increments[:, -1] = paths[:, -1]
        targets = spec.c * stable_increments(ps.grid, spec.beta)
    means = increments.mean(axis=0)
    variances = increments.var(axis=0, ddof=1)
    mean_se = np.sqrt(targets / p)
    var_se = targets * math.sqrt(2.0 / (p - 1))
    checks: List[IncrementCheck] = []
    for k in range(ps.grid.n):
        mz = _z_score(float(means[k]), float(mean_se[k]))
        vz = _z_score(float(variances[k] - targets[k]), float(var_se[k]))
        checks.append(
            IncrementCheck(
                index=k + 1,
                mean=float(means[k]),
                mean_se=float(mean_se[k]),
                mean_z=mz,
                variance=float(variances[k]),
                variance_target=float(targets[k]),
                variance_se=float(var_se[k]),
                variance_z=vz,
                flagged=bool(abs(mz) > z_limit or abs(vz) > z_limit),
            )
        )
    max_abs_z = max(max(abs(c.mean_z), abs(c.variance_z)) for c in checks)
    return ConstraintAuditReport(
        family=spec.family,
        n_paths=p,
        checks=tuple(checks),
        max_abs_z=max_abs_z,
        ok=not any(c.flagged for c in checks),
    )
