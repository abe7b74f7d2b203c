"""Closed-form structure of Wiener and SS-1 Gram matrices.

Both kernels are Markov on a time grid, so the inverse of the Gram
matrix P is tridiagonal and is available in closed form from the grid
increments alone, without any elimination:

* Wiener: with time increments D_i = t_i - t_{i-1} (t_0 = 0),
  the inverse is the chain tridiagonal built from the weights 1/(c*D_i).
* SS-1: the same chain, built from the exponential-coordinate
  increments delta_i of :func:`stablekern.kernels.stable_increments`,
  which include the increment to the virtual instant t_{n+1} = +inf.

On top of the tridiagonal inverse this module provides an upper
bidiagonal factor F with F.T @ F == inverse(P) (so applying the
precision is two O(n) sweeps) and a closed-form upper-triangular square
root U with U @ U.T == P.

Everything here is exact algebra on the increments; there is no
iteration and no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, SingularGram
from .grid import SamplingGrid
from .kernels import SS1, WIENER, KernelSpec, stable_increments

__all__ = [
    "TridiagonalMatrix",
    "UpperBidiagonal",
    "StructuredSqrt",
    "closed_form_inverse",
    "log_det",
    "precision_factor",
    "sqrt_factor",
    "apply_precision",
    "solve_gram",
]


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix: diagonal plus one shared off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        if self.offdiag.shape != (self.diag.shape[0] - 1,):
            raise DimensionMismatch(
                f"offdiag must have length n-1, got {self.offdiag.shape[0]} for n={self.diag.shape[0]}"
            )

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        out[idx, idx + 1] = self.offdiag
        out[idx + 1, idx] = self.offdiag
        return out


@dataclass(frozen=True, eq=False)
class UpperBidiagonal:
    """Upper bidiagonal matrix: main diagonal plus first superdiagonal."""

    diag: np.ndarray
    super: np.ndarray

    def __post_init__(self) -> None:
        if self.super.shape != (self.diag.shape[0] - 1,):
            raise DimensionMismatch(
                f"super must have length n-1, got {self.super.shape[0]} for n={self.diag.shape[0]}"
            )

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        out[idx, idx + 1] = self.super
        return out


@dataclass(frozen=True, eq=False)
class StructuredSqrt:
    """Upper-triangular square root of a Gram matrix, stored implicitly.

    Only the n reciprocals of the precision-factor diagonal are kept;
    the dense triangle is materialized on demand.  For SS-1 the square
    root is constant down each column, U[i, j] = inv_diag[j] for i <= j;
    for Wiener the column is modulated by the time ratio,
    U[i, j] = (t_i / t_j) * inv_diag[j] for i <= j.
    """

    spec: KernelSpec
    grid: SamplingGrid
    inv_diag: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    def to_dense(self) -> np.ndarray:
        if self.spec.family == WIENER:
            t = self.grid.times
            return np.triu(np.outer(t, self.inv_diag / t))
        return np.triu(np.broadcast_to(self.inv_diag, (self.n, self.n)).copy())


def _increments(spec: KernelSpec, grid: SamplingGrid) -> np.ndarray:
    """Per-kernel chain increments, already scaled by c."""
    if spec.family == WIENER:
        if grid.times[0] == 0.0:
            raise SingularGram("Wiener Gram is singular when t1 = 0")
        return spec.c * np.diff(grid.times, prepend=0.0)
    return spec.c * stable_increments(grid, spec.beta)


def closed_form_inverse(spec: KernelSpec, grid: SamplingGrid) -> TridiagonalMatrix:
    """Tridiagonal inverse of the Gram matrix, in closed form.

    With r_i the reciprocal chain increments, the Wiener inverse has
    diagonal (r_1 + r_2, ..., r_{n-1} + r_n, r_n) and off-diagonal
    (-r_2, ..., -r_n); the SS-1 inverse has diagonal
    (r_1, r_1 + r_2, ..., r_{n-1} + r_n) and off-diagonal
    (-r_1, ..., -r_{n-1}).  The two differ only in which end of the
    chain is anchored.
    """
    r = 1.0 / _increments(spec, grid)
    diag = r.copy()
    if spec.family == WIENER:
        diag[:-1] += r[1:]
        off = -r[1:]
    else:
        diag[1:] += r[:-1]
        off = -r[:-1]
    return TridiagonalMatrix(diag=diag, offdiag=off)


def log_det(spec: KernelSpec, grid: SamplingGrid) -> float:
    """ln det of the Gram matrix: the increments multiply.

    Wiener: ln det = n ln c + ln t_1 + sum ln(t_{k+1} - t_k).
    SS-1:   ln det = n ln c + sum ln(delta_k)  (the last increment
    contributes -beta * t_n exactly).

    Accumulated in the log domain, so grids whose raw determinant
    underflows or overflows a double still evaluate.
    """
    d = _increments(spec, grid)
    return float(np.sum(np.log(d)))


def precision_factor(spec: KernelSpec, grid: SamplingGrid) -> UpperBidiagonal:
    """Upper bidiagonal F with F.T @ F equal to the Gram inverse.

    The diagonal is taken positive, which fixes F uniquely.  For SS-1,
    F(i, i) = -F(i, i+1) = 1/sqrt(c * delta_i) and
    F(n, n) = 1/sqrt(c * delta_n).  For Wiener,
    F(i, i) = sqrt((t_{i+1}/t_i) / (c * (t_{i+1} - t_i))),
    F(i, i+1) = -(t_i/t_{i+1}) * F(i, i), and F(n, n) = 1/sqrt(c * t_n).
    """
    d = _increments(spec, grid)
    if spec.family == SS1:
        diag = 1.0 / np.sqrt(d)
        sup = -diag[:-1]
    else:
        t = grid.times
        diag = np.empty(grid.n)
        diag[:-1] = np.sqrt(t[1:] / (t[:-1] * d[1:]))
        diag[-1] = 1.0 / math.sqrt(spec.c * t[-1])
        sup = -(t[:-1] / t[1:]) * diag[:-1]
    return UpperBidiagonal(diag=diag, super=sup)


def sqrt_factor(spec: KernelSpec, grid: SamplingGrid) -> StructuredSqrt:
    """Closed-form upper-triangular U with U @ U.T equal to the Gram matrix."""
    factor = precision_factor(spec, grid)
    return StructuredSqrt(spec=spec, grid=grid, inv_diag=1.0 / factor.diag)


def apply_precision(factor: UpperBidiagonal, v: np.ndarray) -> np.ndarray:
    """Multiply the Gram inverse into a vector in O(n): F.T @ (F @ v)."""
    x = np.asarray(v, dtype=float)
    if x.shape != (factor.n,):
        raise DimensionMismatch(f"expected a vector of length {factor.n}, got shape {x.shape}")
    u = factor.diag * x
    u[:-1] += factor.super * x[1:]
    out = factor.diag * u
    out[1:] += factor.super * u[:-1]
    return out


def solve_gram(factor: UpperBidiagonal, b: np.ndarray) -> np.ndarray:
    """Solve P x = b given the precision factor of P.

    Because P^{-1} = F.T @ F exactly, the solve is the same two
    bidiagonal sweeps as :func:`apply_precision`; no elimination and no
    fill-in occur.
    """
    return apply_precision(factor, b)
