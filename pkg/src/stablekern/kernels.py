"""Kernel specifications and Gram matrices.

Two covariance kernels are supported on time grids:

* Wiener:  K(t, s) = c * min(t, s)
* SS-1:    K(t, s) = c * min(exp(-beta*t), exp(-beta*s))
                   = c * exp(-beta * max(t, s))

Hyperparameters are the scale c > 0 and, for SS-1, the decay beta > 0.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import InvalidParameter, SingularGram
from .grid import SamplingGrid

__all__ = [
    "WIENER",
    "SS1",
    "KernelSpec",
    "KernelMatrix",
    "kernel_eval",
    "gram",
    "stable_increments",
    "read_kernel_file",
]

WIENER = "wiener"
SS1 = "ss1"
_FAMILIES = (WIENER, SS1)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyperparameters.

    ``beta`` must be supplied exactly when ``family`` is SS-1.  The scale
    ``c`` is strictly positive: c = 0 would make every Gram matrix
    singular, so it is rejected at construction.
    """

    family: str
    c: float
    beta: Optional[float] = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise InvalidParameter(f"unknown kernel family {self.family!r}")
        if not (isinstance(self.c, (int, float)) and math.isfinite(self.c) and self.c > 0):
            raise InvalidParameter(f"kernel scale c must be finite and > 0, got {self.c!r}")
        if self.family == SS1:
            if self.beta is None or not (math.isfinite(self.beta) and self.beta > 0):
                raise InvalidParameter(f"SS-1 kernel needs finite beta > 0, got {self.beta!r}")
        elif self.beta is not None:
            raise InvalidParameter("Wiener kernel takes no beta")

    def to_dict(self) -> dict:
        d = {"family": self.family, "c": float(self.c)}
        if self.family == SS1:
            d["beta"] = float(self.beta)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        if not isinstance(d, dict) or "family" not in d:
            raise InvalidParameter("kernel spec must be an object with a 'family' key")
        known = {"family", "c", "beta"}
        extra = set(d) - known
        if extra:
            raise InvalidParameter(f"unknown kernel spec keys: {sorted(extra)}")
        if "c" not in d:
            raise InvalidParameter("kernel spec is missing 'c'")
        return cls(family=d["family"], c=d["c"], beta=d.get("beta"))


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Gram matrix of a kernel on a grid, exactly symmetric by assembly."""

    grid: SamplingGrid
    values: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    def __repr__(self) -> str:
        return f"KernelMatrix(n={self.n})"


def kernel_eval(spec: KernelSpec, t: float, s: float) -> float:
    """Evaluate K(t, s) at a single pair of times."""
    if spec.family == WIENER:
        return spec.c * min(t, s)
    return spec.c * math.exp(-spec.beta * max(t, s))


def gram(spec: KernelSpec, grid: SamplingGrid) -> KernelMatrix:
    """Assemble the Gram matrix P with P[i, j] = K(t_i, t_j).

    Each unit-scale entry is evaluated once and mirrored, then scaled by
    c, so the result is bit-exact symmetric and satisfies
    ``gram(c) == c * gram(c=1)`` elementwise.

    Raises
    ------
    SingularGram
        For the Wiener family when t1 = 0 (first row and column vanish).
    """
    t = grid.times
    if spec.family == WIENER:
        if t[0] == 0.0:
            raise SingularGram("Wiener Gram is singular when t1 = 0")
        unit = np.minimum(t[:, None], t[None, :])
    else:
        e = np.exp(-spec.beta * t)
        unit = np.minimum(e[:, None], e[None, :])
    values = spec.c * unit
    values.setflags(write=False)
    return KernelMatrix(grid=grid, values=values)


def stable_increments(grid: SamplingGrid, beta: float) -> np.ndarray:
    """Exponential-coordinate increments of the SS-1 kernel on a grid.

    Returns the n positive values

        delta_i = exp(-beta*t_i) - exp(-beta*t_{i+1})   for i < n,
        delta_n = exp(-beta*t_n),

    the last one being the increment down to the virtual instant
    t_{n+1} = +infinity.  The differences are computed as
    exp(-beta*t_i) * (-expm1(-beta*(t_{i+1} - t_i))), which avoids the
    catastrophic cancellation of subtracting two nearly equal
    exponentials when beta*(t_{i+1} - t_i) is small.
    """
    if not (isinstance(beta, (int, float)) and math.isfinite(beta) and beta > 0):
        raise InvalidParameter(f"stable increments need finite beta > 0, got {beta!r}")
    t = grid.times
    e = np.exp(-beta * t)
    out = np.empty(t.shape[0])
    out[:-1] = e[:-1] * -np.expm1(-beta * np.diff(t))
    out[-1] = e[-1]
    return out


def read_kernel_file(path: Union[str, os.PathLike]) -> KernelSpec:
    """Load a KernelSpec from a JSON file like {"family": "ss1", "c": 1.0, "beta": 0.69}."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameter(f"kernel spec file is not valid JSON: {exc}") from None
    return KernelSpec.from_dict(payload)
