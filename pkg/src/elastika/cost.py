"""Pointwise alignment cost ``|a - b| ** gamma`` and the named exponent grids."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from elastika.exceptions import DomainError, UsageError

__all__ = [
    "FastPath",
    "CostExponent",
    "ExponentSet",
    "SetName",
    "cost",
    "costs",
    "exponent_set",
    "as_exponent",
]


class FastPath(enum.IntEnum):
    """Evaluation route for ``|d| ** gamma``. Values double as kernel mode codes."""

    SQRT = 0
    ABS = 1
    SQUARE = 2
    GENERAL_POW = 3


@dataclass(frozen=True)
class CostExponent:
    gamma: float

    def __post_init__(self):
        g = float(self.gamma)
        if not math.isfinite(g) or g <= 0.0:
            raise DomainError(f"cost exponent must be a positive finite real, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)

    @property
    def fast_path(self) -> FastPath:
        if self.gamma == 0.5:
            return FastPath.SQRT
        if self.gamma == 1.0:
            return FastPath.ABS
        if self.gamma == 2.0:
            return FastPath.SQUARE
        return FastPath.GENERAL_POW

    @property
    def mode(self) -> int:
        return int(self.fast_path)

    def __float__(self):
        return self.gamma


def as_exponent(gamma) -> CostExponent:
    if isinstance(gamma, CostExponent):
        return gamma
    return CostExponent(float(gamma))


class SetName(str, enum.Enum):
    A = "a"
    B = "b"
    C = "c"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ExponentSet:
    """An ordered grid of cost exponents.

    Reciprocal members are stored as the double ``1.0 / n`` once; membership
    tests compare these stored values and never re-derive them.
    """

    name: SetName
    exponents: tuple[CostExponent, ...]

    def __post_init__(self):
        if not self.exponents:
            raise UsageError("an exponent set needs at least one exponent")
        gammas = [e.gamma for e in self.exponents]
        if any(b <= a for a, b in zip(gammas, gammas[1:])):
            raise UsageError(f"exponents must be strictly increasing: {gammas}")

    @classmethod
    def custom(cls, gammas) -> ExponentSet:
        return cls(SetName.CUSTOM, tuple(as_exponent(g) for g in gammas))

    @property
    def gammas(self) -> tuple[float, ...]:
        return tuple(e.gamma for e in self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __contains__(self, item):
        g = item.gamma if isinstance(item, CostExponent) else float(item)
        return g in self.gammas


_SETS = {
    SetName.A: (1.0 / 2, 1.0 / 1.5, 1.0, 1.5, 2.0),
    SetName.B: (1.0 / 5, 1.0 / 4, 1.0 / 3, 1.0 / 2, 1.0 / 1.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0),
    SetName.C: (1.0 / 2, 1.0 / 1.75, 1.0 / 1.5, 1.0 / 1.25, 1.0, 1.25, 1.5, 1.75, 2.0),
}


def exponent_set(name) -> ExponentSet:
    """Return one of the named grids ``"a"``, ``"b"`` or ``"c"``."""
    try:
        key = SetName(str(name.value if isinstance(name, SetName) else name).lower())
    except ValueError:
        raise UsageError(f"unknown exponent set {name!r}; expected one of a, b, c") from None
    if key is SetName.CUSTOM:
        raise UsageError("custom sets are built with ExponentSet.custom()")
    return ExponentSet(key, tuple(CostExponent(g) for g in _SETS[key]))


@njit(cache=True, inline="always")
def pointwise(a, b, gamma, mode):
    d = abs(a - b)
    if mode == 0:
        return math.sqrt(d)
    if mode == 1:
        return d
    if mode == 2:
        return d * d
    return d**gamma


def cost(a: float, b: float, gamma) -> float:
    """``|a - b| ** gamma`` for finite reals ``a`` and ``b``."""
    g = as_exponent(gamma)
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"cost needs finite inputs, got ({a!r}, {b!r})")
    d = abs(a - b)
    path = g.fast_path
    if path is FastPath.SQRT:
        return math.sqrt(d)
    if path is FastPath.ABS:
        return d
    if path is FastPath.SQUARE:
        return d * d
    return d**g.gamma


@njit(cache=True)
def _costs_kernel(a, b, gamma, mode, out):
    for i in range(a.shape[0]):
        out[i] = pointwise(a[i], b[i], gamma, mode)
    return out


def costs(a, b, gamma, *, fast_path: bool = True) -> np.ndarray:
    """Elementwise cost of two equal-length arrays.

    ``fast_path=False`` forces the general power routine even for the
    exponents that have a specialised evaluation.
    """
    g = as_exponent(gamma)
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise UsageError("costs expects two 1-d arrays of equal length")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise DomainError("costs needs finite inputs")
    mode = g.mode if fast_path else int(FastPath.GENERAL_POW)
    return _costs_kernel(a, b, g.gamma, mode, np.empty_like(a))
