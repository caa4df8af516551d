"""DTW-family distances parameterised by the cost exponent.

Paths are reported with 0-based indices: a full path runs from ``(0, 0)`` to
``(L - 1, L - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from elastika.cost import as_exponent
from elastika.data import as_series, derivative_transform
from elastika.distances import _kernels as K
from elastika.exceptions import LengthMismatchError, UsageError

__all__ = [
    "AlignmentResult",
    "UNLIMITED",
    "normalize_window",
    "dtw",
    "dtw_cells",
    "adtw",
    "direct_alignment",
    "wdtw",
    "wdtw_weights",
    "ddtw",
    "dwdtw",
    "path_cost",
]

UNLIMITED = None


@dataclass(frozen=True)
class AlignmentResult:
    value: float
    path: tuple[tuple[int, int], ...] | None = None

    def __float__(self):
        return self.value


def _pair(S, T):
    s = as_series(S)
    t = as_series(T)
    if s.shape != t.shape:
        raise LengthMismatchError(f"series lengths differ: {s.shape[0]} vs {t.shape[0]}")
    return s, t


def normalize_window(w, length: int) -> int | None:
    """Clamp a warping window to ``[0, L - 2]``; anything wider is unconstrained.

    Returns ``None`` for an unconstrained window.
    """
    if w is None:
        return None
    if isinstance(w, float):
        if math.isinf(w) and w > 0:
            return None
        if not w.is_integer():
            raise UsageError(f"warping window must be an integer, got {w!r}")
    w = int(w)
    if w < 0:
        raise UsageError(f"warping window must be nonnegative, got {w}")
    if w > length - 2:
        return None
    return w


def _band(w, length):
    w = normalize_window(w, length)
    return -1 if w is None else w


def _backtrack(m, omega):
    """Recover a path from a cumulative matrix with +inf borders.

    Ties prefer the diagonal, then ``(i-1, j)``, then ``(i, j-1)``.
    """
    i = j = m.shape[0] - 1
    path = [(i - 1, j - 1)]
    while (i, j) != (1, 1):
        diag = m[i - 1, j - 1]
        up = m[i - 1, j] + omega
        left = m[i, j - 1] + omega
        if diag <= up and diag <= left:
            i, j = i - 1, j - 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
        path.append((i - 1, j - 1))
    return tuple(reversed(path))


def dtw(S, T, w=UNLIMITED, gamma=1.0, want_path: bool = False) -> AlignmentResult:
    """Dynamic time warping restricted to the band ``|i - j| <= w``.

    Parameters
    ----------
    S, T : array-like
        Series of equal length ``L``.
    w : int or None
        Warping window. ``None`` (or any value above ``L - 2``) leaves the
        alignment unconstrained; ``0`` is the direct alignment.
    gamma : float or CostExponent
        Cost exponent of the pointwise cost ``|a - b| ** gamma``.
    want_path : bool
        Also recover an optimal warping path.
    """
    s, t = _pair(S, T)
    g = as_exponent(gamma)
    band = _band(w, s.shape[0])
    if not want_path:
        value, _ = K.dtw_kernel(s, t, band, g.gamma, g.mode)
        return AlignmentResult(float(value))
    m = K.dtw_matrix(s, t, band, g.gamma, g.mode)
    return AlignmentResult(float(m[-1, -1]), _backtrack(m, 0.0))


def dtw_cells(S, T, w=UNLIMITED, gamma=1.0) -> int:
    """Number of matrix cells the banded kernel evaluates."""
    s, t = _pair(S, T)
    g = as_exponent(gamma)
    return int(K.dtw_kernel(s, t, _band(w, s.shape[0]), g.gamma, g.mode)[1])


def _check_penalty(omega) -> float:
    omega = float(omega)
    if not math.isfinite(omega) or omega < 0:
        raise UsageError(f"penalty must be a nonnegative finite real, got {omega!r}")
    return omega


def adtw(S, T, omega: float, gamma=1.0, want_path: bool = False) -> AlignmentResult:
    """Amerced DTW: unconstrained warping, each off-diagonal step costs ``omega`` extra."""
    s, t = _pair(S, T)
    g = as_exponent(gamma)
    omega = _check_penalty(omega)
    if not want_path:
        return AlignmentResult(float(K.adtw_kernel(s, t, omega, g.gamma, g.mode)))
    m = K.adtw_matrix(s, t, omega, g.gamma, g.mode)
    return AlignmentResult(float(m[-1, -1]), _backtrack(m, omega))


def direct_alignment(S, T, gamma=1.0) -> float:
    """Sum of pointwise costs along the diagonal (also the SQED^gamma distance)."""
    s, t = _pair(S, T)
    g = as_exponent(gamma)
    return float(K.direct_kernel(s, t, g.gamma, g.mode))


def wdtw_weights(length: int, g: float) -> np.ndarray:
    """Logistic weights indexed by ``|i - j|`` with maximum weight 1."""
    return K.wdtw_weights(int(length), float(g))


def _check_g(g) -> float:
    g = float(g)
    if not math.isfinite(g) or g < 0:
        raise UsageError(f"WDTW weight factor must be a nonnegative real, got {g!r}")
    return g


def wdtw(S, T, g: float, gamma=1.0) -> float:
    """Weighted DTW: each aligned pair's cost is scaled by a logistic weight of ``|i - j|``."""
    s, t = _pair(S, T)
    ge = as_exponent(gamma)
    weights = wdtw_weights(s.shape[0], _check_g(g))
    return float(K.wdtw_kernel(s, t, weights, ge.gamma, ge.mode))


def ddtw(S, T, w=UNLIMITED, gamma=1.0) -> float:
    s, t = _pair(S, T)
    return dtw(derivative_transform(s), derivative_transform(t), w, gamma).value


def dwdtw(S, T, g: float, gamma=1.0) -> float:
    s, t = _pair(S, T)
    return wdtw(derivative_transform(s), derivative_transform(t), g, gamma)


def path_cost(S, T, path, gamma=1.0) -> float:
    """Sum of pointwise costs over the aligned pairs of ``path``."""
    s, t = _pair(S, T)
    g = as_exponent(gamma)
    a = np.array([s[i] for i, _ in path])
    b = np.array([t[j] for _, j in path])
    return float(K.direct_kernel(a, b, g.gamma, g.mode))
