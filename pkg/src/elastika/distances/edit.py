"""Edit-family distances used by the forest: LCSS, ERP, MSM and TWE.

These keep their own cost definitions; the cost exponent does not apply.
"""

from __future__ import annotations

import math

from elastika.distances import _kernels as K
from elastika.distances.warping import _pair
from elastika.exceptions import UsageError

__all__ = ["lcss", "erp", "msm", "twe"]


def _nonneg(name, value) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise UsageError(f"{name} must be a nonnegative finite real, got {value!r}")
    return value


def _window(window) -> int:
    if window is None:
        return -1
    w = int(window)
    if w != window or w < 0:
        raise UsageError(f"window must be a nonnegative integer or None, got {window!r}")
    return w


def lcss(S, T, epsilon: float, window=None) -> float:
    """``1 - LCSS / L`` where points match when within ``epsilon`` and ``|i - j| <= window``."""
    s, t = _pair(S, T)
    epsilon = _nonneg("epsilon", epsilon)
    if epsilon == 0:
        raise UsageError("LCSS epsilon must be strictly positive")
    return float(K.lcss_kernel(s, t, epsilon, _window(window)))


def erp(S, T, g_value: float = 0.0, window=None) -> float:
    """Edit distance with real penalty; a gap costs ``|x - g_value|``."""
    s, t = _pair(S, T)
    g_value = float(g_value)
    if not math.isfinite(g_value):
        raise UsageError("ERP gap value must be finite")
    return float(K.erp_kernel(s, t, g_value, _window(window)))


def msm(S, T, c: float) -> float:
    """Move-split-merge with split/merge cost ``c``."""
    s, t = _pair(S, T)
    return float(K.msm_kernel(s, t, _nonneg("MSM cost", c)))


def twe(S, T, nu: float, lam: float) -> float:
    """Time warp edit distance with stiffness ``nu`` and deletion penalty ``lam``."""
    s, t = _pair(S, T)
    return float(K.twe_kernel(s, t, _nonneg("TWE nu", nu), _nonneg("TWE lambda", lam)))
