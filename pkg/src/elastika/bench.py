"""Microbenchmarks: fast-path cost evaluation and banded DTW cell counts."""

from __future__ import annotations

import time

import numpy as np

from elastika.cost import costs
from elastika.distances import dtw_cells

__all__ = ["fast_path_speedups", "cell_counts"]


def _best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def fast_path_speedups(size: int = 10**6, repeats: int = 5, seed: int = 0) -> dict:
    """Best-of-``repeats`` seconds for each fast path against the general power.

    Returns ``{gamma: {"fast": s, "general": s, "speedup": ratio}}`` with
    string keys so the result serializes to JSON directly.
    """
    rng = np.random.default_rng(seed)
    a = rng.uniform(-10.0, 10.0, size)
    b = rng.uniform(-10.0, 10.0, size)
    out = {}
    for gamma in (0.5, 1.0, 2.0):
        costs(a[:8], b[:8], gamma)  # compile before timing
        costs(a[:8], b[:8], gamma, fast_path=False)
        fast = _best_of(lambda: costs(a, b, gamma), repeats)
        general = _best_of(lambda: costs(a, b, gamma, fast_path=False), repeats)
        out[repr(gamma)] = {"fast": fast, "general": general, "speedup": general / fast}
    return out


def cell_counts(length: int = 256, windows=(0, 1, 4, 16, 64), seed: int = 0) -> list[dict]:
    """Cells evaluated by banded DTW next to the ``(2w + 1) * L`` bound."""
    rng = np.random.default_rng(seed)
    s, t = rng.normal(size=(2, length))
    rows = []
    for w in windows:
        if w > length - 2:
            continue
        rows.append({"window": w, "cells": dtw_cells(s, t, w), "bound": (2 * w + 1) * length})
    rows.append({"window": None, "cells": dtw_cells(s, t, None), "bound": length * length})
    return rows
