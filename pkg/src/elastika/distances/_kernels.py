"""Numba dynamic-programming kernels.

All kernels take contiguous float64 arrays of equal length. Bands are
integers; a negative band means unconstrained. Kernels never allocate shared
state, so callers may evaluate pairs concurrently.
"""

import math

import numpy as np
from numba import njit, prange

from elastika.cost import pointwise

INF = np.inf

KIND_SQED = 0
KIND_DTW = 1
KIND_ADTW = 2
KIND_WDTW = 3
KIND_LCSS = 4
KIND_ERP = 5
KIND_MSM = 6
KIND_TWE = 7


@njit(cache=True, inline="always")
def _effective_band(band, n):
    if band < 0 or band > n - 2:
        return n
    return band


@njit(cache=True)
def direct_kernel(s, t, gamma, mode):
    total = 0.0
    for i in range(s.shape[0]):
        total = total + pointwise(s[i], t[i], gamma, mode)
    return total


@njit(cache=True)
def dtw_kernel(s, t, band, gamma, mode):
    """Banded DTW; returns ``(value, cells_evaluated)``."""
    n = s.shape[0]
    w = _effective_band(band, n)
    prev = np.full(n + 1, INF)
    cur = np.full(n + 1, INF)
    prev[0] = 0.0
    cells = 0
    for i in range(1, n + 1):
        jlo = max(1, i - w)
        jhi = min(n, i + w)
        cur[jlo - 1] = INF
        si = s[i - 1]
        for j in range(jlo, jhi + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = pointwise(si, t[j - 1], gamma, mode) + best
            cells += 1
        if jhi < n:
            cur[jhi + 1] = INF
        prev, cur = cur, prev
    return prev[n], cells


@njit(cache=True)
def dtw_matrix(s, t, band, gamma, mode):
    n = s.shape[0]
    w = _effective_band(band, n)
    m = np.full((n + 1, n + 1), INF)
    m[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(max(1, i - w), min(n, i + w) + 1):
            best = m[i - 1, j - 1]
            if m[i - 1, j] < best:
                best = m[i - 1, j]
            if m[i, j - 1] < best:
                best = m[i, j - 1]
            m[i, j] = pointwise(s[i - 1], t[j - 1], gamma, mode) + best
    return m


@njit(cache=True)
def adtw_kernel(s, t, omega, gamma, mode):
    n = s.shape[0]
    prev = np.full(n + 1, INF)
    cur = np.full(n + 1, INF)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[0] = INF
        si = s[i - 1]
        for j in range(1, n + 1):
            c = pointwise(si, t[j - 1], gamma, mode)
            best = prev[j - 1] + c
            v = (prev[j] + c) + omega
            if v < best:
                best = v
            v = (cur[j - 1] + c) + omega
            if v < best:
                best = v
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


@njit(cache=True)
def adtw_matrix(s, t, omega, gamma, mode):
    n = s.shape[0]
    m = np.full((n + 1, n + 1), INF)
    m[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            c = pointwise(s[i - 1], t[j - 1], gamma, mode)
            best = m[i - 1, j - 1] + c
            v = (m[i - 1, j] + c) + omega
            if v < best:
                best = v
            v = (m[i, j - 1] + c) + omega
            if v < best:
                best = v
            m[i, j] = best
    return m


@njit(cache=True)
def wdtw_weights(n, g):
    out = np.empty(n)
    half = n / 2.0
    for d in range(n):
        out[d] = 1.0 / (1.0 + math.exp(-g * (d - half)))
    return out


@njit(cache=True)
def wdtw_kernel(s, t, weights, gamma, mode):
    n = s.shape[0]
    prev = np.full(n + 1, INF)
    cur = np.full(n + 1, INF)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[0] = INF
        si = s[i - 1]
        for j in range(1, n + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = weights[abs(i - j)] * pointwise(si, t[j - 1], gamma, mode) + best
        prev, cur = cur, prev
    return prev[n]


@njit(cache=True)
def lcss_kernel(s, t, epsilon, band):
    n = s.shape[0]
    w = n if band < 0 else band
    prev = np.zeros(n + 1, dtype=np.int64)
    cur = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = 0
        si = s[i - 1]
        for j in range(1, n + 1):
            if abs(i - j) <= w and abs(si - t[j - 1]) <= epsilon:
                cur[j] = prev[j - 1] + 1
            elif prev[j] >= cur[j - 1]:
                cur[j] = prev[j]
            else:
                cur[j] = cur[j - 1]
        prev, cur = cur, prev
    return 1.0 - prev[n] / n


@njit(cache=True)
def erp_kernel(s, t, gap, band):
    n = s.shape[0]
    w = n if band < 0 else band
    prev = np.full(n + 1, INF)
    cur = np.full(n + 1, INF)
    prev[0] = 0.0
    for j in range(1, min(n, w) + 1):
        prev[j] = prev[j - 1] + abs(t[j - 1] - gap)
    for i in range(1, n + 1):
        for j in range(n + 1):
            cur[j] = INF
        if i <= w:
            cur[0] = prev[0] + abs(s[i - 1] - gap)
        gs = abs(s[i - 1] - gap)
        for j in range(max(1, i - w), min(n, i + w) + 1):
            best = prev[j - 1] + abs(s[i - 1] - t[j - 1])
            v = prev[j] + gs
            if v < best:
                best = v
            v = cur[j - 1] + abs(t[j - 1] - gap)
            if v < best:
                best = v
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


@njit(cache=True, inline="always")
def _msm_split_merge(x, y, z, c):
    if (y <= x <= z) or (z <= x <= y):
        return c
    return c + min(abs(x - y), abs(x - z))


@njit(cache=True)
def msm_kernel(s, t, c):
    n = s.shape[0]
    prev = np.empty(n)
    cur = np.empty(n)
    prev[0] = abs(s[0] - t[0])
    for j in range(1, n):
        prev[j] = prev[j - 1] + _msm_split_merge(t[j], s[0], t[j - 1], c)
    for i in range(1, n):
        cur[0] = prev[0] + _msm_split_merge(s[i], s[i - 1], t[0], c)
        for j in range(1, n):
            best = prev[j - 1] + abs(s[i] - t[j])
            v = prev[j] + _msm_split_merge(s[i], s[i - 1], t[j], c)
            if v < best:
                best = v
            v = cur[j - 1] + _msm_split_merge(t[j], s[i], t[j - 1], c)
            if v < best:
                best = v
            cur[j] = best
        prev, cur = cur, prev
    return prev[n - 1]


@njit(cache=True)
def twe_kernel(s, t, nu, lam):
    n = s.shape[0]
    prev = np.full(n + 1, INF)
    cur = np.full(n + 1, INF)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[0] = INF
        si = s[i - 1]
        sp = s[i - 2] if i > 1 else 0.0
        del_s = (abs(si - sp) + nu) + lam
        for j in range(1, n + 1):
            tj = t[j - 1]
            tp = t[j - 2] if j > 1 else 0.0
            best = ((prev[j - 1] + abs(si - tj)) + abs(sp - tp)) + nu * (2.0 * abs(i - j))
            v = prev[j] + del_s
            if v < best:
                best = v
            v = cur[j - 1] + ((abs(tj - tp) + nu) + lam)
            if v < best:
                best = v
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


@njit(cache=True)
def distance_by_kind(kind, s, t, p0, p1, gamma, mode, weights):
    if kind == KIND_SQED:
        return direct_kernel(s, t, gamma, mode)
    if kind == KIND_DTW:
        return dtw_kernel(s, t, np.int64(p0), gamma, mode)[0]
    if kind == KIND_ADTW:
        return adtw_kernel(s, t, p0, gamma, mode)
    if kind == KIND_WDTW:
        return wdtw_kernel(s, t, weights, gamma, mode)
    if kind == KIND_LCSS:
        return lcss_kernel(s, t, p0, np.int64(p1))
    if kind == KIND_ERP:
        return erp_kernel(s, t, p0, np.int64(p1))
    if kind == KIND_MSM:
        return msm_kernel(s, t, p0)
    return twe_kernel(s, t, p0, p1)


@njit(cache=True, parallel=True)
def self_matrix(kind, X, p0, p1, gamma, mode, weights):
    """Symmetric pairwise matrix over the rows of ``X``; diagonal set to +inf."""
    n = X.shape[0]
    out = np.empty((n, n))
    for i in prange(n):
        out[i, i] = INF
        for j in range(i + 1, n):
            d = distance_by_kind(kind, X[i], X[j], p0, p1, gamma, mode, weights)
            out[i, j] = d
            out[j, i] = d
    return out


@njit(cache=True, parallel=True)
def cross_matrix(kind, A, B, p0, p1, gamma, mode, weights):
    out = np.empty((A.shape[0], B.shape[0]))
    for i in prange(A.shape[0]):
        for j in range(B.shape[0]):
            out[i, j] = distance_by_kind(kind, A[i], B[j], p0, p1, gamma, mode, weights)
    return out
