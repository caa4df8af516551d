"""Paired comparison statistics: win/tie/loss, Wilcoxon signed-rank, mean ranks and cliques."""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from elastika.exceptions import UsageError

__all__ = [
    "PairedAccuracies",
    "WilcoxonResult",
    "RankTable",
    "EXACT_MAX_N",
    "average_ranks",
    "signed_rank_test",
    "wilcoxon_signed_rank",
    "win_tie_loss",
    "mean_ranks",
    "cliques",
]

EXACT_MAX_N = 25


@dataclass(frozen=True)
class PairedAccuracies:
    """Accuracies of two classifiers over the same datasets."""

    names: tuple[str, ...]
    acc_a: np.ndarray
    acc_b: np.ndarray

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        a = np.asarray(self.acc_a, dtype=np.float64)
        b = np.asarray(self.acc_b, dtype=np.float64)
        if len(names) == 0:
            raise UsageError("no paired results")
        if a.shape != (len(names),) or b.shape != (len(names),):
            raise UsageError("every dataset needs exactly one accuracy per classifier")
        if len(set(names)) != len(names):
            raise UsageError("dataset names must be unique")
        if not (np.all((a >= 0) & (a <= 1)) and np.all((b >= 0) & (b <= 1))):
            raise UsageError("accuracies must lie in [0, 1]")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "acc_a", a)
        object.__setattr__(self, "acc_b", b)

    @classmethod
    def from_rows(cls, rows) -> PairedAccuracies:
        rows = list(rows)
        return cls(tuple(r[0] for r in rows), [r[1] for r in rows], [r[2] for r in rows])

    def __len__(self):
        return len(self.names)

    def swapped(self) -> PairedAccuracies:
        return PairedAccuracies(self.names, self.acc_b, self.acc_a)

    @property
    def differences(self) -> np.ndarray:
        return self.acc_a - self.acc_b


@dataclass(frozen=True)
class WilcoxonResult:
    p_value: float
    n_effective: int
    statistic: float  # sum of ranks of the positive differences
    exact: bool


def average_ranks(values) -> np.ndarray:
    """Ascending 1-based ranks; tied values share the mean of their positions.

    >>> average_ranks([3.0, 1.0, 3.0, 2.0]).tolist()
    [3.5, 1.0, 3.5, 2.0]
    """
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v))
    sorted_v = v[order]
    start = 0
    while start < len(v):
        stop = start
        while stop + 1 < len(v) and sorted_v[stop + 1] == sorted_v[start]:
            stop += 1
        ranks[order[start:stop + 1]] = (start + stop) / 2.0 + 1.0
        start = stop + 1
    return ranks


def _exact_p(doubled_ranks: np.ndarray, doubled_stat: int) -> float:
    """Two-sided p from the exact null distribution of the signed-rank sum.

    Works on doubled ranks so averaged ties stay integral. Counts every sign
    assignment whose sum lies at least as far from the centre as observed.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks.astype(np.int64):
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:total + 1 - r]
        counts = counts + shifted
    sums = np.arange(total + 1)
    dev = abs(2 * doubled_stat - total)
    extreme = np.abs(2 * sums - total) >= dev
    return min(1.0, counts[extreme].sum() / float(2 ** len(doubled_ranks)))


def _normal_p(ranks: np.ndarray, stat: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    _, ties = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(ties**3 - ties) / 48.0
    if var <= 0:
        return 1.0
    z = max(abs(stat - mean) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def signed_rank_test(differences) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired differences.

    Zero differences are discarded. Up to 25 remaining differences use the
    exact null distribution; beyond that a normal approximation with
    continuity and tie corrections.

    >>> signed_rank_test([1, 2, 3, 4, 5]).p_value
    0.0625
    """
    d = np.asarray(differences, dtype=np.float64)
    if d.ndim != 1 or len(d) == 0:
        raise UsageError("signed-rank test needs at least one difference")
    if not np.all(np.isfinite(d)):
        raise UsageError("differences must be finite")
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(1.0, 0, 0.0, True)
    ranks = average_ranks(np.abs(d))
    stat = float(ranks[d > 0].sum())
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        return WilcoxonResult(_exact_p(doubled, int(np.rint(2 * stat))), n, stat, True)
    return WilcoxonResult(_normal_p(ranks, stat), n, stat, False)


def wilcoxon_signed_rank(pairs: PairedAccuracies) -> tuple[float, int]:
    """``(p_value, n_effective)`` for the accuracy differences A - B."""
    res = signed_rank_test(pairs.differences)
    return res.p_value, res.n_effective


def win_tie_loss(pairs: PairedAccuracies) -> tuple[int, int, int]:
    """Datasets where A is strictly better, equal, strictly worse."""
    a, b = pairs.acc_a, pairs.acc_b
    return int(np.sum(a > b)), int(np.sum(a == b)), int(np.sum(a < b))


@dataclass(frozen=True)
class RankTable:
    classifiers: tuple[str, ...]
    ranks: np.ndarray  # (n_datasets, k), rank 1 = most accurate
    mean: np.ndarray

    def ordered(self) -> list[tuple[str, float]]:
        """Classifiers from best (lowest mean rank) to worst."""
        order = np.argsort(self.mean, kind="stable")
        return [(self.classifiers[i], float(self.mean[i])) for i in order]


def _as_matrix(matrix) -> np.ndarray:
    try:
        M = np.asarray(matrix, dtype=np.float64)
    except ValueError as exc:  # ragged nested sequences
        raise UsageError("accuracy matrix is ragged") from exc
    if M.ndim != 2:
        raise UsageError("accuracy matrix is ragged")
    if M.shape[0] == 0 or M.shape[1] < 2:
        raise UsageError("need at least one dataset and two classifiers")
    if not np.all(np.isfinite(M)):
        raise UsageError("accuracy matrix has missing entries")
    return M


def mean_ranks(matrix, classifiers=None) -> RankTable:
    """Rank classifiers per dataset (descending accuracy, averaged ties) and average.

    Parameters
    ----------
    matrix : array_like, shape (n_datasets, k)
    classifiers : sequence of str, optional
    """
    M = _as_matrix(matrix)
    k = M.shape[1]
    names = tuple(classifiers) if classifiers is not None else tuple(str(i) for i in range(k))
    if len(names) != k:
        raise UsageError(f"{len(names)} names for {k} classifiers")
    ranks = np.vstack([average_ranks(-row) for row in M])
    return RankTable(names, ranks, ranks.mean(axis=0))


def cliques(matrix, alpha: float = 0.05, classifiers=None) -> list[tuple[str, ...]]:
    """Maximal groups of classifiers that are pairwise not significantly different.

    A pair is joined when its Wilcoxon p-value is at least ``alpha``. Groups
    are returned best mean rank first, members in mean-rank order.
    """
    table = mean_ranks(matrix, classifiers)
    M = _as_matrix(matrix)
    k = M.shape[1]
    graph = nx.Graph()
    graph.add_nodes_from(range(k))
    for i in range(k):
        for j in range(i + 1, k):
            if signed_rank_test(M[:, i] - M[:, j]).p_value >= alpha:
                graph.add_edge(i, j)
    groups = []
    for members in nx.find_cliques(graph):
        members = sorted(members, key=lambda c: (table.mean[c], c))
        groups.append(members)
    groups.sort(key=lambda g: [(table.mean[c], c) for c in g])
    return [tuple(table.classifiers[c] for c in g) for g in groups]
