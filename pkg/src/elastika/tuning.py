"""Leave-one-out 1-NN tuning of DTW and ADTW jointly over the cost exponent.

For every exponent of a set, a grid of windows (DTW) or penalties (ADTW) is
searched by LOOCV. The winning configuration is picked with a fixed
hierarchy: first the best parameter per exponent, then the median exponent
among the best of those.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from elastika.cost import ExponentSet, SetName, as_exponent, exponent_set
from elastika.data import Dataset, check_seed, check_tuning_gate
from elastika.distances import _kernels as K
from elastika.exceptions import LengthMismatchError, UsageError

__all__ = [
    "DistanceKind",
    "GridEntry",
    "ParamGrid",
    "LOOCVTable",
    "TrainedModel",
    "OMEGA_PAIR_SAMPLES",
    "window_grid",
    "penalty_ratios",
    "estimate_omega_prime",
    "build_grid",
    "loocv_table",
    "per_gamma_champions",
    "select_model",
    "train_plus",
    "predict",
    "classify",
]

OMEGA_PAIR_SAMPLES = 4000


class DistanceKind(str, enum.Enum):
    DTW = "dtw"
    ADTW = "adtw"


@dataclass(frozen=True)
class GridEntry:
    gamma: float
    param: float  # window (int-valued) for DTW, penalty for ADTW
    rank: int  # position within its exponent's parameter list


@dataclass(frozen=True)
class ParamGrid:
    distance_kind: DistanceKind
    exponents: ExponentSet
    per_gamma_count: int
    entries: tuple[GridEntry, ...]
    omega_primes: dict = field(default_factory=dict)

    @property
    def nominal_size(self) -> int:
        """Configurations requested, before duplicate windows are merged."""
        return len(self.exponents) * self.per_gamma_count

    def __len__(self):
        return len(self.entries)

    def for_gamma(self, gamma) -> list[int]:
        return [k for k, e in enumerate(self.entries) if e.gamma == gamma]


@dataclass(frozen=True)
class LOOCVTable:
    correct: np.ndarray  # one count per grid entry
    n: int

    def accuracy(self, k: int) -> Fraction:
        return Fraction(int(self.correct[k]), self.n)


@dataclass(frozen=True)
class TrainedModel:
    distance_kind: DistanceKind
    gamma: float
    param: float
    train_correct: int
    train_size: int
    exponent_set: str
    per_gamma_count: int
    seed: int | None = None
    gammas: tuple[float, ...] = ()

    @property
    def train_accuracy(self) -> Fraction:
        return Fraction(self.train_correct, self.train_size)

    @property
    def window(self) -> int | None:
        if self.distance_kind is not DistanceKind.DTW:
            raise AttributeError("only DTW models have a window")
        return int(self.param)

    def to_dict(self) -> dict:
        grid = {"set": self.exponent_set, "per_gamma_count": self.per_gamma_count}
        if self.exponent_set == SetName.CUSTOM.value:
            grid["gammas"] = list(self.gammas)
        return {
            "distance": self.distance_kind.value,
            "gamma": self.gamma,
            "param": int(self.param) if self.distance_kind is DistanceKind.DTW else self.param,
            "train_accuracy": float(self.train_accuracy),
            "train_correct": self.train_correct,
            "train_size": self.train_size,
            "grid": grid,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> TrainedModel:
        kind = DistanceKind(d["distance"])
        grid = d["grid"]
        return cls(
            distance_kind=kind,
            gamma=float(d["gamma"]),
            param=int(d["param"]) if kind is DistanceKind.DTW else float(d["param"]),
            train_correct=int(d["train_correct"]),
            train_size=int(d["train_size"]),
            exponent_set=grid["set"],
            per_gamma_count=int(grid["per_gamma_count"]),
            seed=d.get("seed"),
            gammas=tuple(grid.get("gammas", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> TrainedModel:
        return cls.from_dict(json.loads(text))


def window_grid(length: int, count: int) -> list[int]:
    """Evenly spaced integer windows over ``[0, L - 2]``, duplicates merged.

    >>> window_grid(12, 100) == list(range(11))
    True
    """
    length, count = int(length), int(count)
    if length < 2:
        raise UsageError(f"window grid needs series of length >= 2, got {length}")
    if count < 1:
        raise UsageError(f"window grid needs at least one value, got {count}")
    if count == 1:
        return [0]
    top = length - 2
    # floor(x + 0.5): round-half-up, independent of banker's rounding
    windows = {math.floor(k * top / (count - 1) + 0.5) for k in range(count)}
    return sorted(windows)


def penalty_ratios(count: int = 100) -> np.ndarray:
    """``(i / count) ** 5`` for ``i = 1..count``, computed as an integer quotient."""
    count = int(count)
    if count < 1:
        raise UsageError("penalty grid needs at least one value")
    return np.array([i**5 / count**5 for i in range(1, count + 1)])


@njit(cache=True)
def _mean_direct(X, first, second, gamma, mode):
    total = 0.0
    for k in range(first.shape[0]):
        total += K.direct_kernel(X[first[k]], X[second[k]], gamma, mode)
    return total / first.shape[0]


def _omega_pairs(n: int, seed: int, samples: int):
    if n * (n - 1) <= samples:
        first, second = np.nonzero(~np.eye(n, dtype=bool))
        return first.astype(np.int64), second.astype(np.int64)
    rng = np.random.default_rng(check_seed(seed))
    first = rng.integers(0, n, size=samples)
    second = rng.integers(0, n - 1, size=samples)
    second = second + (second >= first)
    return first.astype(np.int64), second.astype(np.int64)


def estimate_omega_prime(train: Dataset, gamma, seed: int, samples: int = OMEGA_PAIR_SAMPLES) -> float:
    """Mean direct-alignment cost over random ordered pairs of distinct series.

    Uses every ordered pair when there are no more than ``samples`` of them.
    """
    if len(train) < 2:
        raise UsageError("estimating the penalty scale needs at least two series")
    g = as_exponent(gamma)
    first, second = _omega_pairs(len(train), seed, samples)
    return float(_mean_direct(train.X, first, second, g.gamma, g.mode))


def _as_set(exponents) -> ExponentSet:
    if isinstance(exponents, ExponentSet):
        return exponents
    if isinstance(exponents, (str, SetName)):
        return exponent_set(exponents)
    return ExponentSet.custom(exponents)


def build_grid(train: Dataset, distance_kind, exponents, per_gamma_count: int = 100, seed: int = 0) -> ParamGrid:
    kind = DistanceKind(distance_kind)
    exps = _as_set(exponents)
    entries = []
    omega_primes = {}
    for e in exps:
        if kind is DistanceKind.DTW:
            params = [float(w) for w in window_grid(train.length, per_gamma_count)]
        else:
            op = estimate_omega_prime(train, e, seed)
            omega_primes[e.gamma] = op
            params = [op * r for r in penalty_ratios(per_gamma_count)]
        entries.extend(GridEntry(e.gamma, p, k) for k, p in enumerate(params))
    return ParamGrid(kind, exps, int(per_gamma_count), tuple(entries), omega_primes)


_EMPTY = np.empty(0)


def _kernel_args(kind: DistanceKind, param: float):
    if kind is DistanceKind.DTW:
        return K.KIND_DTW, float(param)
    return K.KIND_ADTW, float(param)


def _nn_correct(D: np.ndarray, y_ref: np.ndarray, y_query: np.ndarray) -> int:
    # argmin returns the first minimum, i.e. the smallest reference index on ties
    nn = np.argmin(D, axis=1)
    return int(np.sum(y_ref[nn] == y_query))


def loocv_table(train: Dataset, grid: ParamGrid) -> LOOCVTable:
    """Leave-one-out 1-NN correct counts for every grid entry."""
    check_tuning_gate(train)
    X = train.X
    correct = np.empty(len(grid), dtype=np.int64)
    for k, entry in enumerate(grid.entries):
        g = as_exponent(entry.gamma)
        kcode, p0 = _kernel_args(grid.distance_kind, entry.param)
        D = K.self_matrix(kcode, X, p0, 0.0, g.gamma, g.mode, _EMPTY)
        correct[k] = _nn_correct(D, train.y, train.y)
    return LOOCVTable(correct, len(train))


def _median_lower(indices):
    return indices[(len(indices) - 1) // 2]


def per_gamma_champions(grid: ParamGrid, table: LOOCVTable) -> dict[float, int]:
    """Best entry index per exponent.

    Ties: the smallest window for DTW, the lower-median penalty for ADTW.
    """
    champions = {}
    for gamma in grid.exponents.gammas:
        idx = grid.for_gamma(gamma)
        best = max(table.correct[k] for k in idx)
        tied = [k for k in idx if table.correct[k] == best]
        if grid.distance_kind is DistanceKind.DTW:
            champions[gamma] = min(tied, key=lambda k: grid.entries[k].param)
        else:
            champions[gamma] = _median_lower(sorted(tied, key=lambda k: grid.entries[k].rank))
    return champions


def _pick_gamma(tied_gammas: list[float]) -> float:
    gs = sorted(tied_gammas)
    if len(gs) % 2 == 1:
        return gs[len(gs) // 2]
    lo, hi = gs[len(gs) // 2 - 1], gs[len(gs) // 2]
    return min((lo, hi), key=lambda g: (abs(g - 1.0), g))


def select_model(grid: ParamGrid, table: LOOCVTable, seed: int | None = None) -> TrainedModel:
    champions = per_gamma_champions(grid, table)
    best = max(table.correct[k] for k in champions.values())
    tied = [g for g, k in champions.items() if table.correct[k] == best]
    gamma = _pick_gamma(tied)
    entry = grid.entries[champions[gamma]]
    return TrainedModel(
        distance_kind=grid.distance_kind,
        gamma=gamma,
        param=entry.param,
        train_correct=int(best),
        train_size=table.n,
        exponent_set=grid.exponents.name.value,
        per_gamma_count=grid.per_gamma_count,
        seed=seed,
        gammas=grid.exponents.gammas,
    )


def train_plus(train: Dataset, distance_kind, exponents="a", per_gamma_count: int = 100, seed: int = 0) -> TrainedModel:
    """Tune the exponent together with the window (DTW) or penalty (ADTW).

    Parameters
    ----------
    train : Dataset
        Training split; every class needs at least two exemplars.
    distance_kind : {"dtw", "adtw"}
    exponents : str, ExponentSet or sequence of float
        ``"a"``, ``"b"``, ``"c"`` or explicit exponents. A single exponent
        gives the fixed-exponent baseline.
    per_gamma_count : int
        Parameter values searched per exponent.
    seed : int
        Seeds the pair sample behind the ADTW penalty scale.
    """
    check_tuning_gate(train)
    grid = build_grid(train, distance_kind, exponents, per_gamma_count, seed)
    return select_model(grid, loocv_table(train, grid), seed=seed)


def predict(model: TrainedModel, train: Dataset, X) -> np.ndarray:
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if X.shape[1] != train.length:
        raise LengthMismatchError(f"query length {X.shape[1]} differs from train length {train.length}")
    g = as_exponent(model.gamma)
    kcode, p0 = _kernel_args(model.distance_kind, model.param)
    D = K.cross_matrix(kcode, X, train.X, p0, 0.0, g.gamma, g.mode, _EMPTY)
    return train.y[np.argmin(D, axis=1)]


def classify(model: TrainedModel, train: Dataset, test: Dataset) -> float:
    """Test accuracy of the 1-NN classifier defined by ``model``."""
    if len(test) == 0:
        raise UsageError("empty test set")
    if test.length != train.length:
        raise LengthMismatchError(f"test length {test.length} differs from train length {train.length}")
    return float(np.mean(predict(model, train, test.X) == test.y))
