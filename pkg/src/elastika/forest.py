"""Proximity forests over eleven elastic distances, optionally sampling the cost exponent.

Each tree node draws a few candidate splitters (a distance, its parameters
and one exemplar per class), keeps the one with the lowest weighted Gini
impurity and routes every item to its nearest exemplar. With ``plus_mode``
the cost exponent of the DTW family and SQED is drawn from an exponent set
at every node; otherwise it is pinned to 2.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from elastika import __version__
from elastika.cost import ExponentSet, as_exponent, exponent_set
from elastika.data import Dataset, check_seed, derivative_rows
from elastika.distances import _kernels as K
from elastika.exceptions import LengthMismatchError, ParseError, UsageError

__all__ = [
    "SplitterKind",
    "GAMMA_AWARE",
    "PFConfig",
    "Splitter",
    "ProximityTree",
    "ProximityForest",
    "gini",
    "weighted_gini",
    "sample_splitter",
    "train_pf",
]

MSM_COSTS = np.geomspace(0.01, 100.0, 100)
TWE_STIFFNESS = (1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 0.01, 0.05, 0.1, 0.5, 1.0)
TWE_PENALTIES = np.linspace(0.0, 0.1, 10)
DEFAULT_GAMMA = 2.0
# rounds of fresh candidates tried before a node that will not split becomes a leaf
MAX_SPLIT_ATTEMPTS = 20


class SplitterKind(str, enum.Enum):
    SQED = "sqed"
    DTW_FULL = "dtw_full"
    DTW_WINDOW = "dtw_window"
    DDTW_FULL = "ddtw_full"
    DDTW_WINDOW = "ddtw_window"
    WDTW = "wdtw"
    DWDTW = "dwdtw"
    LCSS = "lcss"
    ERP = "erp"
    MSM = "msm"
    TWE = "twe"


KINDS = tuple(SplitterKind)
GAMMA_AWARE = frozenset({
    SplitterKind.SQED, SplitterKind.DTW_FULL, SplitterKind.DTW_WINDOW, SplitterKind.DDTW_FULL,
    SplitterKind.DDTW_WINDOW, SplitterKind.WDTW, SplitterKind.DWDTW,
})
DERIVATIVE = frozenset({SplitterKind.DDTW_FULL, SplitterKind.DDTW_WINDOW, SplitterKind.DWDTW})


@dataclass(frozen=True)
class PFConfig:
    num_trees: int = 100
    candidates_per_node: int = 5
    plus_mode: bool = False
    exponent_set: str = "a"
    seed: int = 0

    def __post_init__(self):
        if int(self.num_trees) < 1:
            raise UsageError(f"num_trees must be >= 1, got {self.num_trees}")
        if int(self.candidates_per_node) < 1:
            raise UsageError(f"candidates_per_node must be >= 1, got {self.candidates_per_node}")
        check_seed(self.seed)
        if self.plus_mode:
            exponent_set(self.exponent_set)

    @property
    def exponents(self) -> ExponentSet:
        return exponent_set(self.exponent_set)


@dataclass(frozen=True)
class Splitter:
    kind: SplitterKind
    params: dict
    gamma: float | None
    exemplars: tuple[int, ...]  # training indices, one per class in ascending label order
    labels: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "params": dict(self.params),
            "gamma": self.gamma,
            "exemplars": list(self.exemplars),
            "labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Splitter:
        return cls(SplitterKind(d["kind"]), dict(d["params"]), d["gamma"],
                   tuple(int(i) for i in d["exemplars"]), tuple(int(c) for c in d["labels"]))


@dataclass(frozen=True)
class ProximityTree:
    """Flat node list; node 0 is the root.

    A node is either ``{"leaf": label}`` or ``{"splitter": Splitter, "children": [ids]}``
    with one child per exemplar.
    """

    nodes: tuple

    def to_dict(self) -> dict:
        out = []
        for node in self.nodes:
            if "leaf" in node:
                out.append({"leaf": node["leaf"]})
            else:
                out.append({"splitter": node["splitter"].to_dict(), "children": list(node["children"])})
        return {"nodes": out}

    @classmethod
    def from_dict(cls, d: dict) -> ProximityTree:
        nodes = []
        for node in d["nodes"]:
            if "leaf" in node:
                nodes.append({"leaf": int(node["leaf"])})
            else:
                nodes.append({"splitter": Splitter.from_dict(node["splitter"]),
                              "children": tuple(int(c) for c in node["children"])})
        return cls(tuple(nodes))

    @property
    def depth(self) -> int:
        depth = {0: 0}
        for k, node in enumerate(self.nodes):
            for c in node.get("children", ()):
                depth[c] = depth[k] + 1
        return max(depth.values())


class _Series:
    """Training-set caches shared by every tree."""

    def __init__(self, X: np.ndarray):
        self.X = np.ascontiguousarray(X, dtype=np.float64)
        self.dX = derivative_rows(self.X)
        self.length = self.X.shape[1]
        self.sigma = float(self.X.std())


def gini(class_counts) -> float:
    """Gini impurity ``1 - sum(p_c^2)``.

    >>> gini([2, 1, 1])
    0.625
    """
    counts = np.asarray(class_counts, dtype=np.float64)
    if np.any(counts < 0):
        raise UsageError("class counts must be nonnegative")
    total = counts.sum()
    if total <= 0:
        raise UsageError("gini of an empty node is undefined")
    p = counts / total
    return float(1.0 - np.sum(p * p))


def weighted_gini(branch_labels) -> float:
    """Size-weighted mean impurity of the nonempty branches."""
    sizes = [len(b) for b in branch_labels]
    total = sum(sizes)
    score = 0.0
    for labels, n in zip(branch_labels, sizes):
        if n:
            _, counts = np.unique(labels, return_counts=True)
            score += n / total * gini(counts)
    return score


def _sample_params(kind: SplitterKind, length: int, sigma: float, rng: np.random.Generator) -> dict:
    quarter = length // 4
    if kind in (SplitterKind.DTW_WINDOW, SplitterKind.DDTW_WINDOW):
        return {"window": int(rng.integers(0, quarter + 1))}
    if kind in (SplitterKind.WDTW, SplitterKind.DWDTW):
        return {"g": float(rng.uniform(0.0, 1.0))}
    if kind is SplitterKind.LCSS:
        return {"epsilon": float(rng.uniform(sigma / 5, sigma)), "window": int(rng.integers(0, quarter + 1))}
    if kind is SplitterKind.ERP:
        return {"gap": float(rng.uniform(sigma / 5, sigma)), "window": int(rng.integers(0, quarter + 1))}
    if kind is SplitterKind.MSM:
        return {"c": float(MSM_COSTS[rng.integers(len(MSM_COSTS))])}
    if kind is SplitterKind.TWE:
        nu = TWE_STIFFNESS[rng.integers(len(TWE_STIFFNESS))]
        lam = TWE_PENALTIES[rng.integers(len(TWE_PENALTIES))]
        return {"nu": float(nu), "lam": float(lam)}
    return {}


def sample_splitter(train: Dataset, items, config: PFConfig, rng: np.random.Generator,
                    sigma: float | None = None) -> Splitter:
    """Draw a random splitter for the training items at a node.

    Parameters
    ----------
    train : Dataset
    items : array of int
        Training indices at the node; at least two classes must be present.
    config : PFConfig
    rng : numpy.random.Generator
    sigma : float, optional
        Standard deviation of all training values; computed when omitted.
    """
    items = np.asarray(items, dtype=np.int64)
    labels = train.y[items]
    classes = np.unique(labels)
    if len(classes) < 2:
        raise UsageError("a node with a single class is a leaf, not a split")
    if sigma is None:
        sigma = float(train.X.std())
    kind = KINDS[rng.integers(len(KINDS))]
    params = _sample_params(kind, train.length, sigma, rng)
    gamma = None
    if kind in GAMMA_AWARE:
        if config.plus_mode:
            gammas = config.exponents.gammas
            gamma = float(gammas[rng.integers(len(gammas))])
        else:
            gamma = DEFAULT_GAMMA
    exemplars = []
    for c in classes:
        members = items[labels == c]
        exemplars.append(int(members[rng.integers(len(members))]))
    return Splitter(kind, params, gamma, tuple(exemplars), tuple(int(c) for c in classes))


def _kernel_call(sp: Splitter, length: int):
    """``(kind code, p0, p1, gamma, mode, weights, uses_derivative)`` for the batch kernels."""
    g = as_exponent(sp.gamma if sp.gamma is not None else 1.0)
    weights = np.empty(0)
    p0, p1 = 0.0, 0.0
    kind = sp.kind
    if kind is SplitterKind.SQED:
        code = K.KIND_SQED
    elif kind in (SplitterKind.DTW_FULL, SplitterKind.DDTW_FULL):
        code, p0 = K.KIND_DTW, -1.0
    elif kind in (SplitterKind.DTW_WINDOW, SplitterKind.DDTW_WINDOW):
        code, p0 = K.KIND_DTW, float(sp.params["window"])
    elif kind in (SplitterKind.WDTW, SplitterKind.DWDTW):
        code = K.KIND_WDTW
        weights = K.wdtw_weights(length, float(sp.params["g"]))
    elif kind is SplitterKind.LCSS:
        code, p0, p1 = K.KIND_LCSS, float(sp.params["epsilon"]), float(sp.params["window"])
    elif kind is SplitterKind.ERP:
        code, p0, p1 = K.KIND_ERP, float(sp.params["gap"]), float(sp.params["window"])
    elif kind is SplitterKind.MSM:
        code, p0 = K.KIND_MSM, float(sp.params["c"])
    else:
        code, p0, p1 = K.KIND_TWE, float(sp.params["nu"]), float(sp.params["lam"])
    return code, p0, p1, g.gamma, g.mode, weights, kind in DERIVATIVE


def _route(sp: Splitter, queries: np.ndarray, dqueries: np.ndarray, ref: _Series) -> np.ndarray:
    """Branch index per query: the nearest exemplar, the first one on ties."""
    code, p0, p1, gamma, mode, weights, deriv = _kernel_call(sp, ref.length)
    ex = np.asarray(sp.exemplars, dtype=np.int64)
    A, B = (dqueries, ref.dX[ex]) if deriv else (queries, ref.X[ex])
    D = K.cross_matrix(code, np.ascontiguousarray(A), np.ascontiguousarray(B), p0, p1, gamma, mode, weights)
    return np.argmin(D, axis=1)


def _majority(labels) -> int:
    values, counts = np.unique(labels, return_counts=True)
    return int(values[np.argmax(counts)])  # np.unique sorts, so ties go to the smallest label


def _grow_tree(train: Dataset, ref: _Series, config: PFConfig, rng: np.random.Generator) -> ProximityTree:
    nodes: list = []
    stack = [(np.arange(len(train), dtype=np.int64), 0)]
    nodes.append(None)
    while stack:
        items, slot = stack.pop()
        labels = train.y[items]
        if len(np.unique(labels)) == 1 or np.all(ref.X[items] == ref.X[items[0]]):
            nodes[slot] = {"leaf": _majority(labels)}
            continue
        best = None
        for _ in range(MAX_SPLIT_ATTEMPTS):
            for _ in range(config.candidates_per_node):
                sp = sample_splitter(train, items, config, rng, sigma=ref.sigma)
                branch = _route(sp, ref.X[items], ref.dX[items], ref)
                score = weighted_gini([labels[branch == b] for b in range(len(sp.exemplars))])
                if best is None or score < best[0]:
                    best = (score, sp, branch)
            if np.max(np.bincount(best[2], minlength=len(best[1].exemplars))) < len(items):
                break
        else:
            nodes[slot] = {"leaf": _majority(labels)}
            continue
        _, sp, branch = best
        children = []
        for b in range(len(sp.exemplars)):
            child_items = items[branch == b]
            child = len(nodes)
            children.append(child)
            if len(child_items) == 0:
                nodes.append({"leaf": sp.labels[b]})
            else:
                nodes.append(None)
                stack.append((child_items, child))
        nodes[slot] = {"splitter": sp, "children": tuple(children)}
    return ProximityTree(tuple(nodes))


@dataclass(frozen=True)
class ProximityForest:
    config: PFConfig
    trees: tuple[ProximityTree, ...]
    train: Dataset = field(repr=False, compare=False)

    @property
    def _ref(self) -> _Series:
        ref = self.__dict__.get("_ref_cache")
        if ref is None:
            ref = _Series(self.train.X)
            object.__setattr__(self, "_ref_cache", ref)
        return ref

    def tree_predictions(self, X) -> np.ndarray:
        """Label predicted by every tree, shape ``(num_trees, n_queries)``."""
        Q = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        if Q.shape[1] != self.train.length:
            raise LengthMismatchError(f"query length {Q.shape[1]} differs from train length {self.train.length}")
        dQ = derivative_rows(Q)
        ref = self._ref
        out = np.empty((len(self.trees), Q.shape[0]), dtype=np.int64)
        for t, tree in enumerate(self.trees):
            stack = [(0, np.arange(Q.shape[0]))]
            while stack:
                k, idx = stack.pop()
                node = tree.nodes[k]
                if "leaf" in node:
                    out[t, idx] = node["leaf"]
                    continue
                branch = _route(node["splitter"], Q[idx], dQ[idx], ref)
                for b, child in enumerate(node["children"]):
                    sel = idx[branch == b]
                    if len(sel):
                        stack.append((child, sel))
        return out

    def predict(self, X) -> np.ndarray:
        """Majority vote over trees; ties go to the smallest label."""
        votes = self.tree_predictions(X)
        return np.array([_majority(votes[:, q]) for q in range(votes.shape[1])], dtype=np.int64)

    def score(self, test: Dataset) -> float:
        if len(test) == 0:
            raise UsageError("empty test set")
        return float(np.mean(self.predict(test.X) == test.y))

    def to_dict(self) -> dict:
        return {
            "format": "elastika-forest",
            "version": __version__,
            "config": asdict(self.config),
            "train": {"name": self.train.name, "size": len(self.train), "length": self.train.length},
            "trees": [t.to_dict() for t in self.trees],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict, train: Dataset) -> ProximityForest:
        if d.get("format") != "elastika-forest":
            raise ParseError("not a serialized proximity forest")
        meta = d["train"]
        if meta["size"] != len(train) or meta["length"] != train.length:
            raise UsageError(
                f"forest was trained on {meta['size']} series of length {meta['length']}, "
                f"got {len(train)} of length {train.length}"
            )
        trees = tuple(ProximityTree.from_dict(t) for t in d["trees"])
        for tree in trees:
            for node in tree.nodes:
                if "splitter" in node:
                    sp = node["splitter"]
                    if any(train.y[i] != c for i, c in zip(sp.exemplars, sp.labels)):
                        raise UsageError("training labels do not match the serialized forest")
        return cls(PFConfig(**d["config"]), trees, train)

    @classmethod
    def from_json(cls, text: str, train: Dataset) -> ProximityForest:
        return cls.from_dict(json.loads(text), train)


def train_pf(train: Dataset, config: PFConfig | None = None) -> ProximityForest:
    """Grow a proximity forest; trees draw from independent seeded substreams.

    Examples
    --------
    >>> import numpy as np
    >>> from elastika.data import Dataset, Split
    >>> ds = Dataset("toy", Split.TRAIN, np.array([[0.0] * 4, [0.1] * 4, [9.0] * 4, [9.1] * 4]), [0, 0, 1, 1])
    >>> train_pf(ds, PFConfig(num_trees=3, seed=1)).predict([[8.5] * 4]).tolist()
    [1]
    """
    config = config or PFConfig()
    if len(train) == 0:
        raise UsageError("cannot train a forest on an empty dataset")
    ref = _Series(train.X)
    streams = np.random.SeedSequence(check_seed(config.seed)).spawn(config.num_trees)
    trees = tuple(_grow_tree(train, ref, config, np.random.default_rng(s)) for s in streams)
    forest = ProximityForest(config, trees, train)
    object.__setattr__(forest, "_ref_cache", ref)
    return forest
