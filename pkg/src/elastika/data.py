"""Datasets of equal-length labelled series: UCR TSV I/O, noise, derivatives."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from elastika.exceptions import (
    EmptyDatasetError,
    ParseError,
    SeriesTooShortError,
    SingletonClassError,
    UsageError,
    VariableLengthError,
)

__all__ = [
    "Split",
    "Dataset",
    "as_series",
    "check_seed",
    "load_ucr_tsv",
    "write_ucr_tsv",
    "load_split",
    "load_pair",
    "check_tuning_gate",
    "add_noise",
    "derivative_transform",
    "derivative_rows",
]


class Split(str, enum.Enum):
    TRAIN = "TRAIN"
    TEST = "TEST"


def check_seed(seed) -> int:
    """Validate a 64-bit unsigned seed."""
    try:
        value = int(seed)
    except (TypeError, ValueError):
        raise UsageError(f"seed must be an integer, got {seed!r}") from None
    if value != seed or not 0 <= value < 2**64:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return value


def as_series(values) -> np.ndarray:
    s = np.ascontiguousarray(values, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] < 1:
        raise UsageError("a series is a non-empty 1-d sequence of reals")
    if not np.isfinite(s).all():
        raise UsageError("series values must be finite")
    return s


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable labelled collection of series sharing one length.

    ``X`` has shape ``(n_series, length)``; ``y`` holds integer labels.
    """

    name: str
    split: Split
    X: np.ndarray
    y: np.ndarray
    classes: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.int64, copy=True)
        if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
            raise EmptyDatasetError(f"dataset {self.name!r} has no series")
        if y.shape != (X.shape[0],):
            raise UsageError("one label per series is required")
        if not np.isfinite(X).all():
            raise UsageError(f"dataset {self.name!r} contains non-finite values")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "split", Split(self.split))
        object.__setattr__(self, "classes", tuple(sorted(int(c) for c in set(y.tolist()))))

    def __len__(self):
        return self.X.shape[0]

    @property
    def length(self) -> int:
        return self.X.shape[1]

    def items(self):
        return list(zip(self.X, self.y.tolist()))

    def class_counts(self) -> dict[int, int]:
        return dict(sorted(Counter(self.y.tolist()).items()))

    def replace(self, **changes) -> Dataset:
        fields = {"name": self.name, "split": self.split, "X": self.X, "y": self.y}
        fields.update(changes)
        return Dataset(**fields)


def _parse_label(token: str, path, lineno) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"label {token!r} is not numeric", path, lineno) from None
    if not math.isfinite(value) or value != int(value):
        raise ParseError(f"label {token!r} is not integer-valued", path, lineno)
    return int(value)


def load_ucr_tsv(path, name: str | None = None, split: Split | str | None = None) -> Dataset:
    """Read a UCR-style TSV file: one series per line, label first.

    Name and split default to what the ``<name>_<SPLIT>.tsv`` file name says.
    """
    path = Path(path)
    stem = path.stem
    if name is None or split is None:
        head, _, tail = stem.rpartition("_")
        guess_split = Split.TEST if tail.upper() == "TEST" else Split.TRAIN
        name = name if name is not None else (head or stem)
        split = split if split is not None else guess_split

    labels, rows = [], []
    length = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise ParseError("expected a label followed by at least one value", path, lineno)
            label = _parse_label(fields[0], path, lineno)
            try:
                values = [float(v) for v in fields[1:]]
            except ValueError as exc:
                raise ParseError(f"non-numeric value ({exc})", path, lineno) from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError("non-finite value", path, lineno)
            if length is None:
                length = len(values)
            elif len(values) != length:
                raise VariableLengthError(
                    f"{path}:{lineno}: series of length {len(values)} in a dataset of length {length}"
                )
            labels.append(label)
            rows.append(values)
    if not rows:
        raise EmptyDatasetError("no series found", path)
    return Dataset(name=name, split=split, X=np.array(rows), y=np.array(labels))


def write_ucr_tsv(ds: Dataset, path) -> Path:
    """Write ``ds`` in UCR TSV format; values use shortest round-trip repr."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for series, label in zip(ds.X, ds.y.tolist()):
            fh.write("\t".join([str(int(label))] + [repr(float(v)) for v in series]))
            fh.write("\n")
    return path


def load_split(root, name: str, split: Split | str) -> Dataset:
    split = Split(str(split).upper() if not isinstance(split, Split) else split)
    return load_ucr_tsv(Path(root) / name / f"{name}_{split.value}.tsv", name=name, split=split)


def load_pair(root, name: str) -> tuple[Dataset, Dataset]:
    train = load_split(root, name, Split.TRAIN)
    test = load_split(root, name, Split.TEST)
    if train.length != test.length:
        raise VariableLengthError(
            f"{name}: train length {train.length} differs from test length {test.length}"
        )
    return train, test


def check_tuning_gate(ds: Dataset) -> Dataset:
    """Reject training sets where a class has a single exemplar."""
    singletons = [c for c, n in ds.class_counts().items() if n < 2]
    if singletons:
        raise SingletonClassError(
            f"{ds.name}: classes {singletons} have only one training exemplar"
        )
    return ds


def add_noise(ds: Dataset, scale: float, seed: int) -> Dataset:
    """Add ``scale * N(0, sigma_s)`` to every value, per-series population sigma."""
    scale = float(scale)
    if not math.isfinite(scale) or scale < 0:
        raise UsageError(f"noise scale must be a nonnegative real, got {scale!r}")
    if scale == 0.0:
        return ds.replace()
    rng = np.random.default_rng(check_seed(seed))
    sigma = ds.X.std(axis=1, ddof=0)
    noise = rng.standard_normal(ds.X.shape)
    X = np.where(sigma[:, None] > 0, ds.X + scale * sigma[:, None] * noise, ds.X)
    return ds.replace(X=X)


def derivative_transform(s) -> np.ndarray:
    """Slope estimate averaging the left difference and the centred half-difference.

    Endpoints copy the nearest interior value so the output keeps the input length.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1:
        raise UsageError("derivative_transform expects a 1-d series")
    if s.shape[0] < 3:
        raise SeriesTooShortError(f"derivative needs at least 3 points, got {s.shape[0]}")
    return derivative_rows(s[None, :])[0]


def derivative_rows(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] < 3:
        raise SeriesTooShortError(f"derivative needs at least 3 points, got {X.shape[1]}")
    out = np.empty_like(X)
    prev, cur, nxt = X[:, :-2], X[:, 1:-1], X[:, 2:]
    out[:, 1:-1] = ((cur - prev) + (nxt - prev) / 2.0) / 2.0
    out[:, 0] = out[:, 1]
    out[:, -1] = out[:, -2]
    return out
