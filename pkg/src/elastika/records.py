"""Classifier ids and the append-only JSON-lines store of run records."""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

from elastika import __version__
from elastika.cost import SetName, as_exponent, exponent_set
from elastika.exceptions import ParseError, StorageError, UsageError

__all__ = ["ClassifierId", "RunRecord", "RecordStore", "format_gamma"]

DEFAULT_PER_GAMMA = 100
_ID = re.compile(
    r"^(?P<family>dtw|adtw)"
    r"(?:\^(?P<gamma>[0-9]*\.?[0-9]+(?:e[-+]?[0-9]+)?)|\+(?P<set>[a-z]+))"
    r"(?:_(?P<per>[0-9]+))?$"
)


def format_gamma(gamma: float) -> str:
    """Shortest text that parses back to the same exponent: ``1.0 -> "1"``."""
    text = repr(float(gamma))
    return text[:-2] if text.endswith(".0") else text


@dataclass(frozen=True)
class ClassifierId:
    """``<distance>(^<gamma>|+<set>)(_<per_gamma>)?`` or ``pf`` / ``pf+``.

    >>> ClassifierId.parse("dtw^1_500")
    ClassifierId(family='dtw', gamma=1.0, set_name=None, per_gamma=500)
    >>> str(ClassifierId.parse("adtw+a"))
    'adtw+a'
    """

    family: str
    gamma: float | None = None
    set_name: str | None = None
    per_gamma: int = DEFAULT_PER_GAMMA

    @classmethod
    def parse(cls, text: str) -> ClassifierId:
        text = str(text).strip()
        if text == "pf":
            return cls("pf")
        if text == "pf+":
            return cls("pf", set_name=SetName.A.value)
        m = _ID.match(text)
        if m is None:
            raise UsageError(f"malformed classifier id {text!r}")
        per = int(m["per"]) if m["per"] else DEFAULT_PER_GAMMA
        if per < 1:
            raise UsageError(f"{text!r}: per-exponent grid size must be positive")
        if m["gamma"] is not None:
            return cls(m["family"], gamma=as_exponent(float(m["gamma"])).gamma, per_gamma=per)
        return cls(m["family"], set_name=exponent_set(m["set"]).name.value, per_gamma=per)

    @property
    def is_forest(self) -> bool:
        return self.family == "pf"

    @property
    def exponents(self):
        """Exponent set name or one-element list, as accepted by the tuner."""
        return [self.gamma] if self.gamma is not None else self.set_name

    @property
    def stochastic(self) -> bool:
        return self.family in ("adtw", "pf")

    def __str__(self):
        if self.is_forest:
            return "pf+" if self.set_name else "pf"
        core = f"^{format_gamma(self.gamma)}" if self.gamma is not None else f"+{self.set_name}"
        suffix = f"_{self.per_gamma}" if self.per_gamma != DEFAULT_PER_GAMMA else ""
        return f"{self.family}{core}{suffix}"


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    classifier: str
    model: dict
    test_accuracy: float
    train_seconds: float
    test_seconds: float
    seed: int | None
    version: str = __version__
    noise: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.test_accuracy <= 1.0:
            raise UsageError(f"test accuracy {self.test_accuracy} outside [0, 1]")
        for name in ("train_seconds", "test_seconds"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise UsageError(f"{name} must be a nonnegative time, got {value}")

    @property
    def key(self) -> tuple:
        """Identity used to skip completed work when a sweep resumes."""
        return (self.dataset, self.classifier, self.seed, self.noise)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunRecord:
        d = json.loads(text)
        return cls(**d)


class RecordStore:
    """JSON-lines file; records are only ever appended."""

    def __init__(self, path):
        self.path = Path(path)

    def read(self) -> list[RunRecord]:
        if not self.path.exists():
            return []
        records = []
        try:
            with open(self.path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        records.append(RunRecord.from_json(line))
                    except (ValueError, TypeError) as exc:
                        raise ParseError(f"bad record: {exc}", self.path, lineno) from exc
        except OSError as exc:
            raise StorageError(f"cannot read {self.path}: {exc.strerror or exc}") from exc
        return records

    def completed(self) -> set:
        return {r.key for r in self.read()}

    def append(self, record: RunRecord) -> None:
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"cannot append to {self.path}: {exc.strerror or exc}") from exc
