"""Small synthetic datasets, including the head/tail construction where the best cost exponent flips.

``python -m elastika.synthetic OUT_DIR`` regenerates the bundled copies.
"""

from __future__ import annotations

import argparse
from importlib import resources
from pathlib import Path

import numpy as np

from elastika.data import Dataset, Split, write_ucr_tsv

__all__ = ["head_tail_triplet", "head_tail", "plateaus", "waves", "BUNDLED", "bundled_root", "write_bundled"]

_PATTERN = np.array([0.0, 1.0, -1.0, 1.0, -1.0, 1.0, 0.0])
_TAIL_STEPS = np.arange(1, 25)


def head_tail_triplet() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three series where the nearer neighbour of ``S`` depends on the cost exponent.

    ``S`` has a large oscillating head and a small oscillating tail. ``U``
    copies the head and flattens the tail; ``T`` halves the head and copies
    the tail. Many small tail differences dominate when the exponent is
    below 1, the few large head differences when it is above 1.
    """
    head = 4.0 * _PATTERN
    tail = 0.5 * np.sin(_TAIL_STEPS * np.pi / 2)
    S = np.concatenate([head, tail])
    T = np.concatenate([0.5 * head, tail])
    U = np.concatenate([head, np.zeros_like(tail)])
    return S, T, U


def head_tail(n_per_class: int, seed: int, split: Split = Split.TRAIN) -> Dataset:
    """Two classes sharing random head amplitudes; class 0 keeps a small tail, class 1 is flat."""
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for label in (0, 1):
        for _ in range(n_per_class):
            head = rng.uniform(0.5, 6.0) * _PATTERN
            if label == 0:
                tail = 0.5 * np.sin(_TAIL_STEPS * np.pi / 2 + rng.uniform(-0.3, 0.3))
            else:
                tail = np.zeros(len(_TAIL_STEPS))
            rows.append(np.concatenate([head, tail]) + rng.normal(0.0, 0.05, len(_PATTERN) + len(_TAIL_STEPS)))
            labels.append(label)
    return Dataset("HeadTail", split, np.array(rows), labels)


def plateaus(n_per_class: int, seed: int, split: Split = Split.TRAIN, length: int = 20) -> Dataset:
    """Near-constant series at 0 and at 10; every elastic distance separates them."""
    rng = np.random.default_rng(seed)
    X = np.vstack([np.zeros((n_per_class, length)), np.full((n_per_class, length), 10.0)])
    X = X + rng.uniform(-0.2, 0.2, X.shape)
    return Dataset("Plateaus", split, X, [0] * n_per_class + [1] * n_per_class)


def waves(n_per_class: int, seed: int, split: Split = Split.TRAIN, length: int = 40) -> Dataset:
    """Three sine frequencies with random phase shifts and Gaussian noise."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0 * np.pi, length)
    rows, labels = [], []
    for label in (1, 2, 3):
        for _ in range(n_per_class):
            rows.append(np.sin(label * t + rng.uniform(0.0, 1.0)) + rng.normal(0.0, 0.3, length))
            labels.append(label)
    return Dataset("Waves", split, np.array(rows), labels)


# name -> (generator, train size per class, test size per class, train seed, test seed)
BUNDLED = {
    "HeadTail": (head_tail, 10, 25, 1, 2),
    "Plateaus": (plateaus, 8, 20, 3, 4),
    "Waves": (waves, 6, 15, 5, 6),
}


def bundled_root() -> Path:
    """Directory holding ``<name>/<name>_TRAIN.tsv`` for every bundled dataset."""
    return Path(str(resources.files("elastika") / "datasets"))


def write_bundled(root) -> list[Path]:
    root = Path(root)
    written = []
    for name, (make, n_train, n_test, s_train, s_test) in BUNDLED.items():
        written.append(write_ucr_tsv(make(n_train, s_train, Split.TRAIN), root / name / f"{name}_TRAIN.tsv"))
        written.append(write_ucr_tsv(make(n_test, s_test, Split.TEST), root / name / f"{name}_TEST.tsv"))
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(description="Write the bundled synthetic datasets in UCR layout.")
    parser.add_argument("out", nargs="?", default=str(bundled_root()))
    args = parser.parse_args(argv)
    for path in write_bundled(args.out):
        print(path)


if __name__ == "__main__":
    main()
