# -*- coding: utf-8 -*-

"""Cross-validation Folds.

Each fold draws its test lines afresh without replacement, so folds may
share test lines; they are repeated random splits, not a partition.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ExperimentError

__all__ = (
    "FoldSpec",
    "make_folds",
)


@dataclass(frozen=True)
class FoldSpec:
    fold_id: int
    test_lines: tuple[int, ...]
    train_lines: tuple[int, ...]

    def __post_init__(self) -> None:
        if set(self.test_lines) & set(self.train_lines):
            raise ExperimentError(f"fold {self.fold_id}: train and test lines overlap")


def make_folds(n_lines: int = 108, n_test: int = 42, n_folds: int = 5, seed: int = 42) -> list[FoldSpec]:
    """`n_folds` seeded random splits of `n_lines` lines into test and train."""
    if n_lines < 2 or not 0 < n_test < n_lines:
        raise ExperimentError(f"need 0 < n_test < n_lines, got n_test={n_test}, n_lines={n_lines}")
    if n_folds < 1:
        raise ExperimentError(f"need at least one fold, got {n_folds}")
    rng = np.random.default_rng(seed)
    folds = []
    for fold_id in range(n_folds):
        test = sorted(int(k) for k in rng.choice(n_lines, size=n_test, replace=False))
        chosen = set(test)
        train = [k for k in range(n_lines) if k not in chosen]
        folds.append(FoldSpec(fold_id, tuple(test), tuple(train)))
    return folds
