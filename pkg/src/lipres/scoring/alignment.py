# -*- coding: utf-8 -*-

"""Minimum Edit Distance Alignment of Label Sequences."""

from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Union

import numpy as np

from ..errors import ScoringError
from ..lexicon.transcript import Transcript

__all__ = (
    "COSTS",
    "AlignmentResult",
    "align_sequences",
    "edit_cost",
)

CostName = Literal["unit", "htk", "indel"]
# (substitution, insertion, deletion)
COSTS: dict[str, tuple[int, int, int]] = {
    "unit": (1, 1, 1),
    "htk": (10, 7, 7),
    "indel": (2, 1, 1),
}

Pair = tuple[Optional[str], Optional[str]]


@dataclass(frozen=True)
class AlignmentResult:
    """Counts of one alignment; `pairs` holds (reference, hypothesis) with None for a gap."""

    n: int
    hits: int
    subs: int
    dels: int
    ins: int
    pairs: tuple[Pair, ...] = ()
    cost: int = 0

    def __post_init__(self) -> None:
        if min(self.n, self.hits, self.subs, self.dels, self.ins) < 0:
            raise ScoringError("alignment counts must be non-negative")
        if self.n != self.hits + self.subs + self.dels:
            raise ScoringError(f"N={self.n} differs from H+S+D={self.hits + self.subs + self.dels}")

    @property
    def hyp_length(self) -> int:
        return self.hits + self.subs + self.ins

    def __add__(self, other: "AlignmentResult") -> "AlignmentResult":
        return AlignmentResult(
            n=self.n + other.n,
            hits=self.hits + other.hits,
            subs=self.subs + other.subs,
            dels=self.dels + other.dels,
            ins=self.ins + other.ins,
            pairs=self.pairs + other.pairs,
            cost=self.cost + other.cost,
        )

    @classmethod
    def empty(cls) -> "AlignmentResult":
        return cls(0, 0, 0, 0, 0)


def _tokens(seq: Union[Transcript, Sequence[str]]) -> tuple[str, ...]:
    return seq.tokens if isinstance(seq, Transcript) else tuple(seq)


def _costs(costs: Union[CostName, tuple[int, int, int]]) -> tuple[int, int, int]:
    if isinstance(costs, str):
        try:
            return COSTS[costs]
        except KeyError:
            raise ScoringError(f"unknown cost scheme `{costs}`, expected one of {sorted(COSTS)}") from None
    return costs


def edit_cost(
    ref: Union[Transcript, Sequence[str]],
    hyp: Union[Transcript, Sequence[str]],
    costs: Union[CostName, tuple[int, int, int]] = "unit",
) -> int:
    """Minimum total edit cost only."""
    sub, ins, dele = _costs(costs)
    r, h = _tokens(ref), _tokens(hyp)
    prev = np.arange(len(h) + 1, dtype=np.int64) * ins
    for i in range(1, len(r) + 1):
        row = np.empty_like(prev)
        row[0] = i * dele
        for j in range(1, len(h) + 1):
            diag = prev[j - 1] + (0 if r[i - 1] == h[j - 1] else sub)
            row[j] = min(diag, prev[j] + dele, row[j - 1] + ins)
        prev = row
    return int(prev[-1])


def align_sequences(
    ref: Union[Transcript, Sequence[str]],
    hyp: Union[Transcript, Sequence[str]],
    costs: Union[CostName, tuple[int, int, int]] = "unit",
) -> AlignmentResult:
    """Align `hyp` against `ref`.

    Among alignments of minimal cost the one with more hits wins, then the
    one with fewer substitutions, then the one placing insertions earliest.

    Parameters:
        :ref:reference labels;
        :hyp:recognised labels;
        :costs:`unit`, `htk`, `indel` or explicit (substitution, insertion, deletion) costs;
    """
    sub, ins, dele = _costs(costs)
    r, h = _tokens(ref), _tokens(hyp)
    rows, cols = len(r) + 1, len(h) + 1
    # key per cell: (cost, -hits, subs); move 0 diagonal, 1 deletion, 2 insertion
    key: list[list[tuple[int, int, int]]] = [[(0, 0, 0)] * cols for _ in range(rows)]
    move = [[-1] * cols for _ in range(rows)]
    for i in range(1, rows):
        key[i][0] = (i * dele, 0, 0)
        move[i][0] = 1
    for j in range(1, cols):
        key[0][j] = (j * ins, 0, 0)
        move[0][j] = 2
    for i in range(1, rows):
        for j in range(1, cols):
            c, nh, s = key[i - 1][j - 1]
            hit = r[i - 1] == h[j - 1]
            options = [
                (c, nh - 1, s) if hit else (c + sub, nh, s + 1),
                (key[i - 1][j][0] + dele, key[i - 1][j][1], key[i - 1][j][2]),
                (key[i][j - 1][0] + ins, key[i][j - 1][1], key[i][j - 1][2]),
            ]
            best = min(range(3), key=lambda k: (options[k], k))
            key[i][j] = options[best]
            move[i][j] = best

    pairs: list[Pair] = []
    counts = {"hits": 0, "subs": 0, "dels": 0, "ins": 0}
    i, j = rows - 1, cols - 1
    while i > 0 or j > 0:
        step = move[i][j]
        if step == 0:
            counts["hits" if r[i - 1] == h[j - 1] else "subs"] += 1
            pairs.append((r[i - 1], h[j - 1]))
            i, j = i - 1, j - 1
        elif step == 1:
            counts["dels"] += 1
            pairs.append((r[i - 1], None))
            i -= 1
        else:
            counts["ins"] += 1
            pairs.append((None, h[j - 1]))
            j -= 1
    pairs.reverse()
    return AlignmentResult(n=len(r), pairs=tuple(pairs), cost=key[-1][-1][0], **counts)
