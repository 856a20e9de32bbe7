# -*- coding: utf-8 -*-

"""Correctness and Accuracy."""

from typing import Iterable, Sequence, Union

from ..errors import ScoringError
from ..lexicon.transcript import Transcript
from .alignment import AlignmentResult, CostName, align_sequences

__all__ = (
    "accuracy",
    "correctness",
    "score_pairs",
)


def _check(a: AlignmentResult) -> None:
    if a.n == 0:
        raise ScoringError("reference is empty (N = 0)")


def correctness(a: AlignmentResult) -> float:
    """(N - D - S) / N"""
    _check(a)
    return (a.n - a.dels - a.subs) / a.n


def accuracy(a: AlignmentResult) -> float:
    """(N - D - S - I) / N, negative when insertions dominate."""
    _check(a)
    return (a.n - a.dels - a.subs - a.ins) / a.n


def score_pairs(
    pairs: Iterable[tuple[Union[Transcript, Sequence[str]], Union[Transcript, Sequence[str]]]],
    costs: CostName = "unit",
) -> AlignmentResult:
    """Pooled counts of (reference, hypothesis) pairs, one alignment per pair."""
    total = AlignmentResult.empty()
    for ref, hyp in pairs:
        total = total + align_sequences(ref, hyp, costs)
    return total
