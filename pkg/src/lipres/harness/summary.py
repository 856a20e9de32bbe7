# -*- coding: utf-8 -*-

"""Fold Aggregation.

Mean correctness and accuracy per (talker, resolution, network, feature)
with one standard error (sample std over folds divided by the square root
of the fold count), and the error-type table split at a lip height
threshold, per talker.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import SummaryError
from ..imaging.image import Resolution
from .experiment import SweepRow

__all__ = (
    "BreakdownRow",
    "SummaryRow",
    "error_breakdown",
    "summarize",
)

LIP_HEIGHT_SPLIT = 4.0


@dataclass(frozen=True)
class SummaryRow:
    talker: str
    resolution: Resolution
    lip_height_px: float
    network: str
    feature: str
    n_folds: int
    mean_correctness: float
    stderr_correctness: float
    mean_accuracy: float
    stderr_accuracy: float


@dataclass(frozen=True)
class BreakdownRow:
    """Mean error rates, each divided by N, over every row of one lip height band."""

    talker: str
    band: str
    network: str
    feature: str
    n_rows: int
    insertions: float
    deletions: float
    substitutions: float


def _stderr(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def summarize(rows: Sequence[SweepRow]) -> list[SummaryRow]:
    """One row per cell, in first-seen order of the sweep rows."""
    if not rows:
        raise SummaryError("no results to summarise")
    cells: dict[tuple[str, str, str, str], list[SweepRow]] = {}
    for row in rows:
        cells.setdefault((row.talker, str(row.resolution), row.network, row.feature), []).append(row)

    result = []
    for (talker, resolution, network, feature), members in cells.items():
        if len(members) < 2:
            raise SummaryError(
                f"cell {talker}/{resolution}/{network}/{feature} has {len(members)} fold, the standard error needs two"
            )
        c = np.array([m.correctness for m in members])
        a = np.array([m.accuracy for m in members])
        result.append(
            SummaryRow(
                talker,
                members[0].resolution,
                members[0].lip_height_px,
                network,
                feature,
                len(members),
                float(c.mean()),
                _stderr(c),
                float(a.mean()),
                _stderr(a),
            )
        )
    return result


def _nearest(rows: Sequence[SweepRow], split: float) -> set[float]:
    """The lip heights just at or above and just below `split`."""
    heights = {r.lip_height_px for r in rows}
    above = [h for h in heights if h >= split]
    below = [h for h in heights if h < split]
    return ({min(above)} if above else set()) | ({max(below)} if below else set())


def error_breakdown(
    rows: Sequence[SweepRow],
    split: float = LIP_HEIGHT_SPLIT,
    adjacent: bool = False,
) -> list[BreakdownRow]:
    """Mean I/N, D/N and S/N per talker, network and feature, above and below `split` pixels.

    With `adjacent`, each band holds only the resolution nearest to the
    split on its side (per talker) instead of pooling the whole side.
    """
    if not rows:
        raise SummaryError("no results to break down")
    bands = (f">={split:g}px", f"<{split:g}px")
    talkers = list(dict.fromkeys(r.talker for r in rows))
    keep = {t: _nearest([r for r in rows if r.talker == t], split) for t in talkers} if adjacent else None

    groups: dict[tuple[str, str, str, str], list[SweepRow]] = {}
    for row in rows:
        if keep is not None and row.lip_height_px not in keep[row.talker]:
            continue
        band = bands[0] if row.lip_height_px >= split else bands[1]
        groups.setdefault((row.talker, band, row.network, row.feature), []).append(row)

    result = []
    networks = list(dict.fromkeys(r.network for r in rows))
    features = list(dict.fromkeys(r.feature for r in rows))
    for talker in talkers:
        for band in bands:
            for network in networks:
                for feature in features:
                    members = groups.get((talker, band, network, feature))
                    if not members:
                        continue
                    n = np.array([m.n for m in members], dtype=np.float64)
                    result.append(
                        BreakdownRow(
                            talker,
                            band,
                            network,
                            feature,
                            len(members),
                            float(np.mean([m.ins for m in members] / n)),
                            float(np.mean([m.dels for m in members] / n)),
                            float(np.mean([m.subs for m in members] / n)),
                        )
                    )
    return result
