# -*- coding: utf-8 -*-

"""Embedded Baum-Welch Re-estimation and Silence Tying."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Optional, Sequence

import numpy as np
from loguru import logger
from scipy.special import logsumexp

from ..errors import HmmError
from ..lexicon.visemes import SHORT_PAUSE, SILENCE
from .graph import GraphBuilder, StateGraph
from .model import Gmm, Hmm, HmmSet, tee_transitions
from .observation import ObservationSequence

__all__ = (
    "baum_welch",
    "label_graph",
    "tie_silence",
)


def label_graph(hmms: HmmSet, labels: Sequence[str]) -> StateGraph:
    """Models of `labels` in sequence, summed over every path."""
    builder = GraphBuilder()
    last = builder.chain([hmms[label] for label in labels], builder.start)
    builder.arc(last, builder.end)
    return builder.compile("sum")


@dataclass
class _GmmStats:
    occupancy: np.ndarray
    first: np.ndarray
    second: np.ndarray

    def add(self, other: "_GmmStats") -> None:
        self.occupancy += other.occupancy
        self.first += other.first
        self.second += other.second


@dataclass
class _Stats:
    log_likelihood: float = 0.0
    frames: int = 0
    gmms: dict[int, _GmmStats] = field(default_factory=dict)
    transitions: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, other: "_Stats") -> None:
        self.log_likelihood += other.log_likelihood
        self.frames += other.frames
        for key, stats in other.gmms.items():
            if key in self.gmms:
                self.gmms[key].add(stats)
            else:
                self.gmms[key] = stats
        for label, counts in other.transitions.items():
            if label in self.transitions:
                self.transitions[label] += counts
            else:
                self.transitions[label] = counts.copy()


def _accumulate(hmms: HmmSet, obs: ObservationSequence, labels: Sequence[str], index: int) -> Optional[_Stats]:
    """Occupancy statistics of one utterance, None when it cannot be aligned."""
    need = sum(hmms[label].min_frames() for label in labels)
    if len(obs) < need:
        logger.warning("utterance {}: {} frames, transcript needs {}; skipped", index, len(obs), need)
        return None
    graph = label_graph(hmms, labels)
    frames = obs.frames
    emissions = graph.emissions(frames)
    alpha, total = graph.forward(emissions)
    if not np.isfinite(total):
        logger.warning("utterance {}: zero likelihood; skipped", index)
        return None
    beta, _ = graph.backward(emissions)
    gamma = np.exp(alpha + beta - total)

    stats = _Stats(log_likelihood=total, frames=len(obs))
    members: dict[int, list[int]] = {}
    for s, gmm in enumerate(graph.gmms):
        members.setdefault(id(gmm), []).append(s)
    for key, states in members.items():
        gmm = graph.gmms[states[0]]
        occ = gamma[:, states].sum(axis=1)
        comp = gmm.component_log_likelihood(frames)
        post = np.exp(comp - logsumexp(comp, axis=1, keepdims=True)) * occ[:, None]
        stats.gmms[key] = _GmmStats(post.sum(axis=0), post.T @ frames, post.T @ frames**2)

    for label in dict.fromkeys(labels):
        size = hmms[label].transitions.shape[0]
        stats.transitions[label] = np.zeros((size, size))

    def credit(weight: float, parts: list, arc_logp: float) -> None:
        for part in parts:
            share = weight * float(np.exp(part.logp - arc_logp))
            for label, i, j in part.prims:
                stats.transitions[label][i, j] += share

    for s in range(graph.n_states):
        if np.isfinite(graph.init[s]):
            credit(float(np.exp(graph.init[s] + emissions[0, s] + beta[0, s] - total)), graph.init_parts[s], graph.init[s])
        if np.isfinite(graph.final[s]):
            credit(float(np.exp(alpha[-1, s] + graph.final[s] - total)), graph.final_parts[s], graph.final[s])
    if len(obs) > 1 and graph.src.shape[0]:
        xi = alpha[:-1, graph.src] + graph.logp + emissions[1:, graph.dst] + beta[1:, graph.dst] - total
        weights = np.exp(xi).sum(axis=0)
        for a, weight in enumerate(weights.tolist()):
            if weight > 0:
                credit(weight, graph.parts[a], float(graph.logp[a]))
    return stats


def _update_gmm(gmm: Gmm, stats: _GmmStats, floor: np.ndarray) -> None:
    total = float(stats.occupancy.sum())
    if total <= 0:
        return
    used = stats.occupancy > 0
    means = gmm.means.copy()
    variances = gmm.variances.copy()
    occ = stats.occupancy[used][:, None]
    means[used] = stats.first[used] / occ
    variances[used] = np.maximum(stats.second[used] / occ - means[used] ** 2, floor)
    gmm.weights = stats.occupancy / total
    gmm.means = means
    gmm.variances = variances


def _update_transitions(hmm: Hmm, counts: np.ndarray) -> None:
    trans = hmm.transitions.copy()
    rows = counts.sum(axis=1)
    for i in range(trans.shape[0] - 1):
        if rows[i] > 0:
            trans[i] = counts[i] / rows[i]
    hmm.transitions = trans
    hmm.check()


def baum_welch(
    hmms: HmmSet,
    data: Sequence[tuple[ObservationSequence, Sequence[str]]],
    iterations: int = 1,
    workers: int = 1,
) -> HmmSet:
    """Embedded re-estimation over label transcripts, `iterations` times.

    Returns a new set; the input is left untouched. The total log-likelihood
    of every pass (before its update) is appended to `history`.
    """
    result = hmms.copy()
    if iterations <= 0:
        return result
    missing = sorted({label for _, labels in data for label in labels} - set(result.labels))
    if missing:
        raise HmmError(f"transcripts use labels without a model: {missing}")

    for iteration in range(iterations):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(
                    pool.map(
                        _accumulate,
                        repeat(result),
                        [obs for obs, _ in data],
                        [labels for _, labels in data],
                        range(len(data)),
                    )
                )
        else:
            parts = [_accumulate(result, obs, labels, k) for k, (obs, labels) in enumerate(data)]
        total = _Stats()
        for part in parts:
            if part is not None:
                total.add(part)
        if total.frames == 0:
            raise HmmError("no utterance could be aligned to its transcript")

        for gmm in result.gmms():
            if id(gmm) in total.gmms:
                _update_gmm(gmm, total.gmms[id(gmm)], result.var_floor)
        for label, counts in total.transitions.items():
            _update_transitions(result[label], counts)
        result.history.append(total.log_likelihood)
        logger.debug(
            "re-estimation pass {}: log-likelihood {:.4f} over {} frames",
            iteration + 1,
            total.log_likelihood,
            total.frames,
        )
    return result


def tie_silence(hmms: HmmSet, enter: float = 0.7, self_loop: float = 0.6) -> HmmSet:
    """Add the short-pause tee model sharing the centre state of silence."""
    if SILENCE not in hmms:
        raise HmmError(f"silence model `{SILENCE}` missing")
    result = hmms.copy()
    silence = result[SILENCE]
    centre = silence.n_emitting // 2
    result.models[SHORT_PAUSE] = Hmm(SHORT_PAUSE, tee_transitions(enter, self_loop), [silence.states[centre]])
    result.tied.append(((SILENCE, centre), (SHORT_PAUSE, 0)))
    return result
