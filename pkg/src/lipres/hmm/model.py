# -*- coding: utf-8 -*-

"""Left-to-right GMM-HMMs.

`Gmm` objects are mutable and may be shared between states; a shared
object is how tying is represented, so re-estimation touches it once.
"""

import copy
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from loguru import logger
from scipy.special import logsumexp

from ..errors import HmmError
from .observation import ObservationSequence

__all__ = (
    "Gmm",
    "Hmm",
    "HmmSet",
    "flat_start",
    "left_to_right",
    "mixture_offsets",
    "tee_transitions",
)

LOG_2PI = float(np.log(2.0 * np.pi))
# variance floor relative to the global variance, and its absolute minimum
VAR_FLOOR_SCALE = 1e-6
MIN_VARIANCE = 1e-10


@dataclass(eq=False)
class Gmm:
    """Diagonal-covariance Gaussian mixture."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        self.means = np.array(self.means, dtype=np.float64, ndmin=2)
        self.variances = np.array(self.variances, dtype=np.float64, ndmin=2)
        k = self.weights.shape[0]
        if self.means.shape[0] != k or self.means.shape != self.variances.shape:
            raise HmmError(f"mixture shapes disagree: {k} weights, means {self.means.shape}")
        if abs(float(self.weights.sum()) - 1.0) > 1e-9 or np.any(self.weights < 0):
            raise HmmError("mixture weights must be non-negative and sum to 1")
        if np.any(self.variances <= 0):
            raise HmmError("mixture variances must be positive")

    @property
    def n_components(self) -> int:
        return int(self.weights.shape[0])

    @property
    def dim(self) -> int:
        return int(self.means.shape[1])

    def component_log_likelihood(self, frames: np.ndarray) -> np.ndarray:
        """log w_k + log N(x_t; mu_k, var_k) as a (T, K) array."""
        diff = frames[:, None, :] - self.means[None, :, :]
        const = self.dim * LOG_2PI + np.sum(np.log(self.variances), axis=1)
        with np.errstate(divide="ignore"):
            log_w = np.log(self.weights)
        return log_w - 0.5 * (const + np.sum(diff**2 / self.variances, axis=2))

    def log_likelihood(self, frames: np.ndarray) -> np.ndarray:
        return logsumexp(self.component_log_likelihood(frames), axis=1)


@dataclass(eq=False)
class Hmm:
    """One model: (n+2)^2 transitions with non-emitting entry (0) and exit (n+1)."""

    label: str
    transitions: np.ndarray
    states: list[Gmm]

    def __post_init__(self) -> None:
        self.transitions = np.array(self.transitions, dtype=np.float64)
        n = len(self.states)
        if n == 0 or self.transitions.shape != (n + 2, n + 2):
            raise HmmError(f"{self.label}: {n} states need a {(n + 2, n + 2)} transition matrix")
        self.check()

    def check(self) -> None:
        trans = self.transitions
        if np.any(trans < 0):
            raise HmmError(f"{self.label}: negative transition probability")
        if np.any(np.tril(trans, -1) > 0) or trans[0, 0] > 0:
            raise HmmError(f"{self.label}: transitions must run left to right")
        if np.any(trans[-1] != 0):
            raise HmmError(f"{self.label}: exit state has outgoing transitions")
        rows = trans[:-1].sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-9):
            raise HmmError(f"{self.label}: transition rows must sum to 1")

    @property
    def n_emitting(self) -> int:
        return len(self.states)

    @property
    def is_tee(self) -> bool:
        return bool(self.transitions[0, -1] > 0)

    def min_frames(self) -> int:
        """Fewest frames any path through the model emits."""
        n = self.n_emitting
        best = [0] + [np.iinfo(np.int64).max] * (n + 1)
        for j in range(1, n + 2):
            step = 1 if j <= n else 0
            for i in range(j):
                if self.transitions[i, j] > 0 and best[i] < np.iinfo(np.int64).max:
                    best[j] = min(best[j], best[i] + step)
        return int(best[n + 1])


@dataclass(eq=False)
class HmmSet:
    """Models by label, the tying groups and the training log-likelihood history.

    A tying group lists `(label, state)` members that share one `Gmm`.
    """

    models: dict[str, Hmm]
    var_floor: np.ndarray
    tied: list[tuple[tuple[str, int], ...]] = field(default_factory=list)
    history: list[float] = field(default_factory=list)

    def __getitem__(self, label: str) -> Hmm:
        try:
            return self.models[label]
        except KeyError:
            raise HmmError(f"no model for label `{label}`") from None

    def __contains__(self, label: str) -> bool:
        return label in self.models

    @property
    def labels(self) -> list[str]:
        return list(self.models)

    @property
    def dim(self) -> int:
        return int(self.var_floor.shape[0])

    def gmms(self) -> list[Gmm]:
        """Distinct mixtures in model and state order."""
        seen: dict[int, Gmm] = {}
        for hmm in self.models.values():
            for gmm in hmm.states:
                seen.setdefault(id(gmm), gmm)
        return list(seen.values())

    def ties_hold(self) -> bool:
        return all(
            len({id(self.models[label].states[state]) for label, state in group}) == 1 for group in self.tied
        )

    def copy(self) -> "HmmSet":
        """Deep copy that keeps shared mixtures shared."""
        return copy.deepcopy(self)


def left_to_right(n_states: int, self_loop: float = 0.6) -> np.ndarray:
    """Entry -> first state, self `self_loop`, next `1 - self_loop`."""
    trans = np.zeros((n_states + 2, n_states + 2))
    trans[0, 1] = 1.0
    for i in range(1, n_states + 1):
        trans[i, i] = self_loop
        trans[i, i + 1] = 1.0 - self_loop
    return trans


def mixture_offsets(n_mixtures: int) -> np.ndarray:
    """0, +0.2, -0.2, +0.4, -0.4, ... in units of the global std."""
    k = np.arange(n_mixtures)
    return 0.2 * ((k + 1) // 2) * np.where(k % 2 == 1, 1.0, -1.0)


def flat_start(
    data: Sequence[ObservationSequence],
    labels: Sequence[str],
    n_states: int = 5,
    n_mixtures: int = 5,
    self_loop: float = 0.6,
    var_floor_scale: float = VAR_FLOOR_SCALE,
) -> HmmSet:
    """Every model starts from the global mean and variance of `data`.

    Mixture means are spread by `mixture_offsets` global standard
    deviations, weights are uniform, and every state owns its own copy.
    """
    if not data:
        raise HmmError("flat start needs data")
    dims = {obs.dim for obs in data}
    if len(dims) != 1:
        raise HmmError(f"observation dimensions differ: {sorted(dims)}")
    if not labels:
        raise HmmError("flat start needs at least one label")

    frames = np.concatenate([obs.frames for obs in data])
    mean = frames.mean(axis=0)
    variance = frames.var(axis=0)
    floor = np.maximum(var_floor_scale * variance, MIN_VARIANCE)
    if np.any(variance < floor):
        logger.warning("flat start: {} feature dimension(s) floored to the minimum variance", int(np.sum(variance < floor)))
    variance = np.maximum(variance, floor)

    offsets = mixture_offsets(n_mixtures)
    means = mean[None, :] + offsets[:, None] * np.sqrt(variance)[None, :]
    models: dict[str, Hmm] = {}
    for label in labels:
        states = [
            Gmm(np.full(n_mixtures, 1.0 / n_mixtures), means.copy(), np.tile(variance, (n_mixtures, 1)))
            for _ in range(n_states)
        ]
        models[label] = Hmm(label, left_to_right(n_states, self_loop), states)
    return HmmSet(models=models, var_floor=floor)


def tee_transitions(enter: float = 0.7, self_loop: float = 0.6) -> np.ndarray:
    """One emitting state that may be skipped entirely."""
    return np.array(
        [
            [0.0, enter, 1.0 - enter],
            [0.0, self_loop, 1.0 - self_loop],
            [0.0, 0.0, 0.0],
        ]
    )
