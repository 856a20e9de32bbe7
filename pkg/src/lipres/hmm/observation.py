# -*- coding: utf-8 -*-

"""Per-frame feature vectors fed to the HMMs."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import HmmError

__all__ = (
    "FEATURE_SETS",
    "FeatureVector",
    "ObservationSequence",
)

FEATURE_SETS = ("shape", "appearance", "combined")


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Shape and appearance parameters of one frame."""

    shape_params: np.ndarray
    appearance_params: np.ndarray

    def concatenate(self) -> np.ndarray:
        return np.concatenate([self.shape_params, self.appearance_params])


@dataclass(frozen=True, eq=False)
class ObservationSequence:
    """(T, D) frames, the first `shape_dim` columns are shape parameters."""

    frames: np.ndarray
    frame_rate: float = 60.0
    shape_dim: int = 0
    appearance_dim: int = 0

    def __post_init__(self) -> None:
        frames = np.array(self.frames, dtype=np.float64)
        if frames.ndim == 1:
            frames = frames[:, None]
        if frames.ndim != 2 or frames.shape[0] == 0 or frames.shape[1] == 0:
            raise HmmError(f"observation needs at least one frame, got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise HmmError("observation frames must be finite")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)
        if self.shape_dim + self.appearance_dim == 0:
            object.__setattr__(self, "shape_dim", int(frames.shape[1]))
        elif self.shape_dim + self.appearance_dim != frames.shape[1]:
            raise HmmError(
                f"dimension split {self.shape_dim}+{self.appearance_dim} != {frames.shape[1]}"
            )

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frames.shape[1])

    @classmethod
    def from_features(cls, features: Sequence[FeatureVector], frame_rate: float = 60.0) -> "ObservationSequence":
        if not features:
            raise HmmError("observation needs at least one frame")
        return cls(
            frames=np.stack([f.concatenate() for f in features]),
            frame_rate=frame_rate,
            shape_dim=int(features[0].shape_params.shape[0]),
            appearance_dim=int(features[0].appearance_params.shape[0]),
        )

    def select(self, feature: str) -> "ObservationSequence":
        """Keep the shape columns, the appearance columns, or both."""
        if feature == "combined":
            return self
        if feature == "shape":
            if self.shape_dim == 0:
                raise HmmError("observation carries no shape columns")
            return ObservationSequence(self.frames[:, : self.shape_dim], self.frame_rate, self.shape_dim, 0)
        if feature == "appearance":
            if self.appearance_dim == 0:
                raise HmmError("observation carries no appearance columns")
            return ObservationSequence(self.frames[:, self.shape_dim :], self.frame_rate, 0, self.appearance_dim)
        raise HmmError(f"unknown feature set `{feature}`, expected one of {FEATURE_SETS}")

    def slice(self, start: int, stop: int) -> "ObservationSequence":
        return ObservationSequence(self.frames[start:stop], self.frame_rate, self.shape_dim, self.appearance_dim)
