# -*- coding: utf-8 -*-

"""Error families.

All errors derive from `ValueError` so callers that only care about bad
input keep working, while each family stays catchable on its own.
"""

from typing import Optional

__all__ = (
    "FrameError",
    "ResampleError",
    "ShapeError",
    "MeshError",
    "ModelError",
    "FitError",
    "LexiconError",
    "TranscriptionError",
    "HmmError",
    "NetworkError",
    "ScoringError",
    "CorpusError",
    "ExperimentError",
    "SummaryError",
)


class FrameError(ValueError):
    """Frame ingestion failed: missing directory, no match, bad file."""


class ResampleError(ValueError):
    """Resampling requested in the wrong direction."""


class ShapeError(ValueError):
    """Landmark shapes are inconsistent or degenerate."""


class MeshError(ValueError):
    """Triangulation or piecewise affine mapping is degenerate."""


class ModelError(ValueError):
    """Statistical model cannot be built or loaded."""


class FitError(ValueError):
    """Model fitting cannot start or cannot proceed."""


class LexiconError(ValueError):
    """Pronunciation dictionary or phone mapping problem."""

    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class TranscriptionError(ValueError):
    """Word transcript cannot be expanded."""


class HmmError(ValueError):
    """HMM training, alignment or decoding problem."""


class NetworkError(ValueError):
    """Word network cannot be built."""


class ScoringError(ValueError):
    """Metric undefined for the given alignment."""


class CorpusError(ValueError):
    """Corpus cannot be generated or read."""


class ExperimentError(ValueError):
    """A sweep cell failed; carries its grid coordinates."""

    def __init__(
        self,
        message: str,
        fold: Optional[int] = None,
        resolution: Optional[str] = None,
        stage: str = "",
    ) -> None:
        if fold is not None or resolution is not None or stage:
            message = f"[fold={fold} resolution={resolution} stage={stage}] {message}"
        super().__init__(message)
        self.fold = fold
        self.resolution = resolution
        self.stage = stage


class SummaryError(ValueError):
    """Results cannot be summarised."""
