# -*- coding: utf-8 -*-

"""Pipeline Stages.

The steps one sweep cell is made of, each usable on its own from the
command line: model building, tracking, feature extraction, word
networks and scoring.
"""

from typing import Optional, Sequence

from loguru._logger import Logger

from ..aam.features import appearance_basis, features_for_resolutions
from ..aam.fitting import AamFitter, track
from ..aam.model import Aam, AppearanceModel, build_aam, extract_sub_model
from ..errors import FitError
from ..geometry.shape import Shape
from ..hmm.network import WordNetwork, build_network
from ..hmm.observation import ObservationSequence
from ..imaging.image import Image, Resolution
from ..lexicon.dictionary import VisemeDict, viseme_dictionary
from ..lexicon.transcript import Transcript, viseme_reference
from ..scoring.alignment import AlignmentResult, align_sequences
from ..synthcorpus.corpus import Corpus
from ..utils.timer import timing

__all__ = (
    "build_models",
    "build_networks",
    "corpus_vocabulary",
    "fit_line",
    "make_bases",
    "line_features",
    "score_line",
)


@timing
def build_models(
    corpus: Corpus,
    retain_shape: float = 0.95,
    retain_appearance: float = 0.95,
    logger: Optional[Logger] = None,
) -> tuple[Aam, Aam]:
    """Face model from the key frames and its lips sub-model."""
    pairs = [(image, shape) for _, image, shape in corpus.key_frames()]
    aam = build_aam(pairs, retain_shape, retain_appearance)
    lips = extract_sub_model(aam, corpus.lip_indices, pairs)
    if logger:
        logger.info(
            "models from {} key frames: face {}+{} modes, lips {}+{} modes",
            len(pairs),
            aam.shape_model.n_modes,
            aam.appearance_model.n_modes,
            lips.shape_model.n_modes,
            lips.appearance_model.n_modes,
        )
    return aam, lips


def fit_line(
    fitter: AamFitter,
    corpus: Corpus,
    line_id: int,
    max_iters: int = 30,
    init: Optional[Shape] = None,
) -> tuple[list[Image], list[Shape]]:
    """Frames of one line and their tracked shapes, starting from the rest shape."""
    frames = corpus.line_frames(line_id)
    results = track(fitter, frames, init or corpus.rest, max_iters=max_iters)
    shapes = [r.fitted_shape for r in results]
    width, height = corpus.native_resolution.width, corpus.native_resolution.height
    lost = sum(not s.within(width, height) for s in shapes)
    if lost:
        raise FitError(f"line {line_id}: {lost} of {len(shapes)} fitted shapes left the frame")
    return frames, shapes


def make_bases(
    lips: Aam,
    corpus: Corpus,
    targets: Sequence[Resolution],
    mode: str = "per_resolution",
) -> dict[Resolution, AppearanceModel]:
    """One appearance basis per target resolution, from the key frames."""
    key_frames = [(image, shape) for _, image, shape in corpus.key_frames()]
    return {target: appearance_basis(lips, key_frames, target, mode) for target in targets}


def line_features(
    lips: Aam,
    frames: Sequence[Image],
    shapes: Sequence[Shape],
    bases: dict[Resolution, AppearanceModel],
    frame_rate: float = 60.0,
    include_similarity: bool = False,
) -> dict[str, ObservationSequence]:
    """Observation of one line at every basis resolution, keyed `WxH`."""
    result = features_for_resolutions(lips, frames, shapes, bases, frame_rate, include_similarity)
    return {str(target): obs for target, obs in result.items()}


def corpus_vocabulary(corpus: Corpus) -> tuple[list[str], VisemeDict]:
    """Closed vocabulary (every corpus word, sorted) and its viseme strings."""
    words = sorted({w for line in corpus.lines for w in line.tokens})
    return words, viseme_dictionary(corpus.pron, words)


def build_networks(
    lines: Sequence[Transcript],
    vocabulary: Sequence[str],
    names: Sequence[str] = ("uwn", "bwn"),
) -> dict[str, WordNetwork]:
    """Unigram and bigram networks estimated on training lines only."""
    orders = {"uwn": 1, "bwn": 2}
    return {name: build_network(lines, order=orders[name], vocabulary=vocabulary) for name in names}


def score_line(
    words: Transcript,
    hyp_words: Transcript,
    hyp_visemes: Transcript,
    vdict: VisemeDict,
    units: str = "viseme",
    costs: str = "unit",
) -> AlignmentResult:
    """Align one decoded line against its reference, in visemes or words."""
    if units == "word":
        return align_sequences(words, hyp_words, costs)
    return align_sequences(viseme_reference(words, vdict), hyp_visemes, costs)
