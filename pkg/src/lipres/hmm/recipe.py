# -*- coding: utf-8 -*-

"""The Fixed Training Schedule.

flat start -> 4 x re-estimation on the first-pronunciation transcripts ->
tie sp to sil -> 2 x re-estimation with sp between words -> forced
alignment -> 2 x re-estimation on the aligned viseme labels.
"""

from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

from loguru import logger
from loguru._logger import Logger

from ..errors import HmmError
from ..lexicon.dictionary import VisemeDict
from ..lexicon.transcript import Transcript
from ..lexicon.visemes import VISEMES
from ..utils.timer import timing
from .align import expand_words, force_align
from .model import HmmSet, flat_start
from .observation import ObservationSequence
from .train import baum_welch, tie_silence

__all__ = (
    "RecipeConfig",
    "train_recipe",
)


@dataclass(frozen=True)
class RecipeConfig:
    """Model topology and the number of passes of every stage."""

    n_states: int = 5
    n_mixtures: int = 5
    self_loop: float = 0.6
    initial_passes: int = 4
    tied_passes: int = 2
    aligned_passes: int = 2
    sp_enter: float = 0.7
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_states < 1 or self.n_mixtures < 1:
            raise HmmError(f"need at least one state and one mixture: {self.n_states}, {self.n_mixtures}")
        if not 0.0 < self.self_loop < 1.0 or not 0.0 < self.sp_enter < 1.0:
            raise HmmError("self loop and sp entry probabilities must lie in (0, 1)")

    @classmethod
    def from_dict(cls, data: dict) -> "RecipeConfig":
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise HmmError(f"unknown recipe keys: {unknown}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@timing
def train_recipe(
    data: Sequence[tuple[ObservationSequence, Transcript]],
    vdict: VisemeDict,
    config: Optional[RecipeConfig] = None,
    log: Optional[Logger] = None,
) -> HmmSet:
    """Train viseme models from word-level transcripts.

    Parameters:
        :data:list of (observation, word transcript) training utterances;
        :vdict:VisemeDict, viseme strings of every training word;
        :config:RecipeConfig, defaults to five states and five mixtures;
        :log:Logger from `loguru` library, optional, the module logger otherwise;
    """
    cfg = config or RecipeConfig()
    log = log or logger
    if not data:
        raise HmmError("training needs at least one utterance")

    hmms = flat_start([obs for obs, _ in data], VISEMES, cfg.n_states, cfg.n_mixtures, cfg.self_loop)
    plain = [(obs, expand_words(words, vdict)) for obs, words in data]
    hmms = baum_welch(hmms, plain, cfg.initial_passes, cfg.workers)
    log.info("flat start + {} passes over {} utterances", cfg.initial_passes, len(data))

    hmms = tie_silence(hmms, cfg.sp_enter, cfg.self_loop)
    paused = [(obs, expand_words(words, vdict, short_pause=True)) for obs, words in data]
    hmms = baum_welch(hmms, paused, cfg.tied_passes, cfg.workers)
    log.info("sp tied to sil + {} passes", cfg.tied_passes)

    aligned: list[tuple[ObservationSequence, list[str]]] = []
    for (obs, words), (_, fallback) in zip(data, paused):
        try:
            aligned.append((obs, list(force_align(hmms, obs, words, vdict).tokens)))
        except HmmError as e:
            log.warning("line {}: forced alignment failed ({}); using the sp transcript", words.line_id, e)
            aligned.append((obs, fallback))
    hmms = baum_welch(hmms, aligned, cfg.aligned_passes, cfg.workers)
    log.info("forced alignment + {} passes, {} re-estimations in total", cfg.aligned_passes, len(hmms.history))
    return hmms
