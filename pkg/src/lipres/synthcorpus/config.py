# -*- coding: utf-8 -*-

"""Corpus Generator Configuration."""

from dataclasses import dataclass, field, fields
from typing import Any, Literal

from ..errors import CorpusError
from ..imaging.image import Resolution
from ..lexicon.visemes import CMU_PHONES, SILENCE, VISEMES, viseme_of

__all__ = (
    "CorpusConfig",
    "Range",
)

# inclusive (low, high)
Range = tuple[int, int]

WriteFrames = Literal["keys", "all"]


def _range(name: str, value: Any, low: int = 1) -> Range:
    try:
        a, b = (int(v) for v in value)
    except (TypeError, ValueError):
        raise CorpusError(f"{name} must be a (low, high) pair, got {value!r}") from None
    if a < low or b < a:
        raise CorpusError(f"{name} must satisfy {low} <= low <= high, got ({a}, {b})")
    return a, b


@dataclass(frozen=True)
class CorpusConfig:
    """Everything that determines a synthetic corpus.

    A fixed config (seed included) gives a byte-identical corpus. An empty
    `vocabulary` is invented from the seed; a given one is a tuple of
    (word, phones) pairs whose visemes must cover v01..v17.
    """

    seed: int = 42
    native_resolution: Resolution = field(default_factory=lambda: Resolution(1440, 1080))
    n_lines: int = 108
    words_per_line: Range = (2, 4)
    vocabulary: tuple[tuple[str, tuple[str, ...]], ...] = ()
    vocab_size: int = 30
    phones_per_word: Range = (2, 4)
    coverage_repeats: int = 3
    successor_bias: float = 0.8
    frame_rate: float = 60.0
    frames_per_viseme: Range = (5, 12)
    silence_frames: Range = (8, 16)
    lip_height_rest: float = 26.0
    texture_noise_std: float = 0.01
    articulation_jitter: float = 0.25
    min_separation: float = 1.0
    min_count: int = 20
    n_key_frames: int = 11
    write_frames: WriteFrames = "keys"
    workers: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.native_resolution, str):
            object.__setattr__(self, "native_resolution", Resolution.parse(self.native_resolution))
        for name in ("words_per_line", "phones_per_word", "frames_per_viseme", "silence_frames"):
            object.__setattr__(self, name, _range(name, getattr(self, name)))
        vocabulary = tuple((str(word).lower(), tuple(p.lower() for p in phones)) for word, phones in self.vocabulary)
        object.__setattr__(self, "vocabulary", vocabulary)

        if self.n_lines < 1:
            raise CorpusError(f"n_lines must be positive, got {self.n_lines}")
        if self.vocab_size < 1 or self.coverage_repeats < 1:
            raise CorpusError("vocab_size and coverage_repeats must be positive")
        if not 0.0 <= self.successor_bias <= 1.0:
            raise CorpusError(f"successor_bias must lie in [0, 1], got {self.successor_bias}")
        if self.frame_rate <= 0 or self.lip_height_rest <= 0:
            raise CorpusError("frame_rate and lip_height_rest must be positive")
        if self.texture_noise_std < 0 or self.articulation_jitter < 0 or self.min_separation < 0:
            raise CorpusError("noise, jitter and separation must be non-negative")
        if self.min_count < 0:
            raise CorpusError(f"min_count must be non-negative, got {self.min_count}")
        if self.n_key_frames < 2:
            raise CorpusError(f"at least 2 key frames are needed, got {self.n_key_frames}")
        if self.write_frames not in ("keys", "all"):
            raise CorpusError(f"write_frames must be `keys` or `all`, got `{self.write_frames}`")
        if self.workers < 1:
            raise CorpusError(f"workers must be positive, got {self.workers}")
        if vocabulary:
            self._check_vocabulary(vocabulary)

    @staticmethod
    def _check_vocabulary(vocabulary: tuple[tuple[str, tuple[str, ...]], ...]) -> None:
        covered = set()
        for word, phones in vocabulary:
            if not phones:
                raise CorpusError(f"word `{word}` has no pronunciation")
            for phone in phones:
                if phone not in CMU_PHONES:
                    raise CorpusError(f"word `{word}` uses non-CMU phone `{phone}`")
                covered.add(viseme_of(phone))
        missing = [v for v in VISEMES if v != SILENCE and v not in covered]
        if missing:
            raise CorpusError(f"vocabulary does not cover visemes {missing}")

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusConfig":
        """From a JSON object; ranges as lists, resolution as `WxH`."""
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise CorpusError(f"unknown corpus config keys: {unknown}")
        items = dict(data)
        if "vocabulary" in items:
            items["vocabulary"] = tuple((w, tuple(p)) for w, p in items["vocabulary"])
        try:
            return cls(**items)
        except ValueError as error:
            if isinstance(error, CorpusError):
                raise
            raise CorpusError(str(error)) from error

    def to_dict(self) -> dict:
        result: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Resolution):
                value = str(value)
            elif f.name == "vocabulary":
                value = [[word, list(phones)] for word, phones in value]
            elif isinstance(value, tuple):
                value = list(value)
            result[f.name] = value
        return result

    @property
    def scale(self) -> float:
        """Face size relative to the 26 px reference lip height."""
        return self.lip_height_rest / 26.0
