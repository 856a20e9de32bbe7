# -*- coding: utf-8 -*-

"""Word and Viseme Transcripts.

Ground-truth text, the reference viseme expansion of a line and the
MLF-style label files (`#!MLF!#`, one `"*/lineNNN.lab"` block per line,
closed by `.`). Timed labels carry `start end label` in 100 ns units.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import regex as re

from ..errors import TranscriptionError
from ..storage.io import IO
from .dictionary import PronDict, VisemeDict
from .visemes import SILENCE, map_phones_to_visemes

__all__ = (
    "Transcript",
    "parse_text_lines",
    "read_mlf",
    "transcribe_line",
    "viseme_reference",
    "write_mlf",
)

MLF_HEADER = "#!MLF!#"
HTK_UNITS = 10_000_000

_TOKEN = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")
_LAB = re.compile(r'^"\*/line(\d+)\.lab"$')


@dataclass(frozen=True)
class Transcript:
    """Ordered labels of one poem line, optionally with [start, end) frame times."""

    tokens: tuple[str, ...]
    line_id: int = 0
    times: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "times", tuple(tuple(t) for t in self.times))
        if not self.tokens:
            raise TranscriptionError(f"line {self.line_id}: empty transcript")
        if self.times and len(self.times) != len(self.tokens):
            raise TranscriptionError(f"line {self.line_id}: {len(self.times)} times for {len(self.tokens)} labels")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def parse_text_lines(text: str) -> list[Transcript]:
    """Ground-truth text, one line per poem line, numbered from 0.

    Tokens are lowercased with punctuation stripped and apostrophes kept;
    lines without any token are skipped.
    """
    result = []
    for raw in text.splitlines():
        line = raw.lower().replace("’", "'")
        tokens = _TOKEN.findall(line)
        if tokens:
            result.append(Transcript(tuple(tokens), line_id=len(result)))
    return result


def transcribe_line(words: Union[Transcript, Sequence[str]], pron: PronDict, line_id: int = 0) -> Transcript:
    """Reference viseme transcript: first pronunciations framed by silence."""
    if isinstance(words, Transcript):
        line_id, tokens = words.line_id, words.tokens
    else:
        tokens = tuple(words)
    if not tokens:
        raise TranscriptionError(f"line {line_id}: empty line")
    visemes = [SILENCE]
    for word in tokens:
        if word not in pron:
            raise TranscriptionError(f"line {line_id}: word `{word}` not in dictionary")
        visemes.extend(map_phones_to_visemes(pron.pronunciations(word)[0]))
    visemes.append(SILENCE)
    return Transcript(tuple(visemes), line_id=line_id)


def viseme_reference(words: Transcript, vdict: VisemeDict) -> Transcript:
    """Viseme expansion used for scoring: first viseme strings, no silence."""
    visemes: list[str] = []
    for word in words.tokens:
        if word not in vdict:
            raise TranscriptionError(f"line {words.line_id}: word `{word}` not in dictionary")
        visemes.extend(vdict[word][0])
    return Transcript(tuple(visemes), line_id=words.line_id)


def write_mlf(file: Union[str, Path], transcripts: Iterable[Transcript], frame_rate: float = 60.0) -> bool:
    """Write label blocks, timed when a transcript carries times."""
    lines = [MLF_HEADER]
    for item in transcripts:
        lines.append(f'"*/line{item.line_id:03d}.lab"')
        if item.times:
            for (start, end), label in zip(item.times, item.tokens):
                begin = round(start * HTK_UNITS / frame_rate)
                finish = round(end * HTK_UNITS / frame_rate)
                lines.append(f"{begin} {finish} {label}")
        else:
            lines.extend(item.tokens)
        lines.append(".")
    return IO.save_line(file, lines)


def read_mlf(file: Union[str, Path], frame_rate: float = 60.0) -> list[Transcript]:
    """Read label blocks written by `write_mlf` (header optional)."""
    result = []
    line_id = None
    tokens: list[str] = []
    times: list[tuple[int, int]] = []
    for number, raw in enumerate(IO.load_line(file, skip_blank=True), start=1):
        line = raw.strip()
        if line == MLF_HEADER:
            continue
        if line_id is None:
            match = _LAB.match(line)
            if match is None:
                raise TranscriptionError(f"{file}: line {number}: expected a label file name, got `{line}`")
            line_id, tokens, times = int(match[1]), [], []
            continue
        if line == ".":
            result.append(Transcript(tuple(tokens), line_id=line_id, times=tuple(times)))
            line_id = None
            continue
        parts = line.split()
        if len(parts) == 3:
            times.append((round(int(parts[0]) * frame_rate / HTK_UNITS), round(int(parts[1]) * frame_rate / HTK_UNITS)))
            tokens.append(parts[2])
        elif len(parts) == 1:
            tokens.append(parts[0])
        else:
            raise TranscriptionError(f"{file}: line {number}: malformed label `{line}`")
    if line_id is not None:
        raise TranscriptionError(f"{file}: unterminated label block for line {line_id}")
    return result
