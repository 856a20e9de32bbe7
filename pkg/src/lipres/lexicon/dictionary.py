# -*- coding: utf-8 -*-

"""CMU-format Pronunciation Dictionary."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import regex as re

from ..errors import LexiconError
from ..storage.io import IO
from .visemes import PHONES, map_phones_to_visemes

__all__ = (
    "PronDict",
    "VisemeDict",
    "format_dictionary",
    "load_dictionary",
    "parse_dictionary",
    "viseme_dictionary",
)

# lowercase word -> viseme strings, one per distinct pronunciation
VisemeDict = dict[str, list[tuple[str, ...]]]

_ENTRY = re.compile(r"^(?P<word>[^\s(]+)(?:\((?P<alt>\d+)\))?\s+(?P<phones>\S.*)$")
_STRESS = re.compile(r"[012]$")


@dataclass(frozen=True)
class PronDict:
    """Uppercase word -> alternative phone sequences, in file order."""

    entries: dict[str, list[tuple[str, ...]]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.upper() in self.entries

    def pronunciations(self, word: str) -> list[tuple[str, ...]]:
        """Every pronunciation of `word`, the reference one first."""
        return self.entries[word.upper()]

    def words(self) -> list[str]:
        return list(self.entries)


def _phone(symbol: str, number: int) -> str:
    phone = _STRESS.sub("", symbol).lower()
    if phone not in PHONES:
        raise LexiconError(f"unknown phone `{symbol}`", number)
    return phone


def parse_dictionary(text: str) -> PronDict:
    """Parse CMU dictionary text.

    `;;;` lines and blank lines are skipped, stress digits stripped and
    `WORD(2)` lines appended as alternatives of `WORD`.
    """
    entries: dict[str, list[tuple[str, ...]]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        match = _ENTRY.match(line)
        if match is None:
            raise LexiconError(f"malformed entry `{line}`", number)
        word = match["word"].upper()
        phones = tuple(_phone(s, number) for s in match["phones"].split())
        entries.setdefault(word, []).append(phones)
    return PronDict(entries)


def load_dictionary(file: Union[str, Path]) -> PronDict:
    return parse_dictionary(IO.load_str(file))


def format_dictionary(pron: PronDict) -> list[str]:
    """CMU-format lines, alternatives numbered from 2."""
    lines = []
    for word in sorted(pron.entries):
        for k, phones in enumerate(pron.entries[word], start=1):
            head = word if k == 1 else f"{word}({k})"
            lines.append(f"{head}  {' '.join(p.upper() for p in phones)}")
    return lines


def viseme_dictionary(pron: PronDict, words: Iterable[str] = ()) -> VisemeDict:
    """Viseme strings of every pronunciation, homophenes kept as separate words.

    Identical viseme strings of one word collapse to the first. `words`
    restricts the result when given.
    """
    wanted = {w.upper() for w in words}
    result: VisemeDict = {}
    for word, prons in pron.entries.items():
        if wanted and word not in wanted:
            continue
        strings: list[tuple[str, ...]] = []
        for phones in prons:
            visemes = tuple(map_phones_to_visemes(phones))
            if visemes not in strings:
                strings.append(visemes)
        result[word.lower()] = strings
    return result
