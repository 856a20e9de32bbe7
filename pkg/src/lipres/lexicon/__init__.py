"""Lexicon.

# Features
- CMU-format pronunciation dictionary with alternatives
- Phone to viseme classes (v01..v18) and the viseme dictionary
- Ground-truth text lines, reference viseme transcripts and MLF label files

"""

from .dictionary import (
    PronDict,
    VisemeDict,
    format_dictionary,
    load_dictionary,
    parse_dictionary,
    viseme_dictionary,
)
from .transcript import (
    Transcript,
    parse_text_lines,
    read_mlf,
    transcribe_line,
    viseme_reference,
    write_mlf,
)
from .visemes import SHORT_PAUSE, SILENCE, VISEMES, map_phones_to_visemes, viseme_of

__all__ = (
    "PronDict",
    "SHORT_PAUSE",
    "SILENCE",
    "Transcript",
    "VISEMES",
    "VisemeDict",
    "format_dictionary",
    "load_dictionary",
    "map_phones_to_visemes",
    "parse_dictionary",
    "parse_text_lines",
    "read_mlf",
    "transcribe_line",
    "viseme_dictionary",
    "viseme_of",
    "viseme_reference",
    "write_mlf",
)
