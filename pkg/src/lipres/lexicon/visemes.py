# -*- coding: utf-8 -*-

"""Phone to Viseme Mapping.

One table holds the whole mapping; the phone classes are listed as printed,
including the non-CMU symbols `h`, `j`, `i`, `u` and `ax` that no CMU entry
produces.
"""

from typing import Iterable

from ..errors import LexiconError

__all__ = (
    "CMU_PHONES",
    "PHONES",
    "SILENCE",
    "SHORT_PAUSE",
    "VISEMES",
    "VISEME_CLASSES",
    "map_phones_to_visemes",
    "viseme_of",
)

SILENCE = "v18"
SHORT_PAUSE = "sp"

VISEME_CLASSES: dict[str, tuple[str, ...]] = {
    "v01": ("p", "b", "m"),
    "v02": ("f", "v"),
    "v03": ("th", "dh"),
    "v04": ("t", "d", "n", "k", "g", "h", "j", "ng", "y"),
    "v05": ("s", "z"),
    "v06": ("l",),
    "v07": ("r",),
    "v08": ("sh", "zh", "ch", "jh"),
    "v09": ("w",),
    "v10": ("i", "ih"),
    "v11": ("eh", "ae", "ey", "ay"),
    "v12": ("aa", "ao", "ah"),
    "v13": ("uh", "er", "ax"),
    "v14": ("u", "uw"),
    "v15": ("oy",),
    "v16": ("iy", "hh"),
    "v17": ("aw", "ow"),
    "v18": ("sil",),
}

VISEMES: tuple[str, ...] = tuple(VISEME_CLASSES)

_PHONE_TO_VISEME: dict[str, str] = {
    phone: viseme for viseme, phones in VISEME_CLASSES.items() for phone in phones
}

PHONES: frozenset[str] = frozenset(_PHONE_TO_VISEME)

# the 39 phones of the CMU dictionary, stress removed
CMU_PHONES: frozenset[str] = frozenset(
    "aa ae ah ao aw ay b ch d dh eh er ey f g hh ih iy jh k l m n ng ow oy p r s sh t th uh uw v w y z zh".split()
)


def viseme_of(phone: str) -> str:
    """Viseme class of one phone."""
    try:
        return _PHONE_TO_VISEME[phone.lower()]
    except KeyError:
        raise LexiconError(f"phone `{phone}` has no viseme class") from None


def map_phones_to_visemes(phones: Iterable[str]) -> list[str]:
    """Elementwise phone to viseme lookup, repeats kept."""
    return [viseme_of(phone) for phone in phones]
