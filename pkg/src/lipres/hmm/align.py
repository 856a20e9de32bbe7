# -*- coding: utf-8 -*-

"""Viterbi Forced Alignment."""

from typing import Sequence, Union

from ..errors import TranscriptionError
from ..lexicon.dictionary import VisemeDict
from ..lexicon.transcript import Transcript
from ..lexicon.visemes import SHORT_PAUSE, SILENCE
from .graph import GraphBuilder, StateGraph
from .model import HmmSet
from .observation import ObservationSequence

__all__ = (
    "alignment_graph",
    "expand_words",
    "force_align",
)


def _words(words: Union[Transcript, Sequence[str]]) -> tuple[tuple[str, ...], int]:
    if isinstance(words, Transcript):
        return words.tokens, words.line_id
    return tuple(words), 0


def expand_words(
    words: Union[Transcript, Sequence[str]],
    vdict: VisemeDict,
    short_pause: bool = False,
) -> list[str]:
    """First viseme strings framed by silence, with `sp` between words when asked."""
    tokens, line_id = _words(words)
    labels = [SILENCE]
    for k, word in enumerate(tokens):
        if word not in vdict:
            raise TranscriptionError(f"line {line_id}: word `{word}` not in dictionary")
        if short_pause and k:
            labels.append(SHORT_PAUSE)
        labels.extend(vdict[word][0])
    labels.append(SILENCE)
    return labels


def alignment_graph(hmms: HmmSet, words: Union[Transcript, Sequence[str]], vdict: VisemeDict) -> StateGraph:
    """sil, then each word as its alternative viseme strings with optional sp between, then sil."""
    tokens, line_id = _words(words)
    if not tokens:
        raise TranscriptionError(f"line {line_id}: empty line")
    builder = GraphBuilder()
    node = builder.chain([hmms[SILENCE]], builder.start)
    for k, word in enumerate(tokens):
        if word not in vdict:
            raise TranscriptionError(f"line {line_id}: word `{word}` not in dictionary")
        if k and SHORT_PAUSE in hmms:
            node = builder.chain([hmms[SHORT_PAUSE]], node)
        done = builder.null(("word", k))
        for visemes in vdict[word]:
            builder.arc(builder.chain([hmms[v] for v in visemes], node), done)
        node = done
    node = builder.chain([hmms[SILENCE]], node)
    builder.arc(node, builder.end)
    return builder.compile("max")


def force_align(
    hmms: HmmSet,
    obs: ObservationSequence,
    words: Union[Transcript, Sequence[str]],
    vdict: VisemeDict,
) -> Transcript:
    """Best viseme labels of `words` over `obs`, timed in frames.

    Short pauses appear only where the best path spends frames in them.
    """
    graph = alignment_graph(hmms, words, vdict)
    path = graph.viterbi(graph.emissions(obs.frames))
    segments = path.segments()
    _, line_id = _words(words)
    return Transcript(
        tuple(s.label for s in segments),
        line_id=line_id,
        times=tuple((s.start, s.end) for s in segments),
    )
