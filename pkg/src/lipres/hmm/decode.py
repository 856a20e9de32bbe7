# -*- coding: utf-8 -*-

"""Network-constrained Viterbi Decoding.

The decoding graph is sil, a loop over the vocabulary (each word one
instance of its viseme strings followed by an optional short pause), then
sil. Arcs into a word carry `lm_scale * log P(word | previous word)` plus
the word insertion penalty; the arc into the final sil carries the scaled
end-of-sentence probability.
"""

from typing import Optional

from loguru._logger import Logger

from ..errors import HmmError, NetworkError
from ..lexicon.dictionary import VisemeDict
from ..lexicon.transcript import Transcript
from ..lexicon.visemes import SHORT_PAUSE, SILENCE
from .graph import GraphBuilder, Path, StateGraph
from .model import HmmSet
from .network import BOUNDARY, WordNetwork
from .observation import ObservationSequence

__all__ = (
    "Decoder",
    "decode",
)


class Decoder:
    """Compiled decoding graph of one (models, network) pair."""

    _logger: Optional[Logger]

    def __init__(
        self,
        hmms: HmmSet,
        network: WordNetwork,
        vdict: VisemeDict,
        lm_scale: float = 1.0,
        word_insertion_penalty: float = 0.0,
        logger: Optional[Logger] = None,
    ) -> None:
        """Init Decoder.

        Parameters:
            :hmms:HmmSet, trained viseme models (sil required, sp optional);
            :network:WordNetwork, unigram or bigram support;
            :vdict:VisemeDict, viseme strings of every network word;
            :lm_scale:float, weight of the language model log-probabilities;
            :word_insertion_penalty:float, added once per decoded word;
            :logger:Logger from `loguru` library, optional;
        """
        missing = [w for w in network.words if w not in vdict]
        if missing:
            raise NetworkError(f"network words missing from the viseme dictionary: {missing[:5]}")
        self._hmms = hmms
        self._network = network
        self._vdict = vdict
        self._lm_scale = float(lm_scale)
        self._penalty = float(word_insertion_penalty)
        self._logger = logger
        self._graph = self._build()
        if self._logger:
            self._logger.debug(
                "decoder ready: order {} network, {} words, {} states, {} arcs",
                network.order,
                len(network.words),
                self._graph.n_states,
                int(self._graph.src.shape[0]),
            )

    @property
    def graph(self) -> StateGraph:
        return self._graph

    def _build(self) -> StateGraph:
        hmms, network = self._hmms, self._network
        builder = GraphBuilder()
        opening = builder.chain([hmms[SILENCE]], builder.start)
        closing = builder.null()
        last = builder.chain([hmms[SILENCE]], closing)
        builder.arc(last, builder.end)

        begins: list[int] = []
        histories: list[int] = []
        for word in network.words:
            begin = builder.null()
            done = builder.null(("word", word))
            for visemes in self._vdict[word]:
                builder.arc(builder.chain([hmms[v] for v in visemes], begin), done)
            history = builder.chain([hmms[SHORT_PAUSE]], done) if SHORT_PAUSE in hmms else done
            begins.append(begin)
            histories.append(history)

        sources = [(BOUNDARY, opening)] + list(zip(network.words, histories))
        for history, node in sources:
            for word, begin in zip(network.words, begins):
                weight = self._lm_scale * network.log_prob(word, history) + self._penalty
                builder.arc(node, begin, weight)
            if history != BOUNDARY:
                builder.arc(node, closing, self._lm_scale * network.end_log_prob(history))
        return builder.compile("max")

    def best_path(self, obs: ObservationSequence) -> Path:
        if len(obs) == 0:
            raise HmmError("cannot decode an empty observation")
        return self._graph.viterbi(self._graph.emissions(obs.frames))

    def decode(self, obs: ObservationSequence, line_id: int = 0) -> tuple[Transcript, Transcript]:
        """Best word sequence and its viseme expansion without sil and sp."""
        path = self.best_path(obs)
        words = tuple(path.events("word"))
        visemes = tuple(s.label for s in path.segments() if s.label not in (SILENCE, SHORT_PAUSE))
        return Transcript(words, line_id=line_id), Transcript(visemes, line_id=line_id)


def decode(
    hmms: HmmSet,
    network: WordNetwork,
    obs: ObservationSequence,
    vdict: VisemeDict,
    lm_scale: float = 1.0,
    word_insertion_penalty: float = 0.0,
) -> tuple[Transcript, Transcript]:
    """One-off decode, see `Decoder`."""
    return Decoder(hmms, network, vdict, lm_scale, word_insertion_penalty).decode(obs)
