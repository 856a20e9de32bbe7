# -*- coding: utf-8 -*-

"""Unigram and Back-off Bigram Word Networks.

The vocabulary is closed. `sil` is the sentence boundary: the history of
the first word and, for bigrams, the token predicted after the last one.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..errors import NetworkError
from ..lexicon.transcript import Transcript

__all__ = (
    "BOUNDARY",
    "WordNetwork",
    "build_network",
    "dump_network",
)

BOUNDARY = "sil"


@dataclass(frozen=True, eq=False)
class WordNetwork:
    """Log-probabilities over `tokens` (the vocabulary followed by `sil`).

    Order 1 keeps a unigram over the words (`sil` at -inf). Order 2 keeps
    the smoothed unigram over every token, the full bigram matrix
    `bigram[h, w] = log P(w | h)` and the back-off weight of every history.
    """

    order: int
    tokens: tuple[str, ...]
    unigram: np.ndarray
    bigram: Optional[np.ndarray] = None
    backoff: Optional[np.ndarray] = None
    counts: Optional[np.ndarray] = None
    discount: float = 0.5

    @property
    def words(self) -> tuple[str, ...]:
        return self.tokens[:-1]

    def index(self, token: str) -> int:
        try:
            return self.tokens.index(token)
        except ValueError:
            raise NetworkError(f"token `{token}` not in the network") from None

    def log_prob(self, word: str, history: str = BOUNDARY) -> float:
        """log P(word | history); order 1 ignores the history."""
        w = self.index(word)
        if self.order == 1 or self.bigram is None:
            return float(self.unigram[w])
        return float(self.bigram[self.index(history), w])

    def end_log_prob(self, history: str) -> float:
        """log P(sil | history), 0 for a unigram loop."""
        if self.order == 1:
            return 0.0
        return self.log_prob(BOUNDARY, history)


def _tokens(item: Union[Transcript, Sequence[str]]) -> tuple[str, ...]:
    return item.tokens if isinstance(item, Transcript) else tuple(item)


def build_network(
    transcripts: Iterable[Union[Transcript, Sequence[str]]],
    order: int = 1,
    vocabulary: Optional[Sequence[str]] = None,
    discount: float = 0.5,
) -> WordNetwork:
    """Estimate a word network from training transcripts.

    Parameters:
        :transcripts:word sequences of the training lines;
        :order:int, 1 for add-one unigrams, 2 for absolute-discount back-off bigrams;
        :vocabulary:optional closed vocabulary, sorted training words by default;
        :discount:float, absolute discount of seen bigrams;
    """
    lines = [_tokens(t) for t in transcripts]
    lines = [line for line in lines if line]
    if not lines:
        raise NetworkError("word network needs at least one non-empty transcript")
    if order not in (1, 2):
        raise NetworkError(f"network order must be 1 or 2, got {order}")
    if not 0.0 < discount < 1.0:
        raise NetworkError(f"discount must lie in (0, 1): {discount}")

    words = sorted({w for line in lines for w in line}) if vocabulary is None else list(dict.fromkeys(vocabulary))
    if BOUNDARY in words:
        raise NetworkError(f"`{BOUNDARY}` is reserved for sentence boundaries")
    unknown = sorted({w for line in lines for w in line} - set(words))
    if unknown:
        raise NetworkError(f"transcript words outside the vocabulary: {unknown[:5]}")
    tokens = tuple(words) + (BOUNDARY,)
    index = {t: k for k, t in enumerate(tokens)}
    n = len(tokens)

    if order == 1:
        counts = np.zeros(n)
        for line in lines:
            for w in line:
                counts[index[w]] += 1.0
        probs = (counts[:-1] + 1.0) / (counts[:-1].sum() + len(words))
        unigram = np.concatenate([np.log(probs), [-np.inf]])
        return WordNetwork(order=1, tokens=tokens, unigram=unigram, counts=counts, discount=discount)

    pairs = np.zeros((n, n))
    for line in lines:
        seq = [index[BOUNDARY], *(index[w] for w in line), index[BOUNDARY]]
        for h, w in zip(seq[:-1], seq[1:]):
            pairs[h, w] += 1.0
    predicted = pairs.sum(axis=0)
    uni = (predicted + 1.0) / (predicted.sum() + n)

    bigram = np.empty((n, n))
    backoff = np.zeros(n)
    for h in range(n):
        total = pairs[h].sum()
        seen = pairs[h] > 0
        if total == 0:
            bigram[h] = uni
            backoff[h] = 1.0
        elif seen.all():
            # nothing left to back off to
            bigram[h] = pairs[h] / total
            backoff[h] = 0.0
        else:
            alpha = (discount * seen.sum() / total) / (1.0 - uni[seen].sum())
            bigram[h] = np.where(seen, (pairs[h] - discount) / total, alpha * uni)
            backoff[h] = alpha
    with np.errstate(divide="ignore"):
        return WordNetwork(
            order=2,
            tokens=tokens,
            unigram=np.log(uni),
            bigram=np.log(bigram),
            backoff=np.log(backoff),
            counts=pairs,
            discount=discount,
        )


def dump_network(network: WordNetwork) -> list[str]:
    """Plain-text listing: header, unigrams, seen bigrams and back-off weights."""
    lines = [f"order={network.order}", f"tokens={len(network.tokens)}", f"discount={network.discount!r}"]
    for token, logp in zip(network.tokens, network.unigram.tolist()):
        lines.append(f"unigram {token} {logp!r}")
    if network.order == 2 and network.bigram is not None and network.counts is not None:
        for h, history in enumerate(network.tokens):
            for w, word in enumerate(network.tokens):
                if network.counts[h, w] > 0:
                    lines.append(f"bigram {history} {word} {float(network.bigram[h, w])!r}")
        for history, weight in zip(network.tokens, network.backoff.tolist()):  # type: ignore[union-attr]
            lines.append(f"backoff {history} {weight!r}")
    return lines
