# -*- coding: utf-8 -*-

from itertools import product

import numpy as np
import pytest

from lipres.errors import HmmError, NetworkError
from lipres.hmm.decode import Decoder, decode
from lipres.hmm.model import Gmm, Hmm, HmmSet, left_to_right
from lipres.hmm.network import WordNetwork, build_network
from lipres.hmm.observation import ObservationSequence
from lipres.hmm.train import tie_silence

VDICT = {"ab": [("v01",), ("v02", "v01")], "ba": [("v02",)]}


def _random_set(rng: np.random.Generator, with_sp: bool) -> HmmSet:
    models = {}
    for label in ("v18", "v01", "v02"):
        n = int(rng.integers(1, 3))
        states = [Gmm([1.0], [[rng.normal(0.0, 2.0)]], [[rng.uniform(0.5, 2.0)]]) for _ in range(n)]
        models[label] = Hmm(label, left_to_right(n, float(rng.uniform(0.2, 0.8))), states)
    hmms = HmmSet(models, var_floor=np.array([1e-6]))
    if with_sp:
        hmms = tie_silence(hmms, float(rng.uniform(0.3, 0.9)), float(rng.uniform(0.2, 0.8)))
    return hmms


def _best_alignment(models: list[Hmm], ll: dict[int, np.ndarray], steps: int) -> float:
    """Exhaustive search over every state path through the concatenated models."""
    need = [sum(m.min_frames() for m in models[k:]) for k in range(len(models))]
    best = -np.inf
    stack = [(0, 0, 0, 0.0)]
    while stack:
        m, i, t, score = stack.pop()
        hmm = models[m]
        if i == 0 and t + need[m] > steps:
            continue
        for j in np.flatnonzero(hmm.transitions[i]).tolist():
            s = score + float(np.log(hmm.transitions[i, j]))
            if j <= hmm.n_emitting:
                if t < steps:
                    stack.append((m, j, t + 1, s + float(ll[id(hmm.states[j - 1])][t])))
            elif m + 1 < len(models):
                stack.append((m + 1, 0, t, s))
            elif t == steps:
                best = max(best, s)
    return best


def _enumerate(
    hmms: HmmSet, network: WordNetwork, obs: ObservationSequence, lm_scale: float, penalty: float
) -> tuple[float, tuple[str, ...]]:
    ll = {id(g): g.log_likelihood(obs.frames) for g in hmms.gmms()}
    pause = [hmms["sp"]] if "sp" in hmms else []
    best, best_words = -np.inf, ()
    for count in range(1, len(obs) - 1):
        for words in product(network.words, repeat=count):
            lm = network.log_prob(words[0], "sil") + network.end_log_prob(words[-1])
            lm += sum(network.log_prob(w, h) for h, w in zip(words[:-1], words[1:]))
            for prons in product(*(VDICT[w] for w in words)):
                models = [hmms["v18"]]
                for pron in prons:
                    models += [hmms[v] for v in pron] + pause
                models.append(hmms["v18"])
                score = _best_alignment(models, ll, len(obs)) + lm_scale * lm + penalty * count
                if score > best:
                    best, best_words = score, words
    return best, best_words


class Tester:
    """Test Network Decoding."""

    def test_matches_enumeration(self) -> None:
        """best path equals exhaustive search over word sequences and alignments"""
        rng = np.random.default_rng(29)
        checked = 0
        for case in range(100):
            hmms = _random_set(rng, with_sp=bool(case % 2))
            network = build_network([("ab", "ba"), ("ab",), ("ba", "ba")], order=int(rng.integers(1, 3)))
            lm_scale = float(rng.uniform(0.0, 2.0))
            penalty = float(rng.uniform(-2.0, 1.0))
            obs = ObservationSequence(rng.normal(0.0, 2.0, (int(rng.integers(3, 7)), 1)))
            expected, words = _enumerate(hmms, network, obs, lm_scale, penalty)
            decoder = Decoder(hmms, network, VDICT, lm_scale, penalty)
            if not np.isfinite(expected):
                with pytest.raises(HmmError):
                    decoder.best_path(obs)
                continue
            path = decoder.best_path(obs)
            assert path.score == pytest.approx(expected, abs=1e-9)
            assert tuple(path.events("word")) == words
            checked += 1
        assert checked >= 40

    def test_single_word_vocabulary(self) -> None:
        """forced support: the only word, at least once"""
        rng = np.random.default_rng(1)
        hmms = _random_set(rng, with_sp=True)
        network = build_network([("raven",)], order=1)
        vdict = {"raven": [("v01", "v02")]}
        words, visemes = decode(hmms, network, ObservationSequence(rng.normal(size=(12, 1))), vdict)
        assert len(words) >= 1
        assert set(words.tokens) == {"raven"}
        assert visemes.tokens == ("v01", "v02") * len(words)

    def test_homophenes(self) -> None:
        """without the language model the first word in vocabulary order wins"""
        rng = np.random.default_rng(6)
        hmms = _random_set(rng, with_sp=True)
        network = build_network([("pat", "bat"), ("pat",)], order=2)
        vdict = {"pat": [("v01",)], "bat": [("v01",)]}
        words, visemes = Decoder(hmms, network, vdict, lm_scale=0.0).decode(ObservationSequence(rng.normal(size=(9, 1))), 5)
        assert set(words.tokens) == {"bat"}
        assert words.line_id == 5
        assert set(visemes.tokens) == {"v01"}

    def test_silence_stripped(self) -> None:
        """viseme output carries neither sil nor sp"""
        rng = np.random.default_rng(12)
        hmms = _random_set(rng, with_sp=True)
        network = build_network([("ab", "ba")], order=2)
        _, visemes = decode(hmms, network, ObservationSequence(rng.normal(size=(10, 1))), VDICT)
        assert visemes.tokens
        assert not {"v18", "sp"} & set(visemes.tokens)

    def test_errors(self) -> None:
        """network words need viseme strings, observations need frames"""
        rng = np.random.default_rng(3)
        hmms = _random_set(rng, with_sp=False)
        network = build_network([("ab", "raven")], order=1)
        with pytest.raises(NetworkError, match="raven"):
            Decoder(hmms, network, VDICT)
        decoder = Decoder(hmms, build_network([("ab",)]), VDICT)
        with pytest.raises(HmmError, match="no path"):
            decoder.decode(ObservationSequence(np.zeros(1)))
