# -*- coding: utf-8 -*-

import numpy as np
import pytest

from lipres.errors import NetworkError
from lipres.hmm.network import build_network, dump_network
from lipres.lexicon.transcript import Transcript


class Tester:
    """Test Word Networks."""

    def test_unigram(self) -> None:
        """add-one smoothing over the vocabulary"""
        net = build_network([("a", "b"), ("a", "b")], order=1)
        assert net.words == ("a", "b")
        assert np.exp(net.log_prob("a")) == pytest.approx(0.5)
        assert np.exp(net.log_prob("b", "a")) == pytest.approx(0.5)
        assert net.end_log_prob("b") == 0.0
        net = build_network([Transcript(("a", "a", "b"))], order=1, vocabulary=["a", "b", "c"])
        assert np.exp(net.unigram[:3]).tolist() == pytest.approx([3 / 6, 2 / 6, 1 / 6])
        assert net.unigram[-1] == -np.inf

    def test_bigram_values(self) -> None:
        """absolute discounting with back-off to the smoothed unigram"""
        net = build_network([("a", "b"), ("a", "b")], order=2)
        assert net.tokens == ("a", "b", "sil")
        assert np.exp(net.unigram).tolist() == pytest.approx([1 / 3] * 3)
        assert np.exp(net.log_prob("b", "a")) == pytest.approx(0.75)
        assert np.exp(net.log_prob("a", "a")) == pytest.approx(0.125)
        assert np.exp(net.end_log_prob("a")) == pytest.approx(0.125)
        assert np.exp(net.log_prob("a", "sil")) == pytest.approx(0.75)
        assert net.log_prob("b", "a") > net.log_prob("a", "a")

    def test_rows_normalised(self) -> None:
        """every history sums to one"""
        lines = [("the", "raven"), ("the", "door", "the", "door"), ("nevermore",), ("raven", "nevermore")]
        net = build_network(lines, order=2, vocabulary=["door", "nevermore", "raven", "the", "unused"])
        sums = np.exp(net.bigram).sum(axis=1)
        assert sums.tolist() == pytest.approx([1.0] * len(net.tokens), abs=1e-9)
        # history never seen: plain unigram
        assert net.bigram[net.index("unused")].tolist() == pytest.approx(net.unigram.tolist())
        assert np.exp(net.unigram).sum() == pytest.approx(1.0, abs=1e-9)

    def test_all_seen_history(self) -> None:
        """no back-off mass when every successor was seen"""
        net = build_network([("a", "a"), ("a", "b"), ("b",)], order=2)
        row = np.exp(net.bigram[net.index("a")])
        assert row.tolist() == pytest.approx([1 / 3, 1 / 3, 1 / 3])
        assert net.backoff[net.index("a")] == -np.inf

    def test_errors(self) -> None:
        """empty input, bad order, reserved or unknown words"""
        with pytest.raises(NetworkError, match="at least one"):
            build_network([], order=1)
        with pytest.raises(NetworkError, match="at least one"):
            build_network([()], order=2)
        with pytest.raises(NetworkError, match="order"):
            build_network([("a",)], order=3)
        with pytest.raises(NetworkError, match="reserved"):
            build_network([("sil",)], order=1)
        with pytest.raises(NetworkError, match="outside"):
            build_network([("a", "b")], vocabulary=["a"])
        with pytest.raises(NetworkError, match="not in the network"):
            build_network([("a",)]).log_prob("b")

    def test_dump(self) -> None:
        """header, unigrams, seen bigrams, back-off weights"""
        lines = dump_network(build_network([("a", "b")], order=2))
        assert lines[:3] == ["order=2", "tokens=3", "discount=0.5"]
        assert sum(line.startswith("unigram ") for line in lines) == 3
        assert [line.split()[1:3] for line in lines if line.startswith("bigram ")] == [
            ["a", "b"],
            ["b", "sil"],
            ["sil", "a"],
        ]
        assert sum(line.startswith("backoff ") for line in lines) == 3
        assert len(dump_network(build_network([("a",)]))) == 5
