# -*- coding: utf-8 -*-

import numpy as np
import pytest
from loguru import logger

from lipres.errors import HmmError
from lipres.hmm.model import Gmm, Hmm, HmmSet, flat_start, left_to_right
from lipres.hmm.observation import ObservationSequence
from lipres.hmm.train import baum_welch, label_graph, tie_silence


def _random_set(rng: np.random.Generator, labels: tuple = ("v01", "v02"), dim: int = 2) -> HmmSet:
    models = {}
    for label in labels:
        n = int(rng.integers(1, 3))
        states = []
        for _ in range(n):
            weights = rng.dirichlet(np.ones(2))
            states.append(Gmm(weights, rng.normal(0.0, 1.5, (2, dim)), rng.uniform(0.5, 2.0, (2, dim))))
        models[label] = Hmm(label, left_to_right(n, float(rng.uniform(0.2, 0.8))), states)
    return HmmSet(models, var_floor=np.full(dim, 1e-6))


class Tester:
    """Test Graphs, Re-estimation and Tying."""

    def test_forward_backward_agree(self) -> None:
        """forward and backward totals match, viterbi below both"""
        rng = np.random.default_rng(11)
        for _ in range(10):
            hmms = _random_set(rng)
            labels = [str(x) for x in rng.choice(["v01", "v02"], size=int(rng.integers(1, 4)))]
            graph = label_graph(hmms, labels)
            frames = rng.normal(0.0, 1.5, (10, 2))
            emissions = graph.emissions(frames)
            _, forward = graph.forward(emissions)
            _, backward = graph.backward(emissions)
            assert forward == pytest.approx(backward, rel=1e-8)
            assert graph.viterbi(emissions).score <= forward + 1e-9

    def test_viterbi_matches_enumeration(self) -> None:
        """best compiled path equals exhaustive search over state sequences"""
        rng = np.random.default_rng(5)
        for _ in range(10):
            hmms = _random_set(rng, dim=1)
            graph = label_graph(hmms, ["v01", "v02"])
            frames = rng.normal(0.0, 1.5, (5, 1))
            emissions = graph.emissions(frames)
            n = graph.n_states
            arcs = np.full((n, n), -np.inf)
            arcs[graph.src, graph.dst] = graph.logp

            best, best_states = -np.inf, None
            for states in np.ndindex(*([n] * len(frames))):
                score = graph.init[states[0]] + emissions[0, states[0]]
                for t in range(1, len(frames)):
                    score += arcs[states[t - 1], states[t]] + emissions[t, states[t]]
                score += graph.final[states[-1]]
                if score > best:
                    best, best_states = score, states
            if not np.isfinite(best):
                continue
            path = graph.viterbi(emissions)
            assert path.score == pytest.approx(best, abs=1e-9)
            assert tuple(path.states.tolist()) == best_states

    def test_segments(self) -> None:
        """a path through two models has two segments"""
        gmm_a = Gmm([1.0], [[0.0]], [[1.0]])
        gmm_b = Gmm([1.0], [[10.0]], [[1.0]])
        hmms = HmmSet(
            {"v01": Hmm("v01", left_to_right(1), [gmm_a]), "v02": Hmm("v02", left_to_right(1), [gmm_b])},
            var_floor=np.array([1e-6]),
        )
        graph = label_graph(hmms, ["v01", "v02", "v01"])
        path = graph.viterbi(graph.emissions(np.array([[0.0], [0.0], [10.0], [0.0], [0.0], [0.0]])))
        assert [(s.label, s.start, s.end) for s in path.segments()] == [("v01", 0, 2), ("v02", 2, 3), ("v01", 3, 6)]

    def test_single_state_closed_form(self) -> None:
        """one state, one mixture: the sequence mean and variance after one pass"""
        frames = np.array([1.0, 2.0, 4.0, 7.0])
        obs = ObservationSequence(frames)
        hmms = flat_start([obs], ["v01"], n_states=1, n_mixtures=1)
        hmms["v01"].states[0].means = np.array([[5.0]])
        hmms["v01"].states[0].variances = np.array([[3.0]])
        trained = baum_welch(hmms, [(obs, ["v01"])], iterations=1)
        gmm = trained["v01"].states[0]
        assert gmm.means[0, 0] == pytest.approx(frames.mean())
        assert gmm.variances[0, 0] == pytest.approx(frames.var())
        assert trained["v01"].transitions[1, 1] == pytest.approx(0.75)
        assert trained["v01"].transitions[1, 2] == pytest.approx(0.25)
        assert len(trained.history) == 1
        assert hmms["v01"].states[0].means[0, 0] == 5.0

    def test_zero_iterations(self) -> None:
        """identity, as a copy"""
        rng = np.random.default_rng(2)
        hmms = _random_set(rng)
        obs = ObservationSequence(rng.normal(size=(6, 2)))
        same = baum_welch(hmms, [(obs, ["v01"])], iterations=0)
        assert same is not hmms
        for label in hmms.labels:
            assert np.array_equal(same[label].transitions, hmms[label].transitions)
            for a, b in zip(same[label].states, hmms[label].states):
                assert np.array_equal(a.means, b.means)
                assert np.array_equal(a.variances, b.variances)
                assert np.array_equal(a.weights, b.weights)

    def test_likelihood_non_decreasing(self) -> None:
        """six passes never lower the total log-likelihood"""
        rng = np.random.default_rng(19)
        for _ in range(20):
            data = []
            for _ in range(3):
                labels = [str(x) for x in rng.choice(["v01", "v02"], size=int(rng.integers(1, 4)))]
                data.append((ObservationSequence(rng.normal(0.0, 2.0, (12, 2))), labels))
            hmms = flat_start([obs for obs, _ in data], ["v01", "v02"], n_states=2, n_mixtures=2)
            trained = baum_welch(hmms, data, iterations=6)
            history = trained.history
            assert len(history) == 6
            for before, after in zip(history[:-1], history[1:]):
                assert after >= before - 1e-6 * abs(before)

    def test_parallel_accumulation(self) -> None:
        """thread workers give the same models"""
        rng = np.random.default_rng(23)
        data = [(ObservationSequence(rng.normal(size=(8, 1))), ["v01", "v02"]) for _ in range(4)]
        hmms = flat_start([obs for obs, _ in data], ["v01", "v02"], n_states=2, n_mixtures=2)
        serial = baum_welch(hmms, data, iterations=2)
        threaded = baum_welch(hmms, data, iterations=2, workers=3)
        assert serial.history == pytest.approx(threaded.history)
        for a, b in zip(serial.gmms(), threaded.gmms()):
            assert a.means == pytest.approx(b.means)

    def test_short_utterance_skipped(self) -> None:
        """too few frames for the transcript: warned and skipped"""
        rng = np.random.default_rng(4)
        long_obs = ObservationSequence(rng.normal(size=(10, 1)))
        short_obs = ObservationSequence(rng.normal(size=(2, 1)))
        hmms = flat_start([long_obs], ["v01", "v02"], n_states=2, n_mixtures=1)
        messages: list = []
        sink = logger.add(messages.append, level="WARNING")
        try:
            trained = baum_welch(hmms, [(long_obs, ["v01", "v02"]), (short_obs, ["v01", "v02"])])
        finally:
            logger.remove(sink)
        assert any("skipped" in str(m) for m in messages)
        assert len(trained.history) == 1
        with pytest.raises(HmmError, match="no utterance"):
            baum_welch(hmms, [(short_obs, ["v01", "v02"])])

    def test_unknown_label(self) -> None:
        """transcripts must name existing models"""
        hmms = flat_start([ObservationSequence(np.arange(4.0))], ["v01"], n_states=1, n_mixtures=1)
        with pytest.raises(HmmError, match="v07"):
            baum_welch(hmms, [(ObservationSequence(np.arange(4.0)), ["v07"])])

    def test_tie_silence(self) -> None:
        """sp shares the centre state of sil through re-estimation"""
        rng = np.random.default_rng(8)
        data = [(ObservationSequence(rng.normal(size=(15, 2))), ["v18", "v01", "sp", "v02", "v18"]) for _ in range(3)]
        hmms = flat_start([obs for obs, _ in data], ["v01", "v02", "v18"], n_states=3, n_mixtures=2)
        tied = tie_silence(hmms)
        assert "sp" not in hmms
        assert tied["sp"].states[0] is tied["v18"].states[1]
        assert tied["sp"].is_tee
        assert tied["sp"].transitions[0].tolist() == pytest.approx([0.0, 0.7, 0.3])
        assert tied.tied == [(("v18", 1), ("sp", 0))]
        trained = baum_welch(tied, data, iterations=2)
        assert trained["sp"].states[0] is trained["v18"].states[1]
        assert trained.ties_hold()
        assert not np.array_equal(trained["sp"].states[0].means, tied["sp"].states[0].means)

    def test_tie_without_silence(self) -> None:
        """sil is required"""
        hmms = flat_start([ObservationSequence(np.arange(4.0))], ["v01"], n_states=1, n_mixtures=1)
        with pytest.raises(HmmError, match="silence"):
            tie_silence(hmms)
