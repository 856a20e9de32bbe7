# -*- coding: utf-8 -*-

import numpy as np
import pytest

from lipres.errors import HmmError, TranscriptionError
from lipres.hmm.align import expand_words, force_align
from lipres.hmm.model import Gmm, Hmm, HmmSet, left_to_right
from lipres.hmm.observation import ObservationSequence
from lipres.hmm.train import tie_silence
from lipres.lexicon.transcript import Transcript

MEANS = {"v18": 0.0, "v01": 10.0, "v02": 20.0, "v03": 30.0}
VDICT = {"ab": [("v01", "v02")], "either": [("v01",), ("v02",)], "c": [("v03",)]}


def _separated() -> HmmSet:
    models = {label: Hmm(label, left_to_right(1), [Gmm([1.0], [[mean]], [[1.0]])]) for label, mean in MEANS.items()}
    return HmmSet(models, var_floor=np.array([1e-6]))


def _frames(*runs: tuple[str, int]) -> ObservationSequence:
    return ObservationSequence(np.concatenate([np.full(n, MEANS[label]) for label, n in runs]))


class Tester:
    """Test Forced Alignment."""

    def test_expand_words(self) -> None:
        """first pronunciations between silences, sp between words on request"""
        assert expand_words(["ab", "c"], VDICT) == ["v18", "v01", "v02", "v03", "v18"]
        assert expand_words(["ab", "c"], VDICT, short_pause=True) == ["v18", "v01", "v02", "sp", "v03", "v18"]
        with pytest.raises(TranscriptionError, match="line 4: word `raven`"):
            expand_words(Transcript(("raven",), line_id=4), VDICT)

    def test_boundaries(self) -> None:
        """well separated emissions give the true segment boundaries"""
        obs = _frames(("v18", 3), ("v01", 4), ("v02", 3), ("v18", 2))
        aligned = force_align(_separated(), obs, Transcript(("ab",), line_id=2), VDICT)
        assert aligned.tokens == ("v18", "v01", "v02", "v18")
        assert aligned.times == ((0, 3), (3, 7), (7, 10), (10, 12))
        assert aligned.line_id == 2

    def test_second_pronunciation(self) -> None:
        """emissions favouring the alternative select it"""
        obs = _frames(("v18", 2), ("v02", 3), ("v18", 2))
        assert force_align(_separated(), obs, ["either"], VDICT).tokens == ("v18", "v02", "v18")

    def test_short_pause(self) -> None:
        """sp appears only where the path spends frames in it"""
        hmms = tie_silence(_separated())
        obs = _frames(("v18", 3), ("v01", 2), ("v02", 2), ("v03", 2), ("v18", 3))
        assert force_align(hmms, obs, ["ab", "c"], VDICT).tokens == ("v18", "v01", "v02", "v03", "v18")
        obs = _frames(("v18", 3), ("v01", 2), ("v02", 2), ("v18", 2), ("v03", 2), ("v18", 3))
        aligned = force_align(hmms, obs, ["ab", "c"], VDICT)
        assert aligned.tokens == ("v18", "v01", "v02", "sp", "v03", "v18")
        assert aligned.times[3] == (7, 9)

    def test_errors(self) -> None:
        """unknown words, empty transcripts, too few frames"""
        obs = _frames(("v18", 2), ("v01", 2), ("v18", 2))
        with pytest.raises(TranscriptionError, match="not in dictionary"):
            force_align(_separated(), obs, ["raven"], VDICT)
        with pytest.raises(TranscriptionError, match="empty"):
            force_align(_separated(), obs, [], VDICT)
        with pytest.raises(HmmError, match="no path"):
            force_align(_separated(), _frames(("v18", 2)), ["ab"], VDICT)
