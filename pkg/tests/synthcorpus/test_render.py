# -*- coding: utf-8 -*-

from dataclasses import replace

import numpy as np
import pytest

from lipres.errors import CorpusError
from lipres.imaging.image import Resolution
from lipres.imaging.resample import resting_lip_height
from lipres.lexicon.visemes import VISEMES
from lipres.synthcorpus.config import CorpusConfig
from lipres.synthcorpus.render import (
    LIP_INDICES,
    PROTOTYPES,
    Blend,
    frame_shape,
    prototype_separation,
    prototype_shape,
    render_frame,
    rest_shape,
)

SMALL = CorpusConfig(native_resolution=Resolution(200, 150), lip_height_rest=10.0, min_separation=0.3)


class Tester:
    """Test Prototypes and Frame Rendering."""

    def test_prototypes(self) -> None:
        """every viseme has a distinct mouth"""
        assert set(PROTOTYPES) == set(VISEMES)
        assert prototype_separation(CorpusConfig()) >= 1.0
        assert prototype_separation(SMALL) == pytest.approx(prototype_separation(CorpusConfig()) * 10.0 / 26.0)
        with pytest.raises(CorpusError):
            prototype_shape("v19", SMALL)

    def test_resting_lip_height(self) -> None:
        """the closed mouth honours its configured height"""
        cfg = CorpusConfig()
        native = cfg.native_resolution
        assert resting_lip_height(rest_shape(cfg), native, native, LIP_INDICES) == pytest.approx(26.0, abs=0.5)
        small = resting_lip_height(rest_shape(SMALL), SMALL.native_resolution, SMALL.native_resolution, LIP_INDICES)
        assert small == pytest.approx(10.0, abs=1e-9)

    def test_pure_silence(self) -> None:
        """a pure silence frame without noise is the prototype"""
        cfg = replace(SMALL, texture_noise_std=0.0, articulation_jitter=0.0)
        image, shape = render_frame(Blend.pure("v18"), cfg, frame_index=5)
        assert np.array_equal(shape.points, prototype_shape("v18", cfg).points)
        assert image.resolution == cfg.native_resolution
        again, _ = render_frame(Blend.pure("v18"), cfg, frame_index=6)
        assert np.array_equal(image.data, again.data)

    def test_midpoint(self) -> None:
        """an even blend sits halfway between two prototypes"""
        cfg = replace(SMALL, articulation_jitter=0.0)
        _, shape = render_frame(Blend.mix("v09", "v12", 0.5), cfg)
        middle = (prototype_shape("v09", cfg).points + prototype_shape("v12", cfg).points) / 2.0
        assert np.allclose(shape.points, middle, atol=1e-12)

    def test_noise_streams(self) -> None:
        """seeds change pixels and jitter, never the underlying mouth"""
        blend = Blend.mix("v11", "v04", 0.7)
        first, shape_a = render_frame(blend, SMALL, frame_index=3)
        second, shape_b = render_frame(blend, replace(SMALL, seed=7), frame_index=3)
        assert not np.array_equal(first.data, second.data)
        assert not np.array_equal(shape_a.points, shape_b.points)
        assert np.abs(shape_a.points - shape_b.points).max() < 12 * SMALL.articulation_jitter
        repeat, shape_c = render_frame(blend, SMALL, frame_index=3)
        assert np.array_equal(first.data, repeat.data)
        assert np.array_equal(frame_shape(blend, SMALL, 3).points, shape_c.points)

    def test_appearance_differs(self) -> None:
        """different visemes paint different frames"""
        cfg = replace(SMALL, texture_noise_std=0.0, articulation_jitter=0.0)
        open_a, _ = render_frame(Blend.pure("v03"), cfg)
        open_b, _ = render_frame(Blend.pure("v10"), cfg)
        assert not np.array_equal(open_a.data, open_b.data)

    def test_invalid_blend(self) -> None:
        """at most two visemes, weights in [0, 1] summing to one"""
        with pytest.raises(CorpusError):
            Blend(("v01", "v02", "v03"), (0.2, 0.3, 0.5))
        with pytest.raises(CorpusError):
            Blend(("v01", "v02"), (0.5, 0.4))
        with pytest.raises(CorpusError):
            Blend(("v01", "v02"), (1.5, -0.5))
        with pytest.raises(CorpusError):
            Blend.pure("sp")
        with pytest.raises(CorpusError):
            Blend((), ())
        blend = Blend.mix("v01", "v02", 0.25)
        assert Blend.from_pairs(blend.pairs()) == blend

    def test_face_must_fit(self) -> None:
        """a face larger than the frame is refused"""
        cfg = replace(SMALL, native_resolution=Resolution(60, 40))
        with pytest.raises(CorpusError, match="does not fit"):
            render_frame(Blend.pure("v18"), cfg)
