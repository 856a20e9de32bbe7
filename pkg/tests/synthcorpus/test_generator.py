# -*- coding: utf-8 -*-

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from lipres.errors import CorpusError
from lipres.geometry.shape import read_pts
from lipres.imaging.image import Resolution, read_frame
from lipres.lexicon.dictionary import load_dictionary
from lipres.lexicon.transcript import read_mlf
from lipres.lexicon.visemes import SILENCE, VISEMES, viseme_of
from lipres.storage.io import IO
from lipres.synthcorpus.config import CorpusConfig
from lipres.synthcorpus.corpus import Corpus
from lipres.synthcorpus.generator import CorpusGenerator, CorpusManifest, generate_corpus
from lipres.synthcorpus.render import render_frame

SMALL = CorpusConfig(
    native_resolution=Resolution(200, 150),
    lip_height_rest=10.0,
    min_separation=0.3,
    n_lines=12,
    vocab_size=20,
    min_count=2,
    n_key_frames=5,
)


class Tester:
    """Test the Corpus Generator."""

    def test_default_plan(self) -> None:
        """108 lines, every viseme at least 20 times, contiguous segments"""
        generator = CorpusGenerator(CorpusConfig())
        truth = generator.truth
        assert len(truth.words) == 108
        counts = truth.counts()
        assert all(counts[v][0] >= 20 for v in VISEMES)
        assert counts[SILENCE][0] == 2 * 108

        frame = 0
        for line, visemes, (first, last) in zip(truth.words, truth.visemes, truth.spans):
            assert first == frame
            assert visemes.times[0][0] == 0
            for (_, end), (start, _) in zip(visemes.times[:-1], visemes.times[1:]):
                assert end == start
            assert visemes.times[-1][1] == last - first + 1
            for label, (start, end) in zip(visemes.tokens, visemes.times):
                assert {f.label for f in truth.frames[first + start : first + end]} == {label}
                assert {f.line_id for f in truth.frames[first + start : first + end]} == {line.line_id}
            frame = last + 1
        assert frame == len(truth.frames)
        res = generator.cfg.native_resolution
        assert all(f.shape.within(res.width, res.height) for f in truth.frames)

    def test_vocabulary(self) -> None:
        """invented words use CMU phones and cover every speech viseme"""
        generator = CorpusGenerator(SMALL)
        covered = set()
        for word, phones in generator.vocabulary:
            assert word not in ("sil", "sp")
            covered.update(viseme_of(p) for p in phones)
        assert covered == set(VISEMES) - {SILENCE}
        assert len(generator.vocabulary) >= SMALL.vocab_size - 3
        assert len({w for w, _ in generator.vocabulary}) == len(generator.vocabulary)

    def test_boundary_blends(self) -> None:
        """frames mix with the neighbouring viseme, evenly at boundaries"""
        truth = CorpusGenerator(SMALL).truth
        for frame in truth.frames:
            assert frame.blend.visemes[0] == frame.label
            assert frame.blend.weights[0] >= 0.5

    def test_generate(self, tmp_path: Path) -> None:
        """files, manifest and their agreement with the plan"""
        manifest = generate_corpus(SMALL, tmp_path / "a")
        root = manifest.root
        kinds = {e.kind for e in manifest.entries}
        assert {"config", "lines", "dictionary", "words_mlf", "visemes_mlf", "groundtruth", "counts", "rest"} <= kinds
        assert sum(e.kind == "key_frame" for e in manifest.entries) == SMALL.n_key_frames
        assert not (root / "frames").exists()
        assert manifest.verify() == []
        assert CorpusManifest.load(root).checksums() == manifest.checksums()

        lines = IO.load_line(root / "lines.tsv", skip_blank=True)
        assert len(lines) == SMALL.n_lines + 1
        words = read_mlf(root / "words.mlf")
        visemes = read_mlf(root / "visemes.mlf")
        assert len(words) == len(visemes) == SMALL.n_lines
        assert all(v.tokens[0] == v.tokens[-1] == SILENCE for v in visemes)

        pron = load_dictionary(root / "dict.txt")
        for line in words:
            for word in line.tokens:
                assert word in pron
        assert len(IO.load_line(root / "viseme_counts.csv", skip_blank=True)) == len(VISEMES) + 1
        assert len(list(IO.load_jsonl(root / "groundtruth.jsonl"))) == len(CorpusGenerator(SMALL).truth.frames)

    def test_determinism(self, tmp_path: Path) -> None:
        """same config, same bytes; threads change nothing"""
        first = generate_corpus(SMALL, tmp_path / "a").checksums()
        second = generate_corpus(SMALL, tmp_path / "b").checksums()
        assert first == second
        threaded = generate_corpus(replace(SMALL, workers=2), tmp_path / "c").checksums()
        assert {k: v for k, v in threaded.items() if k != "corpus.json"} == {
            k: v for k, v in first.items() if k != "corpus.json"
        }
        other = generate_corpus(replace(SMALL, seed=43), tmp_path / "d").checksums()
        assert other["groundtruth.jsonl"] != first["groundtruth.jsonl"]

    def test_load(self, tmp_path: Path) -> None:
        """a synthetic corpus reads back and renders the same frames"""
        generate_corpus(SMALL, tmp_path / "a")
        corpus = Corpus.load(tmp_path / "a", verify=True)
        truth = CorpusGenerator(SMALL).truth
        assert corpus.synthetic
        assert corpus.config == SMALL
        assert corpus.native_resolution == SMALL.native_resolution
        assert corpus.n_frames == len(truth.frames)
        assert [t.tokens for t in corpus.lines] == [t.tokens for t in truth.words]
        assert corpus.spans == truth.spans
        assert np.array_equal(corpus.truth[7].shape.points, truth.frames[7].shape.points)

        keys = corpus.key_frames()
        assert len(keys) == SMALL.n_key_frames
        assert keys[0][0] == 0
        for index, image, shape in keys:
            rendered, _ = render_frame(truth.frames[index].blend, SMALL, index)
            assert np.array_equal(image.to_uint8(), rendered.to_uint8())
            assert np.array_equal(shape.points, truth.frames[index].shape.points)
            assert np.array_equal(corpus.frame(index).data, rendered.data)
        first, last = corpus.spans[0]
        assert len(corpus.line_frames(0)) == last - first + 1
        assert read_pts(tmp_path / "a" / "rest.pts").n_points == 49

    def test_real_format(self, tmp_path: Path) -> None:
        """without a generator section frames come from the frames directory"""
        cfg = replace(SMALL, n_lines=2, min_count=0, write_frames="all")
        manifest = generate_corpus(cfg, tmp_path / "a")
        root = manifest.root
        meta = IO.load_dict(root / "corpus.json")
        del meta["generator"]
        IO.save_dict(root / "corpus.json", meta)
        (root / "groundtruth.jsonl").unlink()

        corpus = Corpus.load(root)
        assert not corpus.synthetic
        assert corpus.n_frames == meta["n_frames"]
        assert np.array_equal(corpus.frame(3).data, read_frame(root / "frames" / "frame_000003.pgm").data)
        with pytest.raises(CorpusError, match="checksum"):
            Corpus.load(root, verify=True)

    def test_errors(self, tmp_path: Path) -> None:
        """unwritable targets, bad configs and missing corpora"""
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(CorpusError, match="not writable"):
            generate_corpus(SMALL, blocker / "corpus")
        with pytest.raises(CorpusError, match="separation"):
            CorpusGenerator(replace(SMALL, min_separation=50.0))
        with pytest.raises(CorpusError, match="segments"):
            CorpusGenerator(replace(SMALL, n_lines=1, min_count=5)).truth
        with pytest.raises(CorpusError, match="not found"):
            Corpus.load(tmp_path / "missing")
