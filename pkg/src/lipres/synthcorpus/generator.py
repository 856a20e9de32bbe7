# -*- coding: utf-8 -*-

"""Synthetic Talking-lips Corpus Generator.

The corpus random stream (seeded by `seed`) invents the vocabulary, draws
the lines and the segment durations. Each frame then has its own stream
keyed by (seed, frame index) for landmark jitter and pixel noise, so
frames can be rendered in any order, in parallel, or again on demand.
"""

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np
from loguru._logger import Logger
from tqdm import tqdm

from ..errors import CorpusError
from ..geometry.shape import Shape, write_pts
from ..imaging.image import Image, save_pgm
from ..lexicon.dictionary import PronDict, format_dictionary
from ..lexicon.transcript import Transcript, transcribe_line, write_mlf
from ..lexicon.visemes import CMU_PHONES, SILENCE, VISEME_CLASSES, VISEMES
from ..storage.io import IO
from ..utils.timer import timing
from .config import CorpusConfig
from .render import LIP_INDICES, N_LANDMARKS, Blend, frame_shape, prototype_separation, render_frame, rest_shape

__all__ = (
    "CorpusGenerator",
    "CorpusManifest",
    "FrameTruth",
    "GroundTruth",
    "ManifestEntry",
    "generate_corpus",
)

FORMAT = "lipres-corpus"
VERSION = 1
# word names the decoder keeps for itself
RESERVED = frozenset({"sil", "sp"})
# cyclic successor offsets of the word chain and their probabilities
SUCCESSOR_STEPS = (1, 2, 3)
SUCCESSOR_PROBS = (0.6, 0.25, 0.15)
MAX_ATTEMPTS = 50


@dataclass(frozen=True, eq=False)
class FrameTruth:
    """Ground truth of one frame; `frame` counts over the whole corpus."""

    frame: int
    line_id: int
    label: str
    blend: Blend
    shape: Shape

    def to_dict(self) -> dict:
        return {
            "frame": self.frame,
            "line": self.line_id,
            "label": self.label,
            "blend": self.blend.pairs(),
            "shape": self.shape.as_vector(),
        }

    @classmethod
    def from_dict(cls, item: dict) -> "FrameTruth":
        return cls(
            frame=int(item["frame"]),
            line_id=int(item["line"]),
            label=str(item["label"]),
            blend=Blend.from_pairs(item["blend"]),
            shape=Shape.from_vector(np.asarray(item["shape"], dtype=np.float64)),
        )


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Per-frame truth plus the word and timed viseme transcript of every line.

    `spans[k]` is the inclusive (first, last) frame of line `k`.
    """

    frames: tuple[FrameTruth, ...]
    words: tuple[Transcript, ...]
    visemes: tuple[Transcript, ...]
    spans: tuple[tuple[int, int], ...]

    def counts(self) -> dict[str, tuple[int, int]]:
        """viseme -> (segments, frames)"""
        segments = {v: 0 for v in VISEMES}
        frames = {v: 0 for v in VISEMES}
        for line in self.visemes:
            for label, (start, end) in zip(line.tokens, line.times):
                segments[label] += 1
                frames[label] += end - start
        return {v: (segments[v], frames[v]) for v in VISEMES}


@dataclass(frozen=True)
class ManifestEntry:
    kind: str
    path: str
    md5: str


@dataclass(frozen=True)
class CorpusManifest:
    """Every artefact of a corpus with its checksum, paths relative to `root`."""

    root: Path
    entries: tuple[ManifestEntry, ...]

    FILE = "manifest.txt"

    def checksums(self) -> dict[str, str]:
        return {e.path: e.md5 for e in self.entries}

    def save(self) -> Path:
        file = self.root / self.FILE
        IO.save_line(file, (f"{e.kind}\t{e.path}\t{e.md5}" for e in self.entries))
        return file

    @classmethod
    def load(cls, root: Union[str, Path]) -> "CorpusManifest":
        folder = Path(root)
        entries = []
        for number, line in enumerate(IO.load_line(folder / cls.FILE, skip_blank=True), start=1):
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorpusError(f"{cls.FILE} line {number}: expected `kind path md5`, got `{line}`")
            entries.append(ManifestEntry(*parts))
        return cls(folder, tuple(entries))

    def verify(self) -> list[str]:
        """Paths whose content no longer matches."""
        bad = []
        for entry in self.entries:
            file = self.root / entry.path
            if not file.is_file() or IO.md5(file) != entry.md5:
                bad.append(entry.path)
        return bad


def _phones_of(viseme: str) -> list[str]:
    return sorted(p for p in VISEME_CLASSES[viseme] if p in CMU_PHONES)


def _take(pool: list[str], previous: str) -> str:
    for k, viseme in enumerate(pool):
        if viseme != previous:
            return pool.pop(k)
    return pool.pop(0)


class CorpusGenerator:
    """Plan, render and write a synthetic corpus."""

    _logger: Optional[Logger]

    def __init__(self, cfg: Optional[CorpusConfig] = None, logger: Optional[Logger] = None) -> None:
        """Init CorpusGenerator.

        Parameters:
            :cfg:CorpusConfig, defaults to the 108-line 1440x1080 corpus;
            :logger:Logger from `loguru` library, optional;
        """
        self.cfg = cfg or CorpusConfig()
        self._logger = logger
        self._rng = np.random.default_rng(self.cfg.seed)

        separation = prototype_separation(self.cfg)
        if separation < self.cfg.min_separation:
            raise CorpusError(
                f"prototype separation {separation:.3f} px below the required {self.cfg.min_separation}"
            )

    def _invent(self) -> list[tuple[str, tuple[str, ...]]]:
        """Words whose visemes cover v01..v17 `coverage_repeats` times, then random fillers."""
        cfg = self.cfg
        lo, hi = cfg.phones_per_word
        speech = [v for v in VISEMES if v != SILENCE]
        pool = [speech[k] for k in self._rng.permutation(len(speech) * cfg.coverage_repeats) % len(speech)]

        strings: list[list[str]] = []
        while pool:
            size = int(self._rng.integers(lo, hi + 1))
            word: list[str] = []
            while pool and len(word) < size:
                word.append(_take(pool, word[-1] if word else ""))
            strings.append(word)
        while len(strings) < cfg.vocab_size:
            size = int(self._rng.integers(lo, hi + 1))
            word = []
            while len(word) < size:
                choices = [v for v in speech if not word or v != word[-1]]
                word.append(choices[int(self._rng.integers(len(choices)))])
            strings.append(word)

        result: list[tuple[str, tuple[str, ...]]] = []
        names: set[str] = set()
        prons: set[tuple[str, ...]] = set()
        for visemes in strings:
            phones = tuple(p[int(self._rng.integers(len(p)))] for p in map(_phones_of, visemes))
            if phones in prons:
                continue
            prons.add(phones)
            name = "".join(phones)
            stem, k = name, 2
            while name in names or name in RESERVED:
                name, k = f"{stem}{k}", k + 1
            names.add(name)
            result.append((name, phones))
        return result

    @cached_property
    def vocabulary(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        return self.cfg.vocabulary or tuple(self._invent())

    @cached_property
    def pron(self) -> PronDict:
        return PronDict({word.upper(): [phones] for word, phones in self.vocabulary})

    def _lines(self) -> list[list[str]]:
        """Lines walked along a random cyclic word chain, so bigrams carry structure."""
        cfg = self.cfg
        words = [w for w, _ in self.vocabulary]
        order = [words[k] for k in self._rng.permutation(len(words))]
        position = {w: k for k, w in enumerate(order)}
        lo, hi = cfg.words_per_line
        lines = []
        for _ in range(cfg.n_lines):
            size = int(self._rng.integers(lo, hi + 1))
            line = [order[int(self._rng.integers(len(order)))]]
            while len(line) < size:
                if self._rng.random() < cfg.successor_bias:
                    step = SUCCESSOR_STEPS[int(self._rng.choice(len(SUCCESSOR_STEPS), p=SUCCESSOR_PROBS))]
                    line.append(order[(position[line[-1]] + step) % len(order)])
                else:
                    line.append(order[int(self._rng.integers(len(order)))])
            lines.append(line)
        return lines

    def _timeline(self, lines: list[list[str]]) -> GroundTruth:
        cfg = self.cfg
        frames: list[FrameTruth] = []
        words: list[Transcript] = []
        visemes: list[Transcript] = []
        spans: list[tuple[int, int]] = []
        for line_id, tokens in enumerate(lines):
            labels = transcribe_line(tokens, self.pron, line_id).tokens
            first = len(frames)
            times = []
            for k, label in enumerate(labels):
                lo, hi = cfg.silence_frames if label == SILENCE else cfg.frames_per_viseme
                length = int(self._rng.integers(lo, hi + 1))
                start = len(frames) - first
                times.append((start, start + length))
                for j in range(length):
                    blend = self._blend(labels, k, (j + 0.5) / length)
                    index = len(frames)
                    frames.append(FrameTruth(index, line_id, label, blend, frame_shape(blend, cfg, index)))
            words.append(Transcript(tuple(tokens), line_id=line_id))
            visemes.append(Transcript(labels, line_id=line_id, times=tuple(times)))
            spans.append((first, len(frames) - 1))
        return GroundTruth(tuple(frames), tuple(words), tuple(visemes), tuple(spans))

    @staticmethod
    def _blend(labels: tuple[str, ...], k: int, position: float) -> Blend:
        """Mix with the neighbour on the near side; 50/50 at every boundary."""
        if position < 0.5 and k > 0:
            return Blend.mix(labels[k], labels[k - 1], 0.5 + position)
        if position > 0.5 and k + 1 < len(labels):
            return Blend.mix(labels[k], labels[k + 1], 1.5 - position)
        return Blend.pure(labels[k])

    @cached_property
    def truth(self) -> GroundTruth:
        """Draw lines until every viseme reaches `min_count` segments."""
        cfg = self.cfg
        vocabulary = self.vocabulary
        for attempt in range(1, MAX_ATTEMPTS + 1):
            truth = self._timeline(self._lines())
            short = [v for v, (segments, _) in truth.counts().items() if segments < cfg.min_count]
            if not short:
                if self._logger:
                    self._logger.info(
                        "corpus planned: {} lines, {} frames, {} words, attempt {}",
                        len(truth.words),
                        len(truth.frames),
                        len(vocabulary),
                        attempt,
                    )
                return truth
            if self._logger:
                self._logger.debug("attempt {}: visemes below {} segments: {}", attempt, cfg.min_count, short)
        raise CorpusError(f"no draw of {cfg.n_lines} lines gives every viseme {cfg.min_count} segments")

    def key_frames(self) -> list[int]:
        """The first frame and `n_key_frames - 1` others, sorted."""
        n = len(self.truth.frames)
        count = min(self.cfg.n_key_frames, n)
        rng = np.random.default_rng([self.cfg.seed, n])
        others = rng.choice(np.arange(1, n), size=count - 1, replace=False)
        return [0, *sorted(int(k) for k in others)]

    def render(self, index: int) -> Image:
        frame = self.truth.frames[index]
        image, _ = render_frame(frame.blend, self.cfg, frame.frame)
        return image

    def _write_frames(self, folder: Path, indices: list[int], progress: bool) -> list[Path]:
        IO.dir_create(folder)

        def one(index: int) -> Path:
            file = folder / f"frame_{index:06d}.pgm"
            save_pgm(self.render(index), file)
            return file

        bar = tqdm(total=len(indices), unit="frame", disable=not progress)
        try:
            if self.cfg.workers > 1:
                with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                    files = []
                    for file in pool.map(one, indices):
                        files.append(file)
                        bar.update(1)
                    return files
            files = []
            for index in indices:
                files.append(one(index))
                bar.update(1)
            return files
        finally:
            bar.close()

    @timing
    def generate(self, out_dir: Union[str, Path], progress: bool = False) -> CorpusManifest:
        """Write the corpus into `out_dir` and return its manifest."""
        root = Path(out_dir)
        try:
            IO.dir_create(root)
            marker = root / ".write-test"
            marker.touch()
            marker.unlink()
        except OSError as error:
            raise CorpusError(f"corpus directory is not writable: {root} ({error})") from error

        cfg = self.cfg
        truth = self.truth
        keys = self.key_frames()
        entries: list[tuple[str, Path]] = []

        IO.save_dict(
            root / "corpus.json",
            {
                "format": FORMAT,
                "version": VERSION,
                "generator": cfg.to_dict(),
                "native_resolution": str(cfg.native_resolution),
                "frame_rate": cfg.frame_rate,
                "n_frames": len(truth.frames),
                "n_landmarks": N_LANDMARKS,
                "lip_indices": list(LIP_INDICES),
                "key_frames": keys,
                "vocabulary": [[w, list(p)] for w, p in self.vocabulary],
            },
        )
        entries.append(("config", root / "corpus.json"))

        rows = ["line_id\tfirst_frame\tlast_frame\ttext"]
        rows.extend(f"{w.line_id}\t{a}\t{b}\t{w.text}" for w, (a, b) in zip(truth.words, truth.spans))
        IO.save_line(root / "lines.tsv", rows)
        entries.append(("lines", root / "lines.tsv"))

        IO.save_line(root / "dict.txt", format_dictionary(self.pron))
        entries.append(("dictionary", root / "dict.txt"))

        write_mlf(root / "words.mlf", truth.words, cfg.frame_rate)
        entries.append(("words_mlf", root / "words.mlf"))
        write_mlf(root / "visemes.mlf", truth.visemes, cfg.frame_rate)
        entries.append(("visemes_mlf", root / "visemes.mlf"))

        IO.save_jsonl(root / "groundtruth.jsonl", (f.to_dict() for f in truth.frames))
        entries.append(("groundtruth", root / "groundtruth.jsonl"))

        with open(root / "viseme_counts.csv", "w", newline="", encoding="utf8") as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(["viseme", "segments", "frames"])
            for viseme, (segments, frames) in truth.counts().items():
                writer.writerow([viseme, segments, frames])
        entries.append(("counts", root / "viseme_counts.csv"))

        write_pts(rest_shape(cfg), root / "rest.pts")
        entries.append(("rest", root / "rest.pts"))

        for file in self._write_frames(root / "keyframes", keys, progress):
            write_pts(truth.frames[int(file.stem.split("_")[1])].shape, file.with_suffix(".pts"))
            entries.append(("key_frame", file))
            entries.append(("key_points", file.with_suffix(".pts")))

        if cfg.write_frames == "all":
            for file in self._write_frames(root / "frames", list(range(len(truth.frames))), progress):
                entries.append(("frame", file))

        manifest = CorpusManifest(
            root,
            tuple(
                ManifestEntry(kind, file.relative_to(root).as_posix(), IO.md5(file))
                for kind, file in sorted(entries, key=lambda item: item[1].relative_to(root).as_posix())
            ),
        )
        manifest.save()
        if self._logger:
            self._logger.info("corpus written to {}: {} artefacts", root, len(manifest.entries))
        return manifest


def generate_corpus(
    cfg: CorpusConfig,
    out_dir: Union[str, Path],
    logger: Optional[Logger] = None,
) -> CorpusManifest:
    """Generate the corpus of `cfg` into `out_dir`."""
    return CorpusGenerator(cfg, logger=logger).generate(out_dir)
