# -*- coding: utf-8 -*-

"""Reading a Corpus Directory.

Synthetic and real corpora share one layout:

    corpus.json        native_resolution, frame_rate, lip_indices
    lines.tsv          line_id, first_frame, last_frame (inclusive), text
    dict.txt           CMU-format pronunciations
    rest.pts           closed-mouth landmarks
    keyframes/         landmarked frames, `<stem>.pts` next to `<stem>.pgm|png`
    frames/            every frame, lexicographic order = frame index

A synthetic corpus also carries its generator config and
`groundtruth.jsonl`; without `frames/` its frames are rendered again.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import regex as re

from ..errors import CorpusError, FrameError, LexiconError, ShapeError
from ..geometry.shape import Shape, read_pts
from ..imaging.image import Image, Resolution, read_frame
from ..lexicon.dictionary import PronDict, load_dictionary
from ..lexicon.transcript import Transcript
from ..storage.io import IO
from .config import CorpusConfig
from .generator import CorpusManifest, FrameTruth
from .render import render_frame

__all__ = ("Corpus",)

FRAME_SUFFIXES = (".pgm", ".png")
_DIGITS = re.compile(r"\d+")


@dataclass(frozen=True, eq=False)
class Corpus:
    """A loaded corpus; frames are read or rendered when asked for."""

    root: Path
    native_resolution: Resolution
    frame_rate: float
    lip_indices: tuple[int, ...]
    pron: PronDict
    lines: tuple[Transcript, ...]
    spans: tuple[tuple[int, int], ...]
    rest: Shape
    config: Optional[CorpusConfig] = None
    truth: tuple[FrameTruth, ...] = ()

    @property
    def synthetic(self) -> bool:
        return self.config is not None

    @cached_property
    def _frame_files(self) -> list[Path]:
        folder = self.root / "frames"
        if not folder.is_dir():
            return []
        return sorted((p for p in folder.iterdir() if p.suffix.lower() in FRAME_SUFFIXES), key=lambda p: p.name)

    @property
    def n_frames(self) -> int:
        return len(self._frame_files) or len(self.truth)

    def frame(self, index: int) -> Image:
        """Frame `index`, from `frames/` when present, rendered otherwise."""
        if self._frame_files:
            return read_frame(self._frame_files[index])
        if self.config is None or not self.truth:
            raise CorpusError(f"{self.root}: no frames directory and no ground truth to render from")
        item = self.truth[index]
        image, _ = render_frame(item.blend, self.config, item.frame)
        return image

    def line_frames(self, line_id: int) -> list[Image]:
        first, last = self.spans[line_id]
        return [self.frame(k) for k in range(first, last + 1)]

    def key_frames(self) -> list[tuple[int, Image, Shape]]:
        """(frame index, image, landmarks) of every landmarked frame."""
        folder = self.root / "keyframes"
        result = []
        for pts in sorted(folder.glob("*.pts")):
            images = [pts.with_suffix(s) for s in FRAME_SUFFIXES if pts.with_suffix(s).is_file()]
            if not images:
                raise CorpusError(f"key frame {pts.name} has no image next to it")
            digits = _DIGITS.findall(pts.stem)
            index = int(digits[-1]) if digits else -1
            result.append((index, read_frame(images[0]), read_pts(pts)))
        if len(result) < 2:
            raise CorpusError(f"{folder}: need at least 2 key frames, found {len(result)}")
        return result

    @classmethod
    def load(cls, root: Union[str, Path], verify: bool = False) -> "Corpus":
        """Read the corpus at `root`; `verify` checks the manifest checksums."""
        folder = Path(root)
        if not folder.is_dir():
            raise CorpusError(f"corpus directory not found: {folder}")
        try:
            meta = IO.load_dict(folder / "corpus.json")
        except (OSError, ValueError) as error:
            raise CorpusError(f"{folder}: unreadable corpus.json ({error})") from error
        missing = [k for k in ("native_resolution", "frame_rate", "lip_indices") if k not in meta]
        if missing:
            raise CorpusError(f"{folder}/corpus.json lacks {missing}")

        if verify and (folder / CorpusManifest.FILE).is_file():
            bad = CorpusManifest.load(folder).verify()
            if bad:
                raise CorpusError(f"{folder}: checksum mismatch for {bad[:5]}")

        try:
            pron = load_dictionary(folder / "dict.txt")
            rest = read_pts(folder / "rest.pts")
            lines, spans = cls._read_lines(folder / "lines.tsv")
        except OSError as error:
            raise CorpusError(f"{folder}: missing corpus file ({error})") from error
        except (LexiconError, ShapeError, FrameError) as error:
            raise CorpusError(f"{folder}: {error}") from error

        config = None
        truth: tuple[FrameTruth, ...] = ()
        if "generator" in meta:
            config = CorpusConfig.from_dict(meta["generator"])
            file = folder / "groundtruth.jsonl"
            if file.is_file():
                truth = tuple(FrameTruth.from_dict(item) for item in IO.load_jsonl(file))

        return cls(
            root=folder,
            native_resolution=Resolution.parse(str(meta["native_resolution"])),
            frame_rate=float(meta["frame_rate"]),
            lip_indices=tuple(int(k) for k in meta["lip_indices"]),
            pron=pron,
            lines=lines,
            spans=spans,
            rest=rest,
            config=config,
            truth=truth,
        )

    @staticmethod
    def _read_lines(file: Path) -> tuple[tuple[Transcript, ...], tuple[tuple[int, int], ...]]:
        lines, spans = [], []
        for number, raw in enumerate(IO.load_line(file, skip_blank=True), start=1):
            if raw.startswith("line_id"):
                continue
            parts = raw.split("\t")
            if len(parts) != 4:
                raise CorpusError(f"{file.name} line {number}: expected 4 tab-separated fields")
            try:
                line_id, first, last = (int(p) for p in parts[:3])
            except ValueError:
                raise CorpusError(f"{file.name} line {number}: non-integer frame fields") from None
            if line_id != len(lines):
                raise CorpusError(f"{file.name} line {number}: line ids must count from 0, got {line_id}")
            if last < first:
                raise CorpusError(f"{file.name} line {number}: last frame {last} before first {first}")
            lines.append(Transcript(tuple(parts[3].split()), line_id=line_id))
            spans.append((first, last))
        if not lines:
            raise CorpusError(f"{file.name}: no lines")
        return tuple(lines), tuple(spans)
