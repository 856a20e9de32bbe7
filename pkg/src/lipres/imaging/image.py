# -*- coding: utf-8 -*-

"""Grayscale Frames and Frame File Ingestion."""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import filetype
import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from ..errors import FrameError

__all__ = (
    "Image",
    "Resolution",
    "ResolutionPoint",
    "load_frames",
    "read_frame",
    "save_pgm",
)

# ITU-R BT.601 luma weights
LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class Resolution:
    """Pixel grid size."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValueError(f"resolution must be at least 1x1: {self.width}x{self.height}")

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"

    @classmethod
    def parse(cls, text: str) -> "Resolution":
        """Parse `WxH`, e.g. `60x45`."""
        parts = text.lower().strip().split("x")
        if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
            raise ValueError(f"bad resolution format: {text}")
        return cls(width=int(parts[0]), height=int(parts[1]))


@dataclass(frozen=True)
class ResolutionPoint:
    """A ladder resolution calibrated by resting lip height."""

    resolution: Resolution
    resting_lip_height: float

    def __post_init__(self) -> None:
        if not self.resting_lip_height > 0:
            raise ValueError(f"resting lip height must be positive: {self.resting_lip_height}")


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable grayscale pixel grid, intensities in [0, 1].

    `data` is a read-only (height, width) float64 array in row-major order.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2 or data.size == 0:
            raise ValueError(f"image data must be a non-empty 2-D array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("image intensities must be finite")
        if data.min() < 0.0 or data.max() > 1.0:
            raise ValueError("image intensities must lie within [0, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def resolution(self) -> Resolution:
        return Resolution(self.width, self.height)

    @classmethod
    def from_bytes(cls, width: int, height: int, samples: bytes) -> "Image":
        """Build from 8-bit samples in row-major order, v -> v/255."""
        if len(samples) != width * height:
            raise ValueError(f"expected {width * height} samples, got {len(samples)}")
        array = np.frombuffer(samples, dtype=np.uint8).reshape(height, width)
        return cls(array.astype(np.float64) / 255.0)

    @classmethod
    def constant(cls, resolution: Resolution, value: float) -> "Image":
        """Uniform image."""
        return cls(np.full((resolution.height, resolution.width), float(value)))

    def to_uint8(self) -> np.ndarray:
        """Quantise back to 8-bit samples."""
        return np.rint(self.data * 255.0).astype(np.uint8)


def _sniff(head: bytes) -> str:
    """Detect frame format from leading bytes."""
    mime = filetype.guess_mime(head)
    if mime == "image/png":
        return "png"
    if head[:2] == b"P5":
        return "pgm"
    return ""


def read_frame(file: Union[str, Path]) -> Image:
    """Read one 8-bit PGM (P5) or PNG (gray/RGB) frame."""
    path = Path(file)
    try:
        with open(path, "rb") as fp:
            head = fp.read(262)
    except OSError as error:
        raise FrameError(f"unreadable frame file: {path.name} ({error})") from error

    kind = _sniff(head)
    if not kind:
        raise FrameError(f"unsupported frame format: {path.name}")

    try:
        with PILImage.open(path) as pil:
            pil.load()
            mode = pil.mode
            array = np.asarray(pil)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as error:
        raise FrameError(f"malformed frame file: {path.name} ({error})") from error

    if mode == "L":
        values = array.astype(np.float64)
    elif mode in ("RGB", "RGBA"):
        values = array[..., :3].astype(np.float64) @ LUMA
    elif mode == "LA":
        values = array[..., 0].astype(np.float64)
    else:
        raise FrameError(f"frame is not 8-bit gray or RGB ({mode}): {path.name}")

    return Image(np.clip(values / 255.0, 0.0, 1.0))


def load_frames(directory: Union[str, Path], pattern: str = "*") -> list[Image]:
    """Load every frame matching `pattern`, in lexicographic filename order."""
    folder = Path(directory)
    if not folder.is_dir():
        raise FrameError(f"frame directory not found: {folder}")
    files = sorted((p for p in folder.glob(pattern) if p.is_file()), key=lambda p: p.name)
    if not files:
        raise FrameError(f"no frame matches `{pattern}` in {folder}")
    return [read_frame(file) for file in files]


def save_pgm(img: Image, file: Union[str, Path]) -> bool:
    """Write binary P5 PGM, v -> round(255 v)."""
    path = Path(file)
    PILImage.fromarray(img.to_uint8()).save(path, format="PPM")
    return path.is_file()
