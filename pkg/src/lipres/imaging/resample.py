# -*- coding: utf-8 -*-

"""Resolution Degradation.

Both resamplers use the pixel-centre convention: output pixel `i` of an
axis of length `n_out` looks at source coordinate

    x = (i + 0.5) * n_src / n_out - 0.5

so resampling to the same size is an exact identity.
"""

from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from ..errors import ResampleError, ShapeError
from .image import Image, Resolution

if TYPE_CHECKING:
    from ..geometry.shape import Shape

__all__ = (
    "Box",
    "downsample_nearest",
    "upsample_bilinear",
    "degrade",
    "degrade_window",
    "resolution_ladder",
    "resting_lip_height",
)

# (x0, y0, x1, y1), half open
Box = tuple[int, int, int, int]

LADDER: tuple[tuple[int, int], ...] = (
    (1440, 1080),
    (960, 720),
    (720, 540),
    (360, 270),
    (240, 180),
    (180, 135),
    (144, 108),
    (120, 90),
    (90, 67),
    (80, 60),
    (72, 54),
    (65, 49),
    (69, 45),
    (55, 42),
    (51, 39),
    (48, 36),
    (45, 34),
    (42, 32),
)


def _nearest_index(n_src: int, n_out: int) -> np.ndarray:
    """Nearest source index per output index, ties toward the lower index.

    Exact integer form of ceil(x - 0.5) with x the centre mapping.
    """
    i = np.arange(n_out, dtype=np.int64)
    num = (2 * i + 1) * n_src - 2 * n_out
    den = 2 * n_out
    index = -((-num) // den)
    return np.clip(index, 0, n_src - 1)


def _linear_weights(
    n_src: int, n_out: int, start: int = 0, stop: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lower index, upper index and fraction for output positions [start, stop)."""
    stop = n_out if stop is None else stop
    i = np.arange(start, stop, dtype=np.float64)
    x = (i + 0.5) * n_src / n_out - 0.5
    x = np.clip(x, 0.0, n_src - 1)
    lower = np.floor(x).astype(np.int64)
    upper = np.minimum(lower + 1, n_src - 1)
    return lower, upper, x - lower


def downsample_nearest(img: Image, target: Resolution) -> Image:
    """Nearest neighbour downsample to `target`."""
    if target.width > img.width or target.height > img.height:
        raise ResampleError(
            f"downsample_nearest cannot enlarge {img.resolution} to {target}"
        )
    cols = _nearest_index(img.width, target.width)
    rows = _nearest_index(img.height, target.height)
    return Image(img.data[np.ix_(rows, cols)])


def _bilinear(data: np.ndarray, target: Resolution, box: Box) -> np.ndarray:
    """Bilinear upsample of `data` evaluated on the output window `box`."""
    x0, y0, x1, y1 = box
    height, width = data.shape
    c_lo, c_hi, fx = _linear_weights(width, target.width, x0, x1)
    r_lo, r_hi, fy = _linear_weights(height, target.height, y0, y1)

    # horizontal pass over the rows we need, then vertical
    left = data[:, c_lo]
    right = data[:, c_hi]
    rows = left + fx[None, :] * (right - left)
    top = rows[r_lo, :]
    bottom = rows[r_hi, :]
    out = top + fy[:, None] * (bottom - top)
    return np.clip(out, data.min(), data.max())


def upsample_bilinear(img: Image, target: Resolution) -> Image:
    """Bilinear upsample to `target`, edge samples clamped."""
    if target.width < img.width or target.height < img.height:
        raise ResampleError(
            f"upsample_bilinear cannot shrink {img.resolution} to {target}"
        )
    return Image(_bilinear(img.data, target, (0, 0, target.width, target.height)))


def degrade(img: Image, target: Resolution) -> Image:
    """Nearest down to `target`, bilinear back up to the original size."""
    small = downsample_nearest(img, target)
    return upsample_bilinear(small, img.resolution)


def degrade_window(img: Image, target: Resolution, box: Box) -> np.ndarray:
    """The `box` window of `degrade(img, target)`, computed without the rest.

    Bit-identical to `degrade(img, target).data[y0:y1, x0:x1]`.
    """
    x0, y0, x1, y1 = box
    if not (0 <= x0 < x1 <= img.width and 0 <= y0 < y1 <= img.height):
        raise ResampleError(f"window {box} outside {img.resolution}")
    if target == img.resolution:
        # both passes are exact identities at native size
        return img.data[y0:y1, x0:x1].copy()
    small = downsample_nearest(img, target)
    return _bilinear(small.data, img.resolution, box)


def resolution_ladder() -> list[Resolution]:
    """The 18 ladder resolutions, native first."""
    return [Resolution(w, h) for w, h in LADDER]


def resting_lip_height(
    rest_shape: "Shape",
    native: Resolution,
    target: Resolution,
    lip_indices: Sequence[int],
) -> float:
    """Closed-mouth lip height in pixels, rescaled from native to target rows."""
    indices = list(lip_indices)
    if not indices:
        raise ShapeError("resting_lip_height needs at least one lip landmark")
    ys = np.asarray(rest_shape.points)[indices, 1]
    return float(ys.max() - ys.min()) * target.height / native.height
