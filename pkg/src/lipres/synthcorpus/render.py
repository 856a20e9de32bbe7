# -*- coding: utf-8 -*-

"""Viseme Prototypes and Frame Rendering.

A face carries 49 landmarks: 12 outer and 8 inner lip points, 17 along
the jaw, 7 on the nose and 5 on the cheeks. Every viseme has a prototype
mouth (opening, width, rounding) and a prototype interior texture (teeth
and tongue visibility). A frame is a linear blend of at most two
prototypes, plus landmark jitter and pixel noise drawn from a stream keyed
by (seed, frame index).
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from matplotlib.path import Path as PolyPath
from scipy.ndimage import gaussian_filter

from ..errors import CorpusError
from ..geometry.shape import Shape
from ..imaging.image import Image
from ..lexicon.visemes import SILENCE, VISEMES
from .config import CorpusConfig

__all__ = (
    "Blend",
    "LIP_INDICES",
    "N_LANDMARKS",
    "PROTOTYPES",
    "VisemeStyle",
    "face_landmarks",
    "frame_shape",
    "prototype_separation",
    "prototype_shape",
    "render_frame",
    "rest_shape",
)

OUTER = tuple(range(0, 12))
INNER = tuple(range(12, 20))
JAW = tuple(range(20, 37))
NOSE = tuple(range(37, 44))
CHEEK = tuple(range(44, 49))
LIP_INDICES: tuple[int, ...] = OUTER + INNER
N_LANDMARKS = 49

BACKGROUND = 0.25
SKIN = 0.62
LIP = 0.40
INTERIOR = 0.08
TEETH = 0.85
TONGUE = 0.38


@dataclass(frozen=True)
class VisemeStyle:
    """Mouth parameters at the 26 px reference lip height.

    `opening` adds to the outer lip height and sets the inner gap,
    `width` scales the mouth width, `rounding` in [0, 1] fills out the
    lip contour, `teeth` and `tongue` in [0, 1] set their visibility.
    """

    opening: float
    width: float
    rounding: float
    teeth: float
    tongue: float


PROTOTYPES: dict[str, VisemeStyle] = {
    "v01": VisemeStyle(0.0, 0.90, 0.20, 0.0, 0.0),
    "v02": VisemeStyle(4.0, 1.05, 0.00, 0.9, 0.0),
    "v03": VisemeStyle(7.0, 1.00, 0.10, 0.5, 0.9),
    "v04": VisemeStyle(11.0, 1.02, 0.00, 0.4, 0.6),
    "v05": VisemeStyle(3.0, 1.15, 0.00, 1.0, 0.0),
    "v06": VisemeStyle(14.0, 0.96, 0.15, 0.2, 0.9),
    "v07": VisemeStyle(8.0, 0.82, 0.50, 0.2, 0.3),
    "v08": VisemeStyle(9.0, 0.74, 0.75, 0.8, 0.0),
    "v09": VisemeStyle(2.0, 0.66, 1.00, 0.0, 0.0),
    "v10": VisemeStyle(7.0, 1.18, 0.00, 0.6, 0.2),
    "v11": VisemeStyle(15.0, 1.10, 0.00, 0.4, 0.4),
    "v12": VisemeStyle(22.0, 1.00, 0.10, 0.2, 0.5),
    "v13": VisemeStyle(12.0, 0.88, 0.30, 0.1, 0.6),
    "v14": VisemeStyle(5.0, 0.72, 0.90, 0.0, 0.2),
    "v15": VisemeStyle(16.0, 0.78, 0.70, 0.3, 0.1),
    "v16": VisemeStyle(5.0, 1.25, 0.00, 0.9, 0.1),
    "v17": VisemeStyle(19.0, 0.84, 0.60, 0.1, 0.3),
    "v18": VisemeStyle(0.0, 1.00, 0.00, 0.0, 0.0),
}


@dataclass(frozen=True)
class Blend:
    """Weights over at most two visemes, summing to one."""

    visemes: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "visemes", tuple(self.visemes))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not 1 <= len(self.visemes) <= 2 or len(self.weights) != len(self.visemes):
            raise CorpusError(f"invalid blend: {self.visemes} with weights {self.weights}")
        unknown = [v for v in self.visemes if v not in PROTOTYPES]
        if unknown:
            raise CorpusError(f"invalid blend: unknown visemes {unknown}")
        if any(not 0.0 <= w <= 1.0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
            raise CorpusError(f"invalid blend: weights {self.weights} must lie in [0, 1] and sum to 1")

    @classmethod
    def pure(cls, viseme: str) -> "Blend":
        return cls((viseme,), (1.0,))

    @classmethod
    def mix(cls, first: str, second: str, weight: float) -> "Blend":
        """`weight` on `first`, the rest on `second`."""
        return cls((first, second), (weight, 1.0 - weight))

    def pairs(self) -> list[list]:
        """JSON form, [[viseme, weight], ...]."""
        return [[v, w] for v, w in zip(self.visemes, self.weights)]

    @classmethod
    def from_pairs(cls, pairs: list) -> "Blend":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


def mouth_centre(cfg: CorpusConfig) -> np.ndarray:
    res = cfg.native_resolution
    return np.array([res.width / 2.0, 0.6 * res.height])


def _local_landmarks(style: VisemeStyle) -> np.ndarray:
    """Landmarks at reference scale around the mouth centre, y down."""
    points = np.zeros((N_LANDMARKS, 2))
    half = 50.0 * style.width
    height = 13.0 + style.opening / 2.0
    power = 1.0 - 0.5 * style.rounding

    t = 2.0 * np.pi * np.arange(12) / 12.0
    sin = np.sin(t)
    lift = height * np.abs(sin) ** power
    points[list(OUTER), 0] = half * np.cos(t)
    points[list(OUTER), 1] = np.where(sin >= 0.0, -lift, lift)

    # a closed mouth keeps a 2 px seam so the inner points never coincide
    gap = max(style.opening / 2.0, 1.0)
    t = 2.0 * np.pi * np.arange(8) / 8.0
    sin = np.sin(t)
    points[list(INNER), 0] = 0.8 * half * np.cos(t)
    points[list(INNER), 1] = np.where(sin >= 0.0, -gap, gap) * np.abs(sin)

    t = np.linspace(0.05 * np.pi, 0.95 * np.pi, len(JAW))
    drop = 0.6 * style.opening * np.sin(t)
    points[list(JAW), 0] = 150.0 * np.cos(t)
    points[list(JAW), 1] = -10.0 + 120.0 * np.sin(t) + drop

    nostrils = np.array([-30.0, -15.0, 0.0, 15.0, 30.0])
    points[list(NOSE[:5]), 0] = nostrils
    points[list(NOSE[:5]), 1] = -80.0 + 0.004 * nostrils**2
    points[list(NOSE[5:]), :] = [[1.5, -125.0], [0.0, -165.0]]

    points[list(CHEEK), :] = [[-100.0, -55.0], [100.0, -55.0], [-115.0, 10.0], [115.0, 10.0], [0.0, 62.0]]
    points[CHEEK[-1], 1] += 0.3 * style.opening
    return points


def face_landmarks(style: VisemeStyle, cfg: CorpusConfig) -> np.ndarray:
    """Landmarks of `style` in native frame coordinates."""
    return _local_landmarks(style) * cfg.scale + mouth_centre(cfg)


def prototype_shape(viseme: str, cfg: CorpusConfig) -> Shape:
    if viseme not in PROTOTYPES:
        raise CorpusError(f"no prototype for viseme `{viseme}`")
    return Shape(face_landmarks(PROTOTYPES[viseme], cfg))


def prototype_separation(cfg: CorpusConfig) -> float:
    """Smallest RMS lip landmark distance between two prototypes, native pixels."""
    lips = {v: face_landmarks(PROTOTYPES[v], cfg)[list(LIP_INDICES)] for v in VISEMES}
    return min(
        float(np.sqrt(np.mean(np.sum((lips[a] - lips[b]) ** 2, axis=1)))) for a, b in combinations(VISEMES, 2)
    )


def _window(points: np.ndarray, pad: float, width: int, height: int) -> tuple[int, int, int, int]:
    low = np.floor(points.min(axis=0) - pad).astype(int)
    high = np.ceil(points.max(axis=0) + pad).astype(int)
    return max(low[0], 0), max(low[1], 0), min(high[0] + 1, width), min(high[1] + 1, height)


def _paint(points: np.ndarray, teeth: float, tongue: float, cfg: CorpusConfig) -> np.ndarray:
    """Noise-free frame of one blended face."""
    res = cfg.native_resolution
    s = cfg.scale
    data = np.full((res.height, res.width), BACKGROUND)

    jaw = points[list(JAW)]
    top = points[NOSE[-1], 1] - 25.0 * s
    face = np.vstack([jaw, [[jaw[-1, 0], top], [jaw[0, 0], top]]])
    sigma = max(0.6, 0.8 * s)
    x0, y0, x1, y1 = _window(face, 4.0 * sigma + 2.0, res.width, res.height)
    ys, xs = np.mgrid[y0:y1, x0:x1]
    grid = np.column_stack([xs.ravel(), ys.ravel()]).astype(np.float64)

    def inside(polygon: np.ndarray) -> np.ndarray:
        return PolyPath(polygon).contains_points(grid).reshape(xs.shape)

    centre = points[list(OUTER)].mean(axis=0)
    patch = np.where(inside(face), SKIN + 0.04 * (xs - centre[0]) / (150.0 * s), BACKGROUND)
    for k in (1, 3):
        nx, ny = points[NOSE[k]]
        patch -= 0.25 * np.exp(-((xs - nx) ** 2 + (ys - ny) ** 2) / (2.0 * (4.0 * s) ** 2))

    outer = inside(points[list(OUTER)])
    inner = inside(points[list(INNER)])
    patch = np.where(outer & ~inner, LIP - 0.04 * (ys - centre[1]) / (13.0 * s), patch)

    y_top = points[INNER[2], 1]
    y_bottom = points[INNER[6], 1]
    depth = (ys - y_top) / max(y_bottom - y_top, 1e-9)
    mouth = np.full(xs.shape, INTERIOR)
    mouth = np.where(depth < 0.4, INTERIOR + teeth * (TEETH - INTERIOR), mouth)
    mouth = np.where(depth > 0.65, INTERIOR + tongue * (TONGUE - INTERIOR), mouth)
    patch = np.where(inner, mouth, patch)

    data[y0:y1, x0:x1] = gaussian_filter(patch, sigma=sigma, mode="nearest")
    return data


def _jittered(blend: Blend, cfg: CorpusConfig, rng: np.random.Generator) -> Shape:
    points = np.zeros((N_LANDMARKS, 2))
    for viseme, weight in zip(blend.visemes, blend.weights):
        points += weight * face_landmarks(PROTOTYPES[viseme], cfg)
    if cfg.articulation_jitter > 0:
        points = points + rng.normal(0.0, cfg.articulation_jitter, size=points.shape)
    shape = Shape(points)
    res = cfg.native_resolution
    if not shape.within(res.width, res.height):
        raise CorpusError(f"face of lip height {cfg.lip_height_rest} does not fit a {res} frame")
    return shape


def frame_shape(blend: Blend, cfg: CorpusConfig, frame_index: int = 0) -> Shape:
    """The landmarks `render_frame` returns, without painting the frame."""
    return _jittered(blend, cfg, np.random.default_rng([cfg.seed, frame_index]))


def render_frame(blend: Blend, cfg: CorpusConfig, frame_index: int = 0) -> tuple[Image, Shape]:
    """Render one frame of `blend` and return it with its exact landmarks.

    Parameters:
        :blend:Blend, at most two visemes with weights summing to one;
        :cfg:CorpusConfig, frame size, face scale, noise and jitter;
        :frame_index:int, selects the (seed, frame_index) random stream;
    """
    rng = np.random.default_rng([cfg.seed, frame_index])
    shape = _jittered(blend, cfg, rng)
    teeth = sum(w * PROTOTYPES[v].teeth for v, w in zip(blend.visemes, blend.weights))
    tongue = sum(w * PROTOTYPES[v].tongue for v, w in zip(blend.visemes, blend.weights))
    data = _paint(shape.points, teeth, tongue, cfg)
    if cfg.texture_noise_std > 0:
        data = data + rng.normal(0.0, cfg.texture_noise_std, size=data.shape)
    return Image(np.clip(data, 0.0, 1.0)), shape


def rest_shape(cfg: CorpusConfig) -> Shape:
    """Jitter-free closed mouth of silence."""
    return prototype_shape(SILENCE, cfg)
