# -*- coding: utf-8 -*-

"""Landmark Shapes, Similarity Transforms and Procrustes Alignment."""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from ..errors import ShapeError
from ..storage.io import IO

__all__ = (
    "Shape",
    "SimilarityTransform",
    "align_shape",
    "procrustes_align",
    "read_pts",
    "write_pts",
)

# below this a shape has no spread
EPS_SPREAD = 1e-12


@dataclass(frozen=True, eq=False)
class Shape:
    """Ordered landmarks, `points` is a read-only (n, 2) array of (x, y)."""

    points: np.ndarray

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] == 0:
            raise ShapeError(f"shape points must be (n, 2), got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ShapeError("shape coordinates must be finite")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "Shape":
        """From interleaved (x0, y0, x1, y1, ...)."""
        return cls(np.asarray(vector, dtype=np.float64).reshape(-1, 2))

    def as_vector(self) -> np.ndarray:
        """Interleaved (x0, y0, x1, y1, ...) copy."""
        return self.points.reshape(-1).copy()

    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    def rms_radius(self) -> float:
        """Root mean square distance of the points from the centroid."""
        centred = self.points - self.centroid()
        return float(np.sqrt(np.mean(np.sum(centred**2, axis=1))))

    def bounds(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max)"""
        low = self.points.min(axis=0)
        high = self.points.max(axis=0)
        return float(low[0]), float(low[1]), float(high[0]), float(high[1])

    def subset(self, indices: Sequence[int]) -> "Shape":
        return Shape(self.points[list(indices)])

    def translated(self, dx: float, dy: float) -> "Shape":
        return Shape(self.points + np.array([dx, dy]))

    def normalized(self) -> "Shape":
        """Centroid at the origin, unit RMS radius."""
        radius = self.rms_radius()
        if radius <= EPS_SPREAD:
            raise ShapeError("shape has all points coincident")
        return Shape((self.points - self.centroid()) / radius)

    def within(self, width: int, height: int) -> bool:
        """All points inside the pixel-centre extent of a width x height frame."""
        x0, y0, x1, y1 = self.bounds()
        return x0 >= 0 and y0 >= 0 and x1 <= width - 1 and y1 <= height - 1


@dataclass(frozen=True)
class SimilarityTransform:
    """x' = s R(theta) x + t"""

    scale: float = 1.0
    rotation: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ShapeError(f"similarity scale must be positive: {self.scale}")

    @classmethod
    def identity(cls) -> "SimilarityTransform":
        return cls()

    @classmethod
    def from_ab(cls, a: float, b: float, tx: float, ty: float) -> "SimilarityTransform":
        """From the linear form a = s cos(theta), b = s sin(theta)."""
        return cls(scale=math.hypot(a, b), rotation=math.atan2(b, a), tx=tx, ty=ty)

    @property
    def ab(self) -> tuple[float, float]:
        return self.scale * math.cos(self.rotation), self.scale * math.sin(self.rotation)

    def matrix(self) -> np.ndarray:
        """2 x 3 affine matrix."""
        a, b = self.ab
        return np.array([[a, -b, self.tx], [b, a, self.ty]])

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        m = self.matrix()
        return np.asarray(points, dtype=np.float64) @ m[:, :2].T + m[:, 2]

    def apply(self, shape: Shape) -> Shape:
        return Shape(self.apply_points(shape.points))

    def inverse(self) -> "SimilarityTransform":
        scale = 1.0 / self.scale
        inv = SimilarityTransform(scale=scale, rotation=-self.rotation)
        tx, ty = inv.apply_points(np.array([[self.tx, self.ty]]))[0]
        return SimilarityTransform(scale=scale, rotation=-self.rotation, tx=-tx, ty=-ty)

    def compose(self, other: "SimilarityTransform") -> "SimilarityTransform":
        """`other` first, then `self`."""
        tx, ty = self.apply_points(np.array([[other.tx, other.ty]]))[0]
        return SimilarityTransform(
            scale=self.scale * other.scale,
            rotation=self.rotation + other.rotation,
            tx=tx,
            ty=ty,
        )

    @classmethod
    def estimate(cls, src: Shape, dst: Shape) -> "SimilarityTransform":
        """Least-squares similarity taking `src` onto `dst`."""
        if src.n_points != dst.n_points:
            raise ShapeError(f"point counts differ: {src.n_points} != {dst.n_points}")
        c_src = src.centroid()
        c_dst = dst.centroid()
        x = src.points - c_src
        y = dst.points - c_dst
        norm = float(np.sum(x**2))
        if norm <= EPS_SPREAD:
            raise ShapeError("cannot estimate similarity from coincident points")
        a = float(np.sum(x * y)) / norm
        b = float(np.sum(x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0])) / norm
        if math.hypot(a, b) <= EPS_SPREAD:
            raise ShapeError("similarity estimate collapsed to zero scale")
        linear = cls.from_ab(a, b, 0.0, 0.0)
        tx, ty = c_dst - linear.apply_points(c_src[None, :])[0]
        return cls.from_ab(a, b, float(tx), float(ty))


def _fit_rotation_scale(points: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Rotate and scale centred `points` onto centred `target`."""
    norm = float(np.sum(points**2))
    a = float(np.sum(points * target)) / norm
    b = float(np.sum(points[:, 0] * target[:, 1] - points[:, 1] * target[:, 0])) / norm
    return points @ np.array([[a, b], [-b, a]])


def _canonical(points: np.ndarray) -> np.ndarray:
    """Major principal axis along +x, first clear landmark on the -x side."""
    cov = points.T @ points
    _, vectors = np.linalg.eigh(cov)
    major = vectors[:, -1]
    angle = -math.atan2(major[1], major[0])
    c, s = math.cos(angle), math.sin(angle)
    rotated = points @ np.array([[c, s], [-s, c]])
    for x in rotated[:, 0]:
        if abs(x) > 1e-6:
            if x > 0:
                rotated = -rotated
            break
    return rotated


def _normalize(points: np.ndarray) -> np.ndarray:
    centred = points - points.mean(axis=0)
    radius = float(np.sqrt(np.mean(np.sum(centred**2, axis=1))))
    if radius <= EPS_SPREAD:
        raise ShapeError("shape has all points coincident")
    return centred / radius


def align_shape(shape: Shape, target: Shape) -> Shape:
    """Normalise `shape` and rotate/scale it onto the normalised `target`."""
    return Shape(_fit_rotation_scale(_normalize(shape.points), _normalize(target.points)))


def procrustes_align(
    shapes: Sequence[Shape],
    tol: float = 1e-8,
    max_iters: int = 100,
) -> tuple[list[Shape], Shape]:
    """Generalised Procrustes alignment.

    Parameters:
        :shapes:list of Shape, identical point counts >= 3;
        :tol:float, stop once the mean moves less than this per coordinate;
        :max_iters:int, iteration cap;

    Returns the aligned shapes and the mean, centred with unit RMS radius
    and in canonical orientation.
    """
    if not shapes:
        raise ShapeError("procrustes_align needs at least one shape")
    counts = {s.n_points for s in shapes}
    if len(counts) != 1:
        raise ShapeError(f"shapes have mismatched point counts: {sorted(counts)}")
    if shapes[0].n_points < 3:
        raise ShapeError("shapes need at least 3 points")

    normalized = [_normalize(s.points) for s in shapes]
    mean = _canonical(normalized[0])
    for _ in range(max_iters):
        aligned = [_fit_rotation_scale(x, mean) for x in normalized]
        new_mean = _canonical(_normalize(np.mean(aligned, axis=0)))
        moved = float(np.max(np.abs(new_mean - mean)))
        mean = new_mean
        if moved < tol:
            break

    aligned = [Shape(_fit_rotation_scale(x, mean)) for x in normalized]
    return aligned, Shape(mean)


def read_pts(file: Union[str, Path]) -> Shape:
    """Read a `n_points: K` landmark file."""
    lines = [x.strip() for x in IO.load_line(file, skip_blank=True)]
    expected = -1
    points: list[tuple[float, float]] = []
    for number, line in enumerate(lines, start=1):
        if line.startswith("version") or line in ("{", "}"):
            continue
        if line.startswith("n_points"):
            expected = int(line.split(":", 1)[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ShapeError(f"{Path(file).name} line {number}: expected `x y`, got `{line}`")
        points.append((float(parts[0]), float(parts[1])))
    if expected < 0:
        raise ShapeError(f"{Path(file).name}: missing `n_points` header")
    if expected != len(points):
        raise ShapeError(f"{Path(file).name}: header says {expected} points, found {len(points)}")
    return Shape(np.array(points))


def write_pts(shape: Shape, file: Union[str, Path]) -> bool:
    """Write a `n_points: K` landmark file, coordinates in repr form."""
    texts = [f"n_points: {shape.n_points}"]
    texts.extend(f"{float(x)!r} {float(y)!r}" for x, y in shape.points)
    return IO.save_line(file, texts)
