# -*- coding: utf-8 -*-

"""Triangulation and Piecewise Affine Shape Normalisation."""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.spatial import Delaunay, QhullError

from ..errors import MeshError
from ..imaging.image import Image
from .shape import Shape

__all__ = (
    "PiecewiseAffineWarp",
    "TextureVector",
    "Triangulation",
    "barycentric",
    "bilinear_sample",
    "triangulate",
    "warp_to_reference",
)

# barycentric slack when testing containment
EPS_BARY = 1e-9
# positions this close to an integer are snapped onto it
EPS_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Index triples into the landmark list, read-only (t, 3) int array."""

    triangles: np.ndarray

    def __post_init__(self) -> None:
        triangles = np.array(self.triangles, dtype=np.int64).reshape(-1, 3)
        triangles.setflags(write=False)
        object.__setattr__(self, "triangles", triangles)

    def __len__(self) -> int:
        return int(self.triangles.shape[0])

    def edges(self) -> dict[tuple[int, int], list[int]]:
        """Undirected edge -> indices of the triangles using it."""
        result: dict[tuple[int, int], list[int]] = {}
        for index, (i, j, k) in enumerate(self.triangles.tolist()):
            for u, v in ((i, j), (j, k), (k, i)):
                result.setdefault((min(u, v), max(u, v)), []).append(index)
        return result

    def signed_areas(self, points: np.ndarray) -> np.ndarray:
        a = points[self.triangles[:, 0]]
        b = points[self.triangles[:, 1]]
        c = points[self.triangles[:, 2]]
        ab = b - a
        ac = c - a
        return 0.5 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])

    def check(self, reference: Shape) -> None:
        """Raise unless indices are in range, areas non-zero and all landmarks used."""
        n = reference.n_points
        if len(self) == 0:
            raise MeshError("triangulation is empty")
        if self.triangles.min() < 0 or self.triangles.max() >= n:
            raise MeshError(f"triangle index out of range for {n} landmarks")
        scale = max(reference.rms_radius(), 1.0)
        areas = self.signed_areas(reference.points)
        if np.any(np.abs(areas) <= 1e-12 * scale * scale):
            raise MeshError("degenerate triangle on the reference shape")
        unused = sorted(set(range(n)) - set(self.triangles.ravel().tolist()))
        if unused:
            raise MeshError(f"landmarks not in any triangle: {unused}")


def _incircle(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    rows = []
    for p in (a, b, c):
        dx, dy = p - d
        rows.append([dx, dy, dx * dx + dy * dy])
    return float(np.linalg.det(np.array(rows)))


def _canonical_triangle(tri: list[int], points: np.ndarray) -> tuple[int, int, int]:
    """Positive signed area, smallest index first."""
    i, j, k = tri
    ab = points[j] - points[i]
    ac = points[k] - points[i]
    if ab[0] * ac[1] - ab[1] * ac[0] < 0:
        j, k = k, j
    order = [i, j, k]
    start = order.index(min(order))
    return tuple(order[start:] + order[:start])  # type: ignore[return-value]


def _flip_cocircular(triangles: list[list[int]], points: np.ndarray) -> list[list[int]]:
    """Pick the diagonal holding the lowest index wherever four points share a circle."""
    scale = float(np.ptp(points, axis=0).max()) or 1.0
    tol = 1e-9 * scale**4
    for _ in range(4 * len(triangles) + 4):
        edges: dict[tuple[int, int], list[int]] = {}
        for index, (i, j, k) in enumerate(triangles):
            for u, v in ((i, j), (j, k), (k, i)):
                edges.setdefault((min(u, v), max(u, v)), []).append(index)
        flipped = False
        for (u, v), owners in sorted(edges.items()):
            if len(owners) != 2:
                continue
            t1, t2 = triangles[owners[0]], triangles[owners[1]]
            p = next(x for x in t1 if x not in (u, v))
            q = next(x for x in t2 if x not in (u, v))
            if min(p, q) >= min(u, v):
                continue
            if abs(_incircle(points[u], points[v], points[p], points[q])) > tol:
                continue
            triangles[owners[0]] = [p, q, u]
            triangles[owners[1]] = [p, q, v]
            flipped = True
            break
        if not flipped:
            return triangles
    return triangles


def triangulate(reference: Shape) -> Triangulation:
    """Delaunay triangulation of the reference landmarks.

    Co-circular ties are resolved toward the diagonal containing the lowest
    landmark index, triangles are counter-clockwise with their smallest index
    first, and the list is sorted.
    """
    points = reference.points
    if reference.n_points < 3:
        raise MeshError("triangulation needs at least 3 points")
    centred = points - points.mean(axis=0)
    spread = np.linalg.svd(centred, compute_uv=False)
    if spread[1] <= 1e-12 * max(spread[0], 1.0):
        raise MeshError("all reference points are collinear")

    try:
        tess = Delaunay(points)
    except QhullError as error:
        raise MeshError(f"Delaunay triangulation failed: {error}") from error

    triangles = _flip_cocircular([list(map(int, t)) for t in tess.simplices], points)
    ordered = sorted(_canonical_triangle(t, points) for t in triangles)
    tri = Triangulation(np.array(ordered))
    tri.check(reference)
    return tri


@dataclass(frozen=True, eq=False)
class TextureVector:
    """Intensities sampled at the reference mask positions."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.shape[0] != self.mask.shape[0]:
            raise MeshError(f"texture has {values.shape[0]} values for a {self.mask.shape[0]} pixel mask")
        object.__setattr__(self, "values", values)


def barycentric(vertices: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of (x, y) positions in the triangle `vertices` (3, 2)."""
    a, b, c = vertices
    basis = np.column_stack([b - a, c - a])
    if abs(np.linalg.det(basis)) <= 1e-12:
        raise MeshError("degenerate triangle")
    uv = np.linalg.solve(basis, (positions - a).T).T
    return np.column_stack([1.0 - uv[:, 0] - uv[:, 1], uv[:, 0], uv[:, 1]])


def bilinear_sample(data: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Bilinear sample of a 2-D array at (x, y) positions, clamped to the edges."""
    height, width = data.shape
    x = np.clip(positions[:, 0], 0.0, width - 1)
    y = np.clip(positions[:, 1], 0.0, height - 1)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = x - x0
    fy = y - y0
    top = data[y0, x0] + fx * (data[y0, x1] - data[y0, x0])
    bottom = data[y1, x0] + fx * (data[y1, x1] - data[y1, x0])
    return top + fy * (bottom - top)


class PiecewiseAffineWarp:
    """Precomputed mask and barycentric tables of a (reference, triangulation) pair.

    The mask holds the integer pixel centres inside the reference mesh.
    Pixels on the outer boundary of the mesh are left out, pixels on shared
    edges belong to the lowest-numbered triangle.
    """

    def __init__(self, reference: Shape, triangulation: Triangulation) -> None:
        """Init PiecewiseAffineWarp.

        Parameters:
            :reference:Shape, mesh vertices in reference pixel coordinates;
            :triangulation:Triangulation, checked against the reference;
        """
        triangulation.check(reference)
        self.reference = reference
        self.triangulation = triangulation
        self.mask, self.tri_index, self.bary = self._build_tables()
        if self.mask.shape[0] == 0:
            raise MeshError("reference mesh covers no pixel centre")

    def _build_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        points = self.reference.points
        triangles = self.triangulation.triangles
        x0, y0, x1, y1 = self.reference.bounds()
        xs = np.arange(int(np.ceil(x0)), int(np.floor(x1)) + 1)
        ys = np.arange(int(np.ceil(y0)), int(np.floor(y1)) + 1)
        grid = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2).astype(np.float64)

        boundary = {edge for edge, owners in self.triangulation.edges().items() if len(owners) == 1}
        owner = np.full(grid.shape[0], -1, dtype=np.int64)
        bary = np.zeros((grid.shape[0], 3))
        for index, (i, j, k) in enumerate(triangles.tolist()):
            free = owner < 0
            if not np.any(free):
                break
            lam = barycentric(points[[i, j, k]], grid[free])
            inside = np.all(lam >= -EPS_BARY, axis=1)
            # a zero coordinate puts the pixel on the opposite edge
            for slot, (u, v) in enumerate(((j, k), (k, i), (i, j))):
                if (min(u, v), max(u, v)) in boundary:
                    inside &= lam[:, slot] > EPS_BARY
            rows = np.flatnonzero(free)[inside]
            owner[rows] = index
            bary[rows] = lam[inside]

        keep = owner >= 0
        return grid[keep].astype(np.int64), owner[keep], bary[keep]

    @property
    def n_pixels(self) -> int:
        return int(self.mask.shape[0])

    @property
    def frame_size(self) -> tuple[int, int]:
        """(height, width) of an array that holds every mask pixel."""
        return int(self.mask[:, 1].max()) + 1, int(self.mask[:, 0].max()) + 1

    def interpolate(self, values: np.ndarray) -> np.ndarray:
        """Per-vertex rows (n, d) interpolated at every mask pixel -> (m, d)."""
        corners = values[self.triangulation.triangles[self.tri_index]]
        return np.einsum("mk,mkd->md", self.bary, corners)

    def map_points(self, shape: Shape) -> np.ndarray:
        """Image positions the mask pixels map to under `shape`."""
        areas = self.triangulation.signed_areas(shape.points)
        if np.any(np.abs(areas) <= 1e-12):
            raise MeshError("degenerate triangle in target shape")
        positions = self.interpolate(shape.points)
        snapped = np.rint(positions)
        close = np.abs(positions - snapped) <= EPS_SNAP
        return np.where(close, snapped, positions)

    def sample(
        self,
        img: Union[Image, np.ndarray],
        shape: Shape,
        origin: tuple[int, int] = (0, 0),
    ) -> TextureVector:
        """Shape-normalised texture of `img` under `shape`.

        `img` may be a window array whose top-left pixel sits at `origin`
        (x, y) of the frame.
        """
        data = img.data if isinstance(img, Image) else np.asarray(img, dtype=np.float64)
        positions = self.map_points(shape) - np.asarray(origin, dtype=np.float64)
        return TextureVector(bilinear_sample(data, positions), self.mask)

    def to_image(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Paint mask values onto a 2-D reference frame."""
        out = np.full(self.frame_size, fill, dtype=np.float64)
        out[self.mask[:, 1], self.mask[:, 0]] = values
        return out

    def mask_image(self) -> np.ndarray:
        out = np.zeros(self.frame_size, dtype=bool)
        out[self.mask[:, 1], self.mask[:, 0]] = True
        return out


def warp_to_reference(
    img: Image,
    shape: Shape,
    reference: Shape,
    tri: Triangulation,
) -> TextureVector:
    """Sample `img` under `shape` at the pixel centres of the reference mesh."""
    if shape.n_points != reference.n_points:
        raise MeshError(f"shape has {shape.n_points} points, reference has {reference.n_points}")
    return PiecewiseAffineWarp(reference, tri).sample(img, shape)
