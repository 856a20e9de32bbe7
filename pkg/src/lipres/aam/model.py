# -*- coding: utf-8 -*-

"""Shape and Appearance Models.

PCA with a retained-variance rule, the combined `Aam`, sub-model
extraction and model synthesis.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.ndimage import distance_transform_edt

from ..errors import MeshError, ModelError
from ..geometry.mesh import PiecewiseAffineWarp, Triangulation, barycentric, bilinear_sample, triangulate
from ..geometry.shape import Shape, SimilarityTransform, align_shape, procrustes_align
from ..imaging.image import Image, Resolution

__all__ = (
    "Aam",
    "AppearanceModel",
    "Pca",
    "ShapeModel",
    "build_aam",
    "build_appearance_model",
    "build_shape_model",
    "extract_sub_model",
    "fill_outside",
    "pca",
    "similarity_apply",
    "similarity_matrix",
    "similarity_params",
    "synthesize",
)

# relative eigenvalue cut below which a direction carries no variance
EPS_EIGEN = 1e-10
# absolute total variance treated as none at all
EPS_VARIANCE = 1e-18


@dataclass(frozen=True, eq=False)
class Pca:
    """Mean, orthonormal modes (columns) and descending eigenvalues."""

    mean: np.ndarray
    modes: np.ndarray
    eigenvalues: np.ndarray
    total_variance: float


def _orient(modes: np.ndarray) -> np.ndarray:
    """Largest-magnitude component of every mode positive."""
    if modes.shape[1] == 0:
        return modes
    rows = np.argmax(np.abs(modes), axis=0)
    signs = np.sign(modes[rows, np.arange(modes.shape[1])])
    signs[signs == 0] = 1.0
    return modes * signs


def pca(samples: np.ndarray, retain: float, n_modes: Optional[int] = None) -> Pca:
    """PCA of row samples.

    Keeps the smallest number of modes whose cumulative eigenvalue fraction
    reaches `retain`, or exactly `n_modes` (bounded by the available rank)
    when given. Uses the Gram matrix when there are fewer samples than
    dimensions.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ModelError("PCA needs at least 2 samples")
    if not 0.0 < retain <= 1.0:
        raise ModelError(f"retained fraction must be in (0, 1]: {retain}")

    n, dim = x.shape
    mean = x.mean(axis=0)
    centred = x - mean
    total = float(np.sum(centred**2)) / (n - 1)
    if total <= EPS_VARIANCE:
        raise ModelError("no variance in the training samples")

    if n <= dim:
        gram = centred @ centred.T / (n - 1)
        values, vectors = np.linalg.eigh(gram)
        order = np.argsort(values)[::-1]
        values, vectors = values[order], vectors[:, order]
        keep = values > EPS_EIGEN * values[0]
        values, vectors = values[keep], vectors[:, keep]
        modes = centred.T @ vectors / np.sqrt(values * (n - 1))
        # re-orthonormalise, keeping column directions
        q, r = np.linalg.qr(modes)
        modes = q * np.sign(np.diag(r))
    else:
        cov = centred.T @ centred / (n - 1)
        values, vectors = np.linalg.eigh(cov)
        order = np.argsort(values)[::-1]
        values, modes = values[order], vectors[:, order]
        keep = values > EPS_EIGEN * values[0]
        values, modes = values[keep], modes[:, keep]

    if n_modes is not None:
        count = max(1, min(int(n_modes), values.shape[0]))
    else:
        fractions = np.cumsum(values) / np.sum(values)
        count = int(np.searchsorted(fractions, retain - 1e-12)) + 1
        count = min(count, values.shape[0])

    return Pca(
        mean=mean,
        modes=_orient(modes[:, :count]),
        eigenvalues=values[:count].copy(),
        total_variance=total,
    )


@dataclass(frozen=True, eq=False)
class ShapeModel:
    """Mean shape in the normalised frame with interleaved-coordinate modes."""

    mean: Shape
    modes: np.ndarray
    eigenvalues: np.ndarray
    retained_fraction: float
    total_variance: float

    @property
    def n_modes(self) -> int:
        return int(self.modes.shape[1])

    def project(self, shape: Shape) -> np.ndarray:
        """Shape parameters of the Procrustes-normalised `shape`."""
        aligned = align_shape(shape, self.mean).as_vector()
        return self.modes.T @ (aligned - self.mean.as_vector())

    def instance(self, params: np.ndarray) -> Shape:
        return Shape.from_vector(self.mean.as_vector() + self.modes @ np.asarray(params, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class AppearanceModel:
    """Mean texture and modes over the reference mask."""

    mean: np.ndarray
    modes: np.ndarray
    eigenvalues: np.ndarray
    mask: np.ndarray
    retained_fraction: float
    total_variance: float

    @property
    def n_modes(self) -> int:
        return int(self.modes.shape[1])

    def project(self, values: np.ndarray) -> np.ndarray:
        return self.modes.T @ (np.asarray(values, dtype=np.float64) - self.mean)

    def instance(self, params: np.ndarray) -> np.ndarray:
        return self.mean + self.modes @ np.asarray(params, dtype=np.float64)

    def project_out(self, vectors: np.ndarray) -> np.ndarray:
        """Remove the span of the modes from column vectors."""
        return vectors - self.modes @ (self.modes.T @ vectors)


def build_shape_model(
    shapes: Sequence[Shape],
    retain: float = 0.95,
    n_modes: Optional[int] = None,
) -> ShapeModel:
    """Procrustes-align `shapes` and keep the modes covering `retain` of the variance."""
    if len(shapes) < 2:
        raise ModelError("shape model needs at least 2 shapes")
    aligned, _ = procrustes_align(shapes)
    result = pca(np.stack([s.as_vector() for s in aligned]), retain, n_modes)
    return ShapeModel(
        mean=Shape.from_vector(result.mean),
        modes=result.modes,
        eigenvalues=result.eigenvalues,
        retained_fraction=retain,
        total_variance=result.total_variance,
    )


def build_appearance_model(
    frames: Sequence[tuple[Image, Shape]],
    reference: Shape,
    tri: Triangulation,
    retain: float = 0.95,
    n_modes: Optional[int] = None,
) -> AppearanceModel:
    """Warp every frame onto `reference` and run PCA on the textures."""
    if len(frames) < 2:
        raise ModelError("appearance model needs at least 2 frames")
    warp = PiecewiseAffineWarp(reference, tri)
    textures = np.stack([warp.sample(img, shape).values for img, shape in frames])
    result = pca(textures, retain, n_modes)
    return AppearanceModel(
        mean=result.mean,
        modes=result.modes,
        eigenvalues=result.eigenvalues,
        mask=warp.mask,
        retained_fraction=retain,
        total_variance=result.total_variance,
    )


@dataclass(frozen=True, eq=False)
class Aam:
    """Combined shape and appearance model.

    `reference_shape` is the mean shape in reference pixel coordinates,
    `reference_scale` the factor from normalised to reference pixels.
    `landmark_indices` selects this model's landmarks from the full set.
    """

    shape_model: ShapeModel
    appearance_model: AppearanceModel
    triangulation: Triangulation
    reference_shape: Shape
    reference_scale: float
    native_resolution: Resolution
    landmark_indices: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        n = self.reference_shape.n_points
        if self.shape_model.mean.n_points != n:
            raise ModelError("shape model and reference shape disagree on landmark count")
        if not self.landmark_indices:
            object.__setattr__(self, "landmark_indices", tuple(range(n)))
        if len(self.landmark_indices) != n:
            raise ModelError("landmark indices disagree with the reference shape")

    @cached_property
    def warp(self) -> PiecewiseAffineWarp:
        warp = PiecewiseAffineWarp(self.reference_shape, self.triangulation)
        if not np.array_equal(warp.mask, self.appearance_model.mask):
            raise ModelError("appearance mask does not match the triangulation")
        return warp

    @property
    def shape_basis(self) -> np.ndarray:
        """Shape modes in reference pixels, (n, 2, s)."""
        s = self.shape_model.n_modes
        return (self.shape_model.modes * self.reference_scale).reshape(-1, 2, s)

    def select(self, shape: Shape) -> Shape:
        """This model's landmarks out of a shape with the full landmark set."""
        if shape.n_points == self.reference_shape.n_points:
            return shape
        if shape.n_points <= max(self.landmark_indices):
            raise ModelError(f"shape with {shape.n_points} points lacks model landmarks")
        return shape.subset(self.landmark_indices)

    def reference_instance(self, params: np.ndarray) -> Shape:
        """Shape instance in reference pixel coordinates."""
        offset = np.tensordot(self.shape_basis, np.asarray(params, dtype=np.float64), axes=([2], [0]))
        return Shape(self.reference_shape.points + offset)


def _reference_frame(mean: Shape, scale: float, margin: float) -> Shape:
    points = mean.points * scale
    return Shape(points - points.min(axis=0) + margin)


def build_aam(
    frames: Sequence[tuple[Image, Shape]],
    retain_shape: float = 0.95,
    retain_appearance: float = 0.95,
    landmark_indices: Optional[Sequence[int]] = None,
    margin: float = 2.0,
    n_shape_modes: Optional[int] = None,
    n_appearance_modes: Optional[int] = None,
) -> Aam:
    """Procrustes, shape PCA, reference frame, mesh and appearance PCA in one go.

    Parameters:
        :frames:list of (Image, Shape), landmarked training frames;
        :retain_shape:float, shape variance fraction to keep;
        :retain_appearance:float, appearance variance fraction to keep;
        :landmark_indices:optional subset of the landmarks to model;
        :margin:float, pixels between the reference mesh and the frame edge;
    """
    if len(frames) < 2:
        raise ModelError("AAM needs at least 2 training frames")
    indices = tuple(range(frames[0][1].n_points)) if landmark_indices is None else tuple(landmark_indices)
    if len(indices) < 3:
        raise ModelError(f"a model needs at least 3 landmarks, got {len(indices)}")
    pairs = [(img, shape.subset(indices)) for img, shape in frames]

    shape_model = build_shape_model([s for _, s in pairs], retain_shape, n_shape_modes)
    scale = float(np.mean([s.rms_radius() for _, s in pairs]))
    reference = _reference_frame(shape_model.mean, scale, margin)
    try:
        tri = triangulate(reference)
    except MeshError as error:
        raise ModelError(f"cannot mesh the mean shape: {error}") from error
    appearance_model = build_appearance_model(pairs, reference, tri, retain_appearance, n_appearance_modes)
    return Aam(
        shape_model=shape_model,
        appearance_model=appearance_model,
        triangulation=tri,
        reference_shape=reference,
        reference_scale=scale,
        native_resolution=frames[0][0].resolution,
        landmark_indices=indices,
    )


def extract_sub_model(
    aam: Aam,
    landmark_indices: Sequence[int],
    training_frames: Sequence[tuple[Image, Shape]],
) -> Aam:
    """Rebuild the model on a landmark subset with the same retention rule."""
    indices = list(landmark_indices)
    if len(indices) < 3:
        raise ModelError(f"sub-model needs at least 3 landmarks, got {len(indices)}")
    if len(set(indices)) != len(indices):
        raise ModelError("sub-model landmark indices repeat")
    # indices are relative to the parent model's landmark list
    absolute = [aam.landmark_indices[i] for i in indices]
    return build_aam(
        training_frames,
        retain_shape=aam.shape_model.retained_fraction,
        retain_appearance=aam.appearance_model.retained_fraction,
        landmark_indices=absolute,
    )


def similarity_matrix(q: np.ndarray) -> np.ndarray:
    a, b = q[0], q[1]
    return np.array([[1.0 + a, -b], [b, 1.0 + a]])


def similarity_apply(q: np.ndarray, points: np.ndarray, centre: np.ndarray) -> np.ndarray:
    """N(x; q) = A(q) (x - c) + c + t with q = (a, b, tx, ty)."""
    return (points - centre) @ similarity_matrix(q).T + centre + q[2:4]


def similarity_params(transform: SimilarityTransform, centre: np.ndarray) -> np.ndarray:
    """(a, b, tx, ty) about `centre` of a similarity transform."""
    m = transform.matrix()
    shift = m[:, 2] - centre + m[:, :2] @ centre
    return np.array([m[0, 0] - 1.0, m[1, 0], shift[0], shift[1]])


def synthesize(
    aam: Aam,
    similarity: np.ndarray,
    shape_params: np.ndarray,
    appearance_params: np.ndarray,
    size: Resolution,
    background: float = 0.0,
    ring: int = 3,
) -> tuple[Image, Shape]:
    """Render a model instance into a `size` frame.

    `similarity` is (a, b, tx, ty) about the reference centroid, the same
    parameterisation the fitter uses. Pixels up to `ring` outside the mesh
    continue the texture through the nearest triangle's affine map, the rest
    of the frame is `background`. Returns the frame and its shape.
    """
    local = aam.reference_instance(shape_params)
    centre = aam.reference_shape.centroid()
    shape = Shape(similarity_apply(np.asarray(similarity, dtype=np.float64), local.points, centre))
    if not shape.within(size.width, size.height):
        raise ModelError("synthesised shape falls outside the frame")

    warp = aam.warp
    texture = np.clip(aam.appearance_model.instance(appearance_params), 0.0, 1.0)
    reference_image = fill_outside(warp.to_image(texture), warp.mask_image())

    x0, y0, x1, y1 = shape.bounds()
    xs = np.arange(max(int(np.floor(x0)) - ring, 0), min(int(np.ceil(x1)) + ring, size.width - 1) + 1)
    ys = np.arange(max(int(np.floor(y0)) - ring, 0), min(int(np.ceil(y1)) + ring, size.height - 1) + 1)
    grid = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    positions = grid.astype(np.float64)

    # the triangle each pixel lies deepest inside (or least outside of)
    triangles = aam.triangulation.triangles
    best = np.full(grid.shape[0], -np.inf)
    weights = np.zeros((grid.shape[0], 3))
    chosen = np.zeros(grid.shape[0], dtype=np.int64)
    for index, corners in enumerate(triangles):
        lam = barycentric(shape.points[corners], positions)
        score = lam.min(axis=1)
        better = score > best
        best[better] = score[better]
        weights[better] = lam[better]
        chosen[better] = index
    sources = np.einsum("mk,mkd->md", weights, aam.reference_shape.points[triangles[chosen]])
    snapped = np.rint(sources)
    sources = np.where(np.abs(sources - snapped) <= 1e-9, snapped, sources)

    out = np.full((size.height, size.width), float(background))
    out[grid[:, 1], grid[:, 0]] = bilinear_sample(reference_image, sources)
    return Image(np.clip(out, 0.0, 1.0)), shape


def fill_outside(image: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Copy every outside pixel from its nearest inside pixel."""
    _, (rows, cols) = distance_transform_edt(~inside, return_indices=True)
    return image[rows, cols]
