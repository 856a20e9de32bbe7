# -*- coding: utf-8 -*-

"""Per-resolution Feature Extraction.

Shape parameters come from the fitted shapes and never depend on the
target resolution. Appearance parameters come from the degraded frame,
sampled at the native fitted shape and projected onto an appearance basis
for that resolution.
"""

from typing import Iterable, Literal, Sequence

import numpy as np

from ..errors import ModelError, ShapeError
from ..geometry.shape import Shape, SimilarityTransform
from ..hmm.observation import FeatureVector, ObservationSequence
from ..imaging.image import Image, Resolution
from ..imaging.resample import Box, degrade_window
from .model import Aam, AppearanceModel, pca

__all__ = (
    "appearance_basis",
    "degraded_texture",
    "features_for_resolutions",
    "features_for_sequence",
    "mouth_box",
)

BasisMode = Literal["per_resolution", "native"]


def mouth_box(shape: Shape, image: Image, margin: int = 2) -> Box:
    """Integer window around `shape`, clipped to the frame."""
    x0, y0, x1, y1 = shape.bounds()
    return (
        max(int(np.floor(x0)) - margin, 0),
        max(int(np.floor(y0)) - margin, 0),
        min(int(np.ceil(x1)) + margin + 1, image.width),
        min(int(np.ceil(y1)) + margin + 1, image.height),
    )


def degraded_texture(aam: Aam, image: Image, shape: Shape, target: Resolution) -> np.ndarray:
    """Texture of `degrade(image, target)` under the native `shape`."""
    local = aam.select(shape)
    box = mouth_box(local, image)
    window = degrade_window(image, target, box)
    return aam.warp.sample(window, local, origin=(box[0], box[1])).values


def _complete(modes: np.ndarray, fallback: np.ndarray, count: int) -> np.ndarray:
    """Extend orthonormal `modes` to `count` columns from `fallback`, then unit vectors."""
    columns = [modes[:, i] for i in range(modes.shape[1])]
    dim = fallback.shape[0]
    candidates = [fallback[:, i] for i in range(fallback.shape[1])]
    candidates.extend(np.eye(dim)[i] for i in range(dim))
    for vector in candidates:
        if len(columns) >= count:
            break
        v = vector.copy()
        for c in columns:
            v -= (c @ v) * c
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            columns.append(v / norm)
    return np.column_stack(columns)


def appearance_basis(
    aam: Aam,
    key_frames: Sequence[tuple[Image, Shape]],
    target: Resolution,
    mode: BasisMode = "per_resolution",
) -> AppearanceModel:
    """Appearance basis for `target` with the native mode count.

    `native` returns the model's own basis. `per_resolution` rebuilds it from
    the degraded key frames; a rebuild with too little variance is completed
    with native modes made orthogonal to it, at eigenvalue 0.
    """
    native = aam.appearance_model
    if mode == "native":
        return native
    if mode != "per_resolution":
        raise ModelError(f"unknown appearance basis mode `{mode}`")
    if len(key_frames) < 2:
        raise ModelError("per-resolution appearance basis needs at least 2 key frames")

    count = native.n_modes
    textures = np.stack([degraded_texture(aam, img, shape, target) for img, shape in key_frames])
    try:
        result = pca(textures, native.retained_fraction, n_modes=count)
        mean, modes, values, total = result.mean, result.modes, result.eigenvalues, result.total_variance
    except ModelError:
        mean = textures.mean(axis=0)
        modes = np.zeros((textures.shape[1], 0))
        values = np.zeros(0)
        total = 0.0

    if modes.shape[1] < count:
        modes = _complete(modes, native.modes, count)
        values = np.concatenate([values, np.zeros(count - values.shape[0])])

    return AppearanceModel(
        mean=mean,
        modes=modes,
        eigenvalues=values,
        mask=native.mask,
        retained_fraction=native.retained_fraction,
        total_variance=total,
    )


def _shape_features(aam: Aam, shape: Shape, include_similarity: bool) -> np.ndarray:
    local = aam.select(shape)
    params = aam.shape_model.project(local)
    if not include_similarity:
        return params
    transform = SimilarityTransform.estimate(aam.reference_shape, local)
    pose = np.array([transform.scale, transform.rotation, transform.tx, transform.ty])
    return np.concatenate([params, pose])


def features_for_resolutions(
    aam: Aam,
    frames: Iterable[Image],
    fitted_shapes: Sequence[Shape],
    bases: dict[Resolution, AppearanceModel],
    frame_rate: float = 60.0,
    include_similarity: bool = False,
) -> dict[Resolution, ObservationSequence]:
    """Features of one sequence at several resolutions, rendering each frame once."""
    images = list(frames)
    if len(images) != len(fitted_shapes):
        raise ShapeError(f"{len(fitted_shapes)} fitted shapes for {len(images)} frames")
    shape_rows = [_shape_features(aam, shape, include_similarity) for shape in fitted_shapes]
    rows: dict[Resolution, list[FeatureVector]] = {target: [] for target in bases}
    for image, shape, shape_row in zip(images, fitted_shapes, shape_rows):
        for target, basis in bases.items():
            texture = degraded_texture(aam, image, shape, target)
            rows[target].append(FeatureVector(shape_row, basis.project(texture)))
    return {target: ObservationSequence.from_features(items, frame_rate) for target, items in rows.items()}


def features_for_sequence(
    aam: Aam,
    frames: Sequence[Image],
    fitted_shapes: Sequence[Shape],
    target: Resolution,
    basis: AppearanceModel,
    frame_rate: float = 60.0,
    include_similarity: bool = False,
) -> ObservationSequence:
    """Shape plus degraded-appearance features of every frame at `target`."""
    result = features_for_resolutions(
        aam, frames, fitted_shapes, {target: basis}, frame_rate, include_similarity
    )
    return result[target]
