"""Landmark Geometry.

# Features
- Immutable landmark shapes with the `pts` file codec
- Least-squares similarity transforms and generalised Procrustes alignment
- Deterministic Delaunay meshes and piecewise affine texture sampling

"""

from .mesh import (
    PiecewiseAffineWarp,
    TextureVector,
    Triangulation,
    barycentric,
    bilinear_sample,
    triangulate,
    warp_to_reference,
)
from .shape import Shape, SimilarityTransform, align_shape, procrustes_align, read_pts, write_pts

__all__ = (
    "PiecewiseAffineWarp",
    "Shape",
    "SimilarityTransform",
    "TextureVector",
    "Triangulation",
    "barycentric",
    "align_shape",
    "bilinear_sample",
    "procrustes_align",
    "read_pts",
    "triangulate",
    "warp_to_reference",
    "write_pts",
)
