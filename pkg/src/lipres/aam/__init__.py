"""Active Appearance Models.

# Features
- Shape and appearance PCA with a retained-variance rule
- Project-out inverse compositional fitting with step backtracking
- Sub-model extraction (lips) from the same training frames
- Per-resolution appearance bases and feature extraction

"""

from .features import (
    appearance_basis,
    degraded_texture,
    features_for_resolutions,
    features_for_sequence,
    mouth_box,
)
from .fitting import AamFitter, FitResult, fit, track
from .model import (
    Aam,
    AppearanceModel,
    ShapeModel,
    build_aam,
    build_appearance_model,
    build_shape_model,
    extract_sub_model,
    pca,
    synthesize,
)

__all__ = (
    "Aam",
    "AamFitter",
    "AppearanceModel",
    "FitResult",
    "ShapeModel",
    "appearance_basis",
    "build_aam",
    "build_appearance_model",
    "build_shape_model",
    "degraded_texture",
    "extract_sub_model",
    "features_for_resolutions",
    "features_for_sequence",
    "fit",
    "mouth_box",
    "pca",
    "synthesize",
    "track",
)
