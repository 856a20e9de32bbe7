"""Synthetic Corpus.

# Features
- Invented vocabulary covering every viseme, lines walked along a word chain
- Per-viseme prototype mouths blended linearly between neighbours
- Frames re-rendered on demand from (seed, frame index)
- Corpus directories with a checksummed manifest, synthetic or real

"""

from .config import CorpusConfig
from .corpus import Corpus
from .generator import CorpusGenerator, CorpusManifest, FrameTruth, GroundTruth, generate_corpus
from .render import LIP_INDICES, PROTOTYPES, Blend, frame_shape, prototype_separation, prototype_shape, render_frame

__all__ = (
    "LIP_INDICES",
    "PROTOTYPES",
    "Blend",
    "Corpus",
    "CorpusConfig",
    "CorpusGenerator",
    "CorpusManifest",
    "FrameTruth",
    "GroundTruth",
    "frame_shape",
    "generate_corpus",
    "prototype_separation",
    "prototype_shape",
    "render_frame",
)
