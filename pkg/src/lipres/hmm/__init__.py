"""Viseme HMMs.

# Features
- Left-to-right diagonal GMM-HMMs with flat-start initialisation
- Embedded Baum-Welch re-estimation without pruning
- Short-pause tee model tied to the centre state of silence
- Forced alignment against word transcripts with pronunciation alternatives
- Unigram and back-off bigram word networks
- Network-constrained Viterbi decoding
- The fixed training schedule

"""

from .align import alignment_graph, expand_words, force_align
from .decode import Decoder, decode
from .graph import GraphBuilder, Path, Segment, StateGraph
from .model import Gmm, Hmm, HmmSet, flat_start, left_to_right, mixture_offsets, tee_transitions
from .network import BOUNDARY, WordNetwork, build_network, dump_network
from .observation import FEATURE_SETS, FeatureVector, ObservationSequence
from .recipe import RecipeConfig, train_recipe
from .train import baum_welch, label_graph, tie_silence

__all__ = (
    "BOUNDARY",
    "Decoder",
    "FEATURE_SETS",
    "FeatureVector",
    "Gmm",
    "GraphBuilder",
    "Hmm",
    "HmmSet",
    "ObservationSequence",
    "Path",
    "RecipeConfig",
    "Segment",
    "StateGraph",
    "WordNetwork",
    "alignment_graph",
    "baum_welch",
    "build_network",
    "decode",
    "dump_network",
    "expand_words",
    "flat_start",
    "force_align",
    "label_graph",
    "left_to_right",
    "mixture_offsets",
    "tee_transitions",
    "tie_silence",
    "train_recipe",
)
