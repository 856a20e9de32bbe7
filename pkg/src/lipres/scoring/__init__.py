"""Scoring.

# Features
- Minimum edit distance alignment with a deterministic tie-break
- Unit, HTK-style and insertion/deletion cost schemes
- Correctness and accuracy over pooled counts

"""

from .alignment import COSTS, AlignmentResult, align_sequences, edit_cost
from .metrics import accuracy, correctness, score_pairs

__all__ = (
    "COSTS",
    "AlignmentResult",
    "accuracy",
    "align_sequences",
    "correctness",
    "edit_cost",
    "score_pairs",
)
