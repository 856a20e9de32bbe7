"""Experiment Harness.

# Features
- Seeded random cross-validation folds
- One or more talkers, each corpus generated on demand
- Models, tracking and features computed once per corpus
- Retraining per resolution, or training once at native resolution
- Identical feature streams share one training and decode
- Failed cells recorded with fold, resolution and stage, the sweep goes on
- Fold means with standard errors per talker, error types split at 4 px of lip height
  (pooled or from the two nearest resolutions)
- CSV, SVG and run metadata outputs, and the `lipres` command line

"""

from .config import DEFAULT_SWEEP_SUBSET, NETWORKS, TWO_TALKERS, ExperimentConfig, TalkerSpec, load_config
from .experiment import CellFailure, Experiment, SweepResult, SweepRow, UtteranceRow, load_talker, run_experiment
from .folds import FoldSpec, make_folds
from .output import RESULT_COLUMNS, emit_outputs, plot_summary, read_results_csv, write_results_csv
from .summary import BreakdownRow, SummaryRow, error_breakdown, summarize

__all__ = (
    "DEFAULT_SWEEP_SUBSET",
    "NETWORKS",
    "RESULT_COLUMNS",
    "TWO_TALKERS",
    "BreakdownRow",
    "CellFailure",
    "Experiment",
    "ExperimentConfig",
    "FoldSpec",
    "SummaryRow",
    "SweepResult",
    "SweepRow",
    "TalkerSpec",
    "UtteranceRow",
    "emit_outputs",
    "error_breakdown",
    "load_config",
    "load_talker",
    "make_folds",
    "plot_summary",
    "read_results_csv",
    "run_experiment",
    "summarize",
    "write_results_csv",
)
