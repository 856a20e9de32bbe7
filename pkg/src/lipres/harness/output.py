# -*- coding: utf-8 -*-

"""Result Files.

    results.csv                   one row per (talker, fold, resolution, network, feature)
    utterances.csv                one row per decoded test line of every cell
    summary.csv                   fold means and standard errors
    error_breakdown.csv           I/D/S rates split at 4 px of lip height, per talker
    error_breakdown_adjacent.csv  the same from the two resolutions nearest to 4 px
    accuracy_vs_lipheight.svg     accuracy against resting lip height, log x axis, a panel per talker
    run.json                      config, timestamps, elapsed seconds, failed cells, stage durations

Floats are written with `repr`, so `read_results_csv` gives back equal rows
and two identical sweeps give byte-identical files.
"""

import csv
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from loguru import logger  # noqa: E402

from ..errors import SummaryError  # noqa: E402
from ..imaging.image import Resolution  # noqa: E402
from ..storage.io import IO  # noqa: E402
from .config import ExperimentConfig  # noqa: E402
from .experiment import SweepResult, SweepRow  # noqa: E402
from .summary import BreakdownRow, SummaryRow, error_breakdown, summarize  # noqa: E402

__all__ = (
    "RESULT_COLUMNS",
    "emit_outputs",
    "plot_summary",
    "read_results_csv",
    "write_results_csv",
)

RESULT_COLUMNS = (
    "talker", "fold", "resolution_w", "resolution_h", "lip_height_px", "network", "feature",
    "N", "H", "S", "D", "I", "C", "A",
)  # fmt: skip

PLOT_FILE = "accuracy_vs_lipheight.svg"


def _write(file: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    with open(file, "w", newline="", encoding="utf8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([repr(v) if isinstance(v, float) else v for v in row] for row in rows)
    return file


def write_results_csv(file: Union[str, Path], rows: Sequence[SweepRow]) -> Path:
    return _write(
        Path(file),
        RESULT_COLUMNS,
        (
            (r.talker, r.fold, r.resolution.width, r.resolution.height, r.lip_height_px, r.network, r.feature,
             r.n, r.hits, r.subs, r.dels, r.ins, r.correctness, r.accuracy)  # fmt: skip
            for r in rows
        ),
    )


def read_results_csv(file: Union[str, Path]) -> list[SweepRow]:
    """Rows of a results.csv, as written by `write_results_csv`."""
    with open(file, "r", newline="", encoding="utf8") as fp:
        reader = csv.DictReader(fp)
        if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
            raise SummaryError(f"{file}: unexpected columns {reader.fieldnames}")
        try:
            return [
                SweepRow(
                    d["talker"],
                    int(d["fold"]),
                    Resolution(int(d["resolution_w"]), int(d["resolution_h"])),
                    float(d["lip_height_px"]),
                    d["network"],
                    d["feature"],
                    int(d["N"]),
                    int(d["H"]),
                    int(d["S"]),
                    int(d["D"]),
                    int(d["I"]),
                    float(d["C"]),
                    float(d["A"]),
                )
                for d in reader
            ]
        except (TypeError, ValueError) as error:
            raise SummaryError(f"{file}: malformed row: {error}") from error


def _write_summary(file: Path, summary: Sequence[SummaryRow]) -> Path:
    header = ("talker", "resolution_w", "resolution_h", "lip_height_px", "network", "feature",
              "folds", "C_mean", "C_stderr", "A_mean", "A_stderr")  # fmt: skip
    return _write(
        file,
        header,
        (
            (s.talker, s.resolution.width, s.resolution.height, s.lip_height_px, s.network, s.feature,
             s.n_folds, s.mean_correctness, s.stderr_correctness, s.mean_accuracy, s.stderr_accuracy)  # fmt: skip
            for s in summary
        ),
    )


def _write_breakdown(file: Path, rows: Sequence[BreakdownRow]) -> Path:
    header = ("talker", "lip_height", "network", "feature", "rows", "I_per_N", "D_per_N", "S_per_N")
    return _write(
        file,
        header,
        ((b.talker, b.band, b.network, b.feature, b.n_rows, b.insertions, b.deletions, b.substitutions) for b in rows),
    )


def plot_summary(summary: Sequence[SummaryRow], file: Union[str, Path]) -> Path:
    """Mean accuracy against resting lip height, one errorbar series per feature and network.

    Each talker gets its own panel; the panels share the accuracy axis.
    """
    if not summary:
        raise SummaryError("nothing to plot")
    panels: dict[str, dict[tuple[str, str], list[SummaryRow]]] = {}
    for row in summary:
        panels.setdefault(row.talker, {}).setdefault((row.feature, row.network), []).append(row)

    plt.rcParams["svg.hashsalt"] = "lipres"
    fig, axes = plt.subplots(1, len(panels), figsize=(8 * len(panels), 5), sharey=True, squeeze=False)
    try:
        for ax, (talker, series) in zip(axes[0], panels.items()):
            for (feature, network), rows in series.items():
                rows = sorted(rows, key=lambda r: r.lip_height_px)
                ax.errorbar(
                    [r.lip_height_px for r in rows],
                    [100.0 * r.mean_accuracy for r in rows],
                    yerr=[100.0 * r.stderr_accuracy for r in rows],
                    fmt="-o" if network == "bwn" else "--s",
                    markersize=3,
                    capsize=2,
                    label=f"{feature} / {network.upper()}",
                )
            ax.set_xscale("log")
            ax.set_xlabel("resting lip height (pixels)")
            ax.grid(True, which="both", alpha=0.3)
            ax.legend(fontsize="small")
            if len(panels) > 1:
                ax.set_title(f"talker {talker}")
        axes[0][0].set_ylabel("viseme accuracy (%)")
        fig.tight_layout()
        path = Path(file)
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path


def emit_outputs(
    result: SweepResult,
    out_dir: Union[str, Path],
    config: Optional[ExperimentConfig] = None,
) -> list[Path]:
    """Write every result file of one sweep into `out_dir`."""
    if not result.rows:
        raise SummaryError("empty sweep: no rows to write")
    folder = Path(out_dir)
    try:
        IO.dir_create(folder)
    except OSError as error:
        raise SummaryError(f"output directory {folder} not writable: {error}") from error

    written = [write_results_csv(folder / "results.csv", result.rows)]
    written.append(
        _write(
            folder / "utterances.csv",
            ("talker", "fold", "resolution_w", "resolution_h", "network", "feature", "line_id",
             "N", "H", "S", "D", "I", "hypothesis"),  # fmt: skip
            (
                (u.talker, u.fold, u.resolution.width, u.resolution.height, u.network, u.feature, u.line_id,
                 u.n, u.hits, u.subs, u.dels, u.ins, u.hypothesis)  # fmt: skip
                for u in result.utterances
            ),
        )
    )

    run = {
        "config": config.to_dict() if config else None,
        "started": result.started,
        "finished": result.finished,
        "elapsed": result.elapsed,
        "rows": len(result.rows),
        "failures": [asdict(f) for f in result.failures],
        "stages": result.stages,
    }
    IO.save_dict(folder / "run.json", run)
    written.append(folder / "run.json")

    try:
        summary = summarize(result.rows)
    except SummaryError as error:
        if not result.failures:
            raise
        logger.warning("no summary after failed cells: {}", error)
        return written
    written.append(_write_summary(folder / "summary.csv", summary))
    written.append(_write_breakdown(folder / "error_breakdown.csv", error_breakdown(result.rows)))
    written.append(
        _write_breakdown(folder / "error_breakdown_adjacent.csv", error_breakdown(result.rows, adjacent=True))
    )
    written.append(plot_summary(summary, folder / PLOT_FILE))
    return written
