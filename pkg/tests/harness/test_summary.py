# -*- coding: utf-8 -*-

from pathlib import Path

import pytest

from lipres.errors import SummaryError
from lipres.harness.experiment import CellFailure, SweepResult, SweepRow
from lipres.harness.output import PLOT_FILE, emit_outputs, plot_summary, read_results_csv, write_results_csv
from lipres.harness.summary import error_breakdown, summarize
from lipres.imaging.image import Resolution
from lipres.imaging.resample import resolution_ladder


def row(
    fold: int, resolution: Resolution, height: float, network: str, feature: str, a: float, talker: str = "t1"
) -> SweepRow:
    n = 40
    hits = 30 + fold
    ins = hits - round(a * n)
    return SweepRow(talker, fold, resolution, height, network, feature, n, hits, 6, 4 - fold, ins, hits / n, a)


def sweep(resolutions: list[Resolution], folds: int = 2, talker: str = "t1", rest: float = 26.0) -> list[SweepRow]:
    rows = []
    for fold in range(folds):
        for k, resolution in enumerate(resolutions):
            height = rest * resolution.height / 1080
            for network in ("uwn", "bwn"):
                for feature in ("shape", "appearance"):
                    rows.append(row(fold, resolution, height, network, feature, 0.2 + 0.2 * fold + 0.01 * k, talker))
    return rows


class Tester:
    """Test Summaries and Result Files."""

    def test_standard_error(self) -> None:
        """A of 0.2 and 0.4 over two folds: mean 0.3, standard error 0.1"""
        native = Resolution(1440, 1080)
        rows = [row(0, native, 26.0, "uwn", "shape", 0.2), row(1, native, 26.0, "uwn", "shape", 0.4)]
        (summary,) = summarize(rows)
        assert summary.n_folds == 2
        assert summary.mean_accuracy == pytest.approx(0.3)
        assert summary.stderr_accuracy == pytest.approx(0.1)
        assert summary.mean_correctness == pytest.approx((30 / 40 + 31 / 40) / 2)

    def test_summary_errors(self) -> None:
        """no rows or a single fold cannot be summarised"""
        with pytest.raises(SummaryError):
            summarize([])
        with pytest.raises(SummaryError, match="two"):
            summarize([row(0, Resolution(80, 60), 1.4, "bwn", "combined", 0.3)])

    def test_breakdown(self) -> None:
        """error rates split at 4 pixels of lip height"""
        rows = sweep([Resolution(1440, 1080), Resolution(120, 90)])
        table = error_breakdown(rows)
        assert [b.band for b in table] == [">=4px"] * 4 + ["<4px"] * 4
        first = table[0]
        assert (first.network, first.feature, first.n_rows) == ("uwn", "shape", 2)
        assert first.substitutions == pytest.approx(6 / 40)
        assert first.deletions == pytest.approx((4 / 40 + 3 / 40) / 2)
        with pytest.raises(SummaryError):
            error_breakdown([])

    def test_results_csv(self, tmp_path: Path) -> None:
        """results.csv reads back to the rows it was written from"""
        rows = sweep(resolution_ladder()[:3])
        file = write_results_csv(tmp_path / "results.csv", rows)
        assert read_results_csv(file) == rows
        header = file.read_text(encoding="utf8").splitlines()[0]
        assert header == "talker,fold,resolution_w,resolution_h,lip_height_px,network,feature,N,H,S,D,I,C,A"
        (tmp_path / "bad.csv").write_text("fold,N\n0,1\n", encoding="utf8")
        with pytest.raises(SummaryError, match="columns"):
            read_results_csv(tmp_path / "bad.csv")

    def test_plot(self, tmp_path: Path) -> None:
        """18 lip heights per series, the same bytes on every write"""
        summary = summarize(sweep(resolution_ladder()))
        series = {(s.feature, s.network) for s in summary}
        assert len(series) == 4
        for feature, network in series:
            assert len({s.lip_height_px for s in summary if (s.feature, s.network) == (feature, network)}) == 18
        first = plot_summary(summary, tmp_path / "a.svg").read_bytes()
        second = plot_summary(summary, tmp_path / "b.svg").read_bytes()
        assert first.startswith(b"<?xml")
        assert first == second
        with pytest.raises(SummaryError):
            plot_summary([], tmp_path / "c.svg")

    def test_emit_outputs(self, tmp_path: Path) -> None:
        """every file of a sweep, and no files for an empty one"""
        result = SweepResult(rows=sweep(resolution_ladder()[:2]), started="a", finished="b")
        written = emit_outputs(result, tmp_path / "out")
        names = {p.name for p in written}
        assert names == {
            "results.csv",
            "utterances.csv",
            "run.json",
            "summary.csv",
            "error_breakdown.csv",
            "error_breakdown_adjacent.csv",
            PLOT_FILE,
        }
        assert len((tmp_path / "out" / "summary.csv").read_text(encoding="utf8").splitlines()) == 1 + 2 * 2 * 2

        with pytest.raises(SummaryError, match="empty"):
            emit_outputs(SweepResult(), tmp_path / "empty")

        partial = SweepResult(
            rows=[row(0, Resolution(80, 60), 1.4, "bwn", "shape", 0.3)],
            failures=[CellFailure("t1", 1, "80x60", "shape", "train", "no utterance could be aligned")],
        )
        written = emit_outputs(partial, tmp_path / "partial")
        assert {p.name for p in written} == {"results.csv", "utterances.csv", "run.json"}

    def test_breakdown_per_talker(self) -> None:
        """two bands for each talker, network and feature"""
        ladder = [Resolution(1440, 1080), Resolution(360, 270), Resolution(240, 180), Resolution(120, 90)]
        rows = sweep(ladder, talker="t1") + sweep(ladder, talker="t2", rest=17.0)
        table = error_breakdown(rows)
        assert len(table) == 2 * 2 * 2 * 2
        mine = [b for b in table if (b.network, b.feature) == ("bwn", "appearance")]
        assert [(b.talker, b.band) for b in mine] == [("t1", ">=4px"), ("t1", "<4px"), ("t2", ">=4px"), ("t2", "<4px")]
        assert [b.n_rows for b in mine] == [6, 2, 4, 4]

        summary = summarize(rows)
        assert len(summary) == 2 * len(ladder) * 2 * 2
        assert {s.talker for s in summary} == {"t1", "t2"}

    def test_breakdown_adjacent(self) -> None:
        """only the resolutions nearest to the split on each side, per talker"""
        ladder = [Resolution(1440, 1080), Resolution(360, 270), Resolution(240, 180), Resolution(120, 90)]
        rows = sweep(ladder, talker="t1") + sweep(ladder, talker="t2", rest=17.0)
        table = error_breakdown(rows, adjacent=True)
        assert all(b.n_rows == 2 for b in table)
        assert len(table) == 2 * 2 * 2 * 2
        first = table[0]
        assert (first.talker, first.band, first.network, first.feature) == ("t1", ">=4px", "uwn", "shape")
        # 240x180 only: 21 and 14 insertions over 40 references
        assert first.insertions == pytest.approx(35 / 80)
        assert error_breakdown(rows)[0].insertions == pytest.approx(109 / 240)

        above = [r for r in rows if r.lip_height_px >= 4.0]
        assert {b.band for b in error_breakdown(above, adjacent=True)} == {">=4px"}

    def test_plot_talkers(self, tmp_path: Path) -> None:
        """a panel per talker, still the same bytes on every write"""
        ladder = resolution_ladder()[:6]
        summary = summarize(sweep(ladder, talker="t1") + sweep(ladder, talker="t2", rest=17.0))
        first = plot_summary(summary, tmp_path / "a.svg").read_bytes()
        assert first == plot_summary(summary, tmp_path / "b.svg").read_bytes()
        single = plot_summary([s for s in summary if s.talker == "t1"], tmp_path / "c.svg").read_bytes()
        assert first != single
