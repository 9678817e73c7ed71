"""Tests for exclusions, metric summaries and their CSV files."""

import csv
import math

import pytest

from ebus3d.core.errors import MetricsError
from ebus3d.core.types import Label, Mode, Variant
from ebus3d.metrics import (
    METRICS_COLUMNS,
    LesionRecord,
    Level,
    SlicePrediction,
    apply_exclusions,
    format_summary_table,
    is_eligible,
    read_score_dump,
    summarize,
    write_metrics_csv,
    write_roc_csv,
    write_score_dump,
)

B, M = Label.BENIGN, Label.MALIGNANT


def predictions():
    return [
        SlicePrediction("L1", "P0", 0.9, M, "L1-g000"),
        SlicePrediction("L1", "P0", 0.4, M, "L1-g001"),
        SlicePrediction("L2", "P1", 0.2, B, "L2-g000"),
        SlicePrediction("L3", "P1", 0.6, B, "L3-d000"),
    ]


@pytest.mark.unit
class TestExclusions:
    """Per-variant lesion eligibility."""

    def test_short_grayscale_excluded_for_u(self):
        lesion = LesionRecord.from_segments("L1", "P0", B, [(Mode.GRAYSCALE, 5.5)])
        assert not is_eligible(lesion, Variant.U)
        assert apply_exclusions([lesion], Variant.U) == []

    def test_doppler_keeps_lesion_for_ud(self):
        lesion = LesionRecord.from_segments("L1", "P0", B, [(Mode.GRAYSCALE, 5.5), (Mode.DOPPLER, 8.0)])
        assert not is_eligible(lesion, Variant.U)
        assert is_eligible(lesion, Variant.UD)
        assert is_eligible(lesion, Variant.UDE)

    def test_elastography_alone_is_not_a_slice(self):
        lesion = LesionRecord.from_segments("L1", "P0", B, [(Mode.ELASTOGRAPHY, 30.0)])
        assert not is_eligible(lesion, Variant.UDE)

    def test_identity_when_all_long(self):
        lesions = [LesionRecord.from_segments(f"L{i}", "P0", B, [(Mode.GRAYSCALE, 6.0 + i)]) for i in range(4)]
        for variant in Variant:
            assert apply_exclusions(lesions, variant) == lesions


@pytest.mark.unit
class TestSummarize:
    """Two metric rows per evaluation."""

    def test_rows(self):
        summary = summarize(predictions(), "Res3D_UD")
        slice_row, lesion_row = summary.rows
        assert (slice_row.level, slice_row.n, slice_row.accuracy) == (Level.SLICE, 4, 0.5)
        assert (lesion_row.level, lesion_row.n) == (Level.LESION, 3)
        # lesion means 0.65, 0.2, 0.6
        assert lesion_row.accuracy == pytest.approx(2 / 3)
        assert lesion_row.auc == 1.0
        assert slice_row.auc == 0.75

    def test_single_class_gives_nan_auc(self):
        preds = [SlicePrediction("L1", "P0", 0.9, M), SlicePrediction("L2", "P0", 0.2, M)]
        summary = summarize(preds, "Res3D_U")
        assert all(math.isnan(row.auc) for row in summary.rows)
        assert summary.slice_roc is None

    def test_empty(self):
        with pytest.raises(MetricsError):
            summarize([], "Res3D_U")


@pytest.mark.unit
class TestCsvExports:
    """metrics.csv, roc_*.csv and scores.csv."""

    def test_metrics_csv(self, tmp_path):
        path = write_metrics_csv(tmp_path / "metrics.csv", summarize(predictions(), "Res3D_UD").rows)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(METRICS_COLUMNS)
        assert lines[1] == "slice,Res3D_UD,0.500000,0.750000,4"
        assert lines[2] == "lesion,Res3D_UD,0.666667,1.000000,3"

    def test_nan_is_written_as_text(self, tmp_path):
        preds = [SlicePrediction("L1", "P0", 0.9, M)]
        path = write_metrics_csv(tmp_path / "m.csv", summarize(preds, "Res3D_U").rows)
        assert path.read_text().splitlines()[1] == "slice,Res3D_U,1.000000,nan,1"

    def test_roc_csv(self, tmp_path):
        summary = summarize(predictions(), "Res3D_UD")
        with write_roc_csv(tmp_path / "roc.csv", summary.lesion_roc).open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["fpr", "tpr"]
        assert [(float(f), float(t)) for f, t in rows[1:]] == summary.lesion_roc.points

    def test_undefined_roc_is_header_only(self, tmp_path):
        assert write_roc_csv(tmp_path / "roc.csv", None).read_text() == "fpr,tpr\n"

    def test_score_dump(self, tmp_path):
        path = write_score_dump(tmp_path / "scores.csv", list(reversed(predictions())))
        rows = read_score_dump(path)
        assert rows[0] == ("L1", "L1-g000", 0.9)
        assert [r[2] for r in rows] == [0.9, 0.4, 0.2, 0.6]

    def test_score_dump_columns(self, tmp_path):
        (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
        with pytest.raises(MetricsError, match="expected columns"):
            read_score_dump(tmp_path / "bad.csv")

    def test_summary_table(self):
        table = format_summary_table(summarize(predictions(), "Res3D_UD").rows)
        header, slice_line, lesion_line = table.splitlines()
        assert header.split() == ["level", "model", "accuracy", "auc", "n"]
        assert slice_line.split() == ["slice", "Res3D_UD", "0.500000", "0.750000", "4"]
        assert lesion_line.split()[0] == "lesion"
