import hashlib
import json

import numpy as np
import pytest

from ktrack.dataio import (
    RESULT_COLUMNS,
    append_result,
    cell_to_row,
    emit_chart,
    format_results,
    read_dataset,
    read_results,
    write_dataset,
    write_results,
)
from ktrack.errors import NothingToPlotError, ParseError, UnsupportedVersionError
from ktrack.synthgen import Dataset, TrajectoryKind, TrajectorySpec, generate


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestDatasetRoundTrip:
    def test_minimal_file(self, tmp_path):
        ds = Dataset(
            positions=np.array([[[1.5, 2.5]]]),
            visible=np.array([[True]]),
            point_ids=[0],
            width=10.0,
            height=10.0,
        )
        p = tmp_path / "one.json"
        write_dataset(ds, p)
        back = read_dataset(p)
        np.testing.assert_array_equal(back.positions, ds.positions)
        np.testing.assert_array_equal(back.visible, ds.visible)
        assert back.point_ids == [0]
        assert (back.width, back.height) == (10.0, 10.0)

    def test_generated_dataset_bit_exact(self, tmp_path):
        ds = generate(
            TrajectorySpec(
                kind=TrajectoryKind.PIECEWISE_ACCELERATION, frames=200, num_points=20, seed=31
            )
        )
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        write_dataset(ds, p1)
        back = read_dataset(p1)
        assert np.array_equal(back.positions, ds.positions)  # bit-exact floats
        write_dataset(back, p2)
        assert _digest(p1) == _digest(p2)

    def test_track_length_mismatch_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        doc = {
            "version": 1,
            "frameBounds": [10, 10],
            "T": 3,
            "points": [{"id": 0, "track": [[0, 0, True]]}],
        }
        p.write_text(json.dumps(doc))
        with pytest.raises(ParseError, match="track length"):
            read_dataset(p)

    def test_version_mismatch_rejected(self, tmp_path):
        p = tmp_path / "v9.json"
        p.write_text(json.dumps({"version": 9, "frameBounds": [1, 1], "T": 0, "points": []}))
        with pytest.raises(UnsupportedVersionError):
            read_dataset(p)

    def test_malformed_json_has_line_context(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{"version": 1,\n  "frameBounds": [10, 10,\n}')
        with pytest.raises(ParseError, match="line"):
            read_dataset(p)

    def test_nonfinite_position_rejected(self, tmp_path):
        p = tmp_path / "inf.json"
        doc = {
            "version": 1,
            "frameBounds": [10, 10],
            "T": 1,
            "points": [{"id": 0, "track": [[1e999, 0, True]]}],
        }
        p.write_text(json.dumps(doc).replace("Infinity", "1e999"))
        with pytest.raises(ParseError):
            read_dataset(p)


def _row(**overrides):
    row = {col: "" for col in RESULT_COLUMNS}
    row.update(
        dataset="synthetic:constant-velocity",
        tracker="oracle",
        predictor="full-kalman",
        n=5,
        grid=20,
        seed=0,
        warmup=3,
        epe=1.2345678901234567,
        pck5=0.875,
    )
    row.update(overrides)
    return row


class TestResultsTable:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "r.csv"
        write_results([_row(), _row(n=10)], p, config={"seed": 0})
        rows = read_results(p)
        assert len(rows) == 2
        assert rows[0]["predictor"] == "full-kalman"
        assert float(rows[0]["epe"]) == 1.2345678901234567  # full precision survives
        assert rows[1]["n"] == "10"

    def test_append_creates_header_once(self, tmp_path):
        p = tmp_path / "r.csv"
        append_result(_row(), p, config={"seed": 1})
        append_result(_row(n=10), p, config={"seed": 1})
        text = p.read_text()
        assert text.count("dataset,tracker") == 1
        assert text.startswith("# config: ")
        assert len(read_results(p)) == 2

    def test_truncated_final_row_dropped(self, tmp_path):
        p = tmp_path / "r.csv"
        write_results([_row(), _row(n=10)], p)
        whole = p.read_text()
        p.write_text(whole[: len(whole) - 25])  # chop mid-row, no trailing newline
        rows = read_results(p)
        assert len(rows) == 1
        assert rows[0]["n"] == "5"

    def test_malformed_middle_row_is_an_error(self, tmp_path):
        p = tmp_path / "r.csv"
        lines = format_results([_row(), _row(n=10)]).splitlines()
        lines.insert(2, "only,three,fields")
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError):
            read_results(p)

    def test_deterministic_bytes(self, tmp_path):
        rows = [_row(), _row(n=10, epe=0.1)]
        a = format_results(rows, config={"seed": 3, "ns": [0, 5]})
        b = format_results(rows, config={"ns": [0, 5], "seed": 3})
        assert a == b  # config serialization is key-sorted


class TestCharts:
    def _rows(self):
        return [
            {"n": "2", "pck5": "0.95", "predictor": "full-kalman"},
            {"n": "5", "pck5": "0.85", "predictor": "full-kalman"},
            {"n": "10", "pck5": "0.70", "predictor": "full-kalman"},
            {"n": "2", "pck5": "0.90", "predictor": "zero-order-hold"},
            {"n": "5", "pck5": "0.60", "predictor": "zero-order-hold"},
            {"n": "10", "pck5": "0.40", "predictor": "zero-order-hold"},
        ]

    def test_emits_labeled_series(self, tmp_path):
        out = tmp_path / "chart.svg"
        emit_chart(self._rows(), "n", "pck5", "predictor", out, title="pck5 vs n")
        svg = out.read_text()
        assert svg.startswith("<svg ")
        assert "full-kalman" in svg and "zero-order-hold" in svg
        assert svg.count("<polyline") == 2

    def test_byte_identical_across_runs(self, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_chart(self._rows(), "n", "pck5", "predictor", a)
        emit_chart(self._rows(), "n", "pck5", "predictor", b)
        assert _digest(a) == _digest(b)

    def test_empty_slice_rejected(self, tmp_path):
        with pytest.raises(NothingToPlotError):
            emit_chart([], "n", "pck5", "predictor", tmp_path / "x.svg")

    def test_rows_without_metric_skipped(self, tmp_path):
        rows = [{"n": "2", "pck5": "", "predictor": "a"}]
        with pytest.raises(NothingToPlotError):
            emit_chart(rows, "n", "pck5", "predictor", tmp_path / "x.svg")
