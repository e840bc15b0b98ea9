import json

import pytest

from rssvrg_plots import (GAP_FLOOR, PlotInputError, load_study,
                          load_trace_table)

from conftest import HEADER


class TestTraceTable:
    def test_parses_solver_rows_and_reference(self, traces_writer):
        path = traces_writer({"rs_svrg": [(0, 1, 0.5), (0, 2, 0.25)]},
                             reference=0.75)
        table = load_trace_table(path)
        assert table.solvers() == ["rs_svrg"]
        assert table.reference_objective == 0.75
        assert len(table.rows) == 2

    def test_median_over_seeds(self, traces_writer):
        path = traces_writer({"a": [(0, 1, 1.0), (1, 1, 2.0), (2, 1, 4.0)]})
        epochs, gaps = load_trace_table(path).curve("a")
        assert epochs == [1]
        assert gaps == [2.0]

    def test_epochs_sorted(self, traces_writer):
        path = traces_writer({"a": [(0, 3, 0.1), (0, 1, 0.4), (0, 2, 0.2)]})
        epochs, gaps = load_trace_table(path).curve("a")
        assert epochs == [1, 2, 3]
        assert gaps == [0.4, 0.2, 0.1]

    def test_gap_floor_applied(self, traces_writer):
        path = traces_writer({"a": [(0, 1, 0.0), (0, 2, 1e-15)]})
        _, gaps = load_trace_table(path).curve("a")
        assert gaps == [GAP_FLOOR, GAP_FLOOR]

    def test_solver_order_is_first_appearance(self, traces_writer):
        path = traces_writer({"z_first": [(0, 1, 1.0)],
                              "a_second": [(0, 1, 1.0)]})
        assert load_trace_table(path).solvers() == ["z_first", "a_second"]

    def test_missing_columns_listed(self, tmp_path):
        path = tmp_path / "bad.csv"
        cols = [c for c in HEADER if c not in ("gap", "seed")]
        path.write_text(",".join(cols) + "\n")
        with pytest.raises(PlotInputError) as err:
            load_trace_table(str(path))
        assert "gap" in str(err.value) and "seed" in str(err.value)

    def test_unexpected_column_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(HEADER + ["extra_col"]) + "\n")
        with pytest.raises(PlotInputError, match="extra_col"):
            load_trace_table(str(path))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(PlotInputError, match="empty"):
            load_trace_table(str(path))

    def test_header_only(self, tmp_path):
        path = tmp_path / "only.csv"
        path.write_text(",".join(HEADER) + "\n")
        with pytest.raises(PlotInputError, match="no solver rows"):
            load_trace_table(str(path))

    def test_reference_only(self, traces_writer):
        path = traces_writer({}, reference=1.0)
        with pytest.raises(PlotInputError, match="no solver rows"):
            load_trace_table(path)

    def test_bad_number_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(HEADER) + "\n"
                        + "r,a,gaussian,0,one,100,1.5,0.5,0\n")
        with pytest.raises(PlotInputError, match="bad.csv:2"):
            load_trace_table(str(path))

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(HEADER) + "\n" + "r,a,gaussian,0,1\n")
        with pytest.raises(PlotInputError, match="ragged"):
            load_trace_table(str(path))

    def test_non_finite_gap(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(HEADER) + "\n"
                        + "r,a,gaussian,0,1,100,1.5,nan,0\n")
        with pytest.raises(PlotInputError, match="non-finite"):
            load_trace_table(str(path))


class TestStudyLoader:
    def payload(self, **over):
        base = {"axis": "sampling_m", "grid": [1, 5, 50],
                "median_final_gap": [0.3, 0.2, 0.1], "config": {}}
        base.update(over)
        return base

    def write(self, tmp_path, payload):
        path = tmp_path / "study.json"
        path.write_text(json.dumps(payload))
        return str(path)

    def test_good_payload(self, tmp_path):
        study = load_study(self.write(tmp_path, self.payload()))
        assert study.axis == "sampling_m"
        assert study.grid == [1.0, 5.0, 50.0]
        assert study.gap == [0.3, 0.2, 0.1]

    def test_gap_floor(self, tmp_path):
        payload = self.payload(grid=[1], median_final_gap=[0.0])
        assert load_study(self.write(tmp_path, payload)).gap == [GAP_FLOOR]

    def test_missing_keys_listed(self, tmp_path):
        payload = {"axis": "sampling_m"}
        with pytest.raises(PlotInputError) as err:
            load_study(self.write(tmp_path, payload))
        msg = str(err.value)
        assert "grid" in msg and "median_final_gap" in msg

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "study.json"
        path.write_text("{not json")
        with pytest.raises(PlotInputError, match="malformed JSON"):
            load_study(str(path))

    def test_top_level_not_object(self, tmp_path):
        path = tmp_path / "study.json"
        path.write_text("[1, 2]")
        with pytest.raises(PlotInputError, match="not an object"):
            load_study(str(path))

    def test_unknown_axis(self, tmp_path):
        payload = self.payload(axis="epochs")
        with pytest.raises(PlotInputError, match="epochs"):
            load_study(self.write(tmp_path, payload))

    def test_length_mismatch(self, tmp_path):
        payload = self.payload(median_final_gap=[0.3])
        with pytest.raises(PlotInputError, match="length"):
            load_study(self.write(tmp_path, payload))

    def test_empty_grid(self, tmp_path):
        payload = self.payload(grid=[], median_final_gap=[])
        with pytest.raises(PlotInputError, match="nonempty"):
            load_study(self.write(tmp_path, payload))

    def test_non_numeric_entry(self, tmp_path):
        payload = self.payload(grid=[1, "five", 50])
        with pytest.raises(PlotInputError, match="non-numeric"):
            load_study(self.write(tmp_path, payload))
