"""Unit tests for the figure scripts: schema errors, exit codes, provenance."""

import hashlib

import pytest
from PIL import Image

from ergochan_plots.contour import main as contour_main
from ergochan_plots.csvio import SchemaError, floats, read_columns
from ergochan_plots.timeseries import main as timeseries_main


def small_scan_csv(tmp_path, margins):
    lines = ["b,p,s1,s2,s3,margin"]
    values = iter(margins)
    for b in (0.0, 1.0):
        for p in (0.5, 1.0):
            m = next(values)
            lines.append(f"{b},{p},{p},{p},{p},{m}")
    path = tmp_path / "scan.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestCsvIo:
    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError, match="missing required columns"):
            read_columns(path, required=("margin",))

    def test_empty_body(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("t,W_max\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_columns(path, required=("t",))

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("t,W_max\n1,2\n3\n")
        with pytest.raises(SchemaError, match="cells"):
            read_columns(path, required=("t",))

    def test_inf_token_and_nan_rejection(self):
        assert floats(["1.0", "inf"], "x")[1] == float("inf")
        with pytest.raises(SchemaError, match="NaN"):
            floats(["nan"], "x")
        with pytest.raises(SchemaError, match="non-numeric"):
            floats(["oops"], "x")


class TestContour:
    def test_renders_and_embeds_checksum(self, tmp_path):
        csv_path = small_scan_csv(tmp_path, [0.1, 0.0, 0.2, 0.0])
        out = tmp_path / "fig" / "margin.png"
        assert contour_main(["--in", str(csv_path), "--out", str(out)]) == 0
        assert out.is_file() and out.stat().st_size > 0
        with Image.open(out) as img:
            meta = img.text
        assert meta["ergochan-input-sha256"] == hashlib.sha256(csv_path.read_bytes()).hexdigest()

    def test_negative_margin_exits_nonzero(self, tmp_path, capsys):
        csv_path = small_scan_csv(tmp_path, [0.1, -1e-6, 0.2, 0.0])
        out = tmp_path / "margin.png"
        assert contour_main(["--in", str(csv_path), "--out", str(out)]) == 1
        assert "negative divisibility margin" in capsys.readouterr().err
        assert not out.exists()

    def test_roundoff_negative_margin_tolerated(self, tmp_path):
        csv_path = small_scan_csv(tmp_path, [0.1, -5e-13, 0.2, 0.0])
        out = tmp_path / "margin.png"
        assert contour_main(["--in", str(csv_path), "--out", str(out)]) == 0

    def test_missing_margin_column_is_schema_error(self, tmp_path):
        path = tmp_path / "scan.csv"
        path.write_text("b,p,s1\n0,1,1\n")
        assert contour_main(["--in", str(path), "--out", str(tmp_path / "x.png")]) == 2

    def test_non_rectangular_grid_rejected(self, tmp_path):
        path = tmp_path / "scan.csv"
        path.write_text("b,p,margin\n0.0,0.5,0.1\n0.0,1.0,0.0\n1.0,0.5,0.2\n")
        assert contour_main(["--in", str(path), "--out", str(tmp_path / "x.png")]) == 2

    def test_degenerate_two_by_two_grid(self, tmp_path):
        csv_path = small_scan_csv(tmp_path, [0.0, 0.0, 0.0, 0.0])
        out = tmp_path / "flat.png"
        assert contour_main(["--in", str(csv_path), "--out", str(out)]) == 0
        assert out.is_file()


class TestTimeseries:
    def test_renders_plain_series(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("t,W_max\n0.0,1.0\n0.5,0.8\n1.0,0.7\n")
        out = tmp_path / "series.png"
        assert timeseries_main(["--in", str(path), "--out", str(out)]) == 0
        assert out.is_file() and out.stat().st_size > 0

    def test_empty_body_is_schema_error(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("t,W_max\n")
        assert timeseries_main(["--in", str(path), "--out", str(tmp_path / "x.png")]) == 2

    def test_missing_file_is_schema_error(self, tmp_path):
        code = timeseries_main(["--in", str(tmp_path / "nope.csv"),
                                "--out", str(tmp_path / "x.png")])
        assert code == 2
