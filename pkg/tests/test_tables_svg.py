"""CSV round-tripping and deterministic SVG rendering."""

import numpy as np
import pytest

from ramanlight import svgplot, tables


class TestTables:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(42)
        x = rng.normal(size=50) * 10.0 ** rng.integers(-12, 12, size=50)
        y = rng.normal(size=50)
        path = tables.write_table(tmp_path / "t.csv", ["a", "b"], [x, y])
        header, columns = tables.read_table(path)
        assert header == ["a", "b"]
        assert np.array_equal(columns[0], x)
        assert np.array_equal(columns[1], y)

    def test_header_column_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            tables.write_table(tmp_path / "t.csv", ["a"],
                               [np.arange(3.0), np.arange(3.0)])

    def test_unequal_columns(self, tmp_path):
        with pytest.raises(ValueError):
            tables.write_table(tmp_path / "t.csv", ["a", "b"],
                               [np.arange(3.0), np.arange(4.0)])

    def test_metrics_roundtrip(self, tmp_path):
        values = {"n_g": 1.9e5, "delay": 6.33e-7}
        path = tables.write_metrics_csv(tmp_path / "m.csv", values)
        assert tables.read_metrics_csv(path) == values

    def test_atomic_write_replaces(self, tmp_path):
        path = tmp_path / "x.csv"
        tables.write_metrics_csv(path, {"a": 1.0})
        tables.write_metrics_csv(path, {"a": 2.0})
        assert tables.read_metrics_csv(path) == {"a": 2.0}
        assert list(tmp_path.glob("*.tmp")) == []


class TestSvg:
    def test_two_point_series_single_polyline(self):
        doc = svgplot.render_line_chart(
            [("s", np.array([0.0, 1.0]), np.array([1.0, 2.0]))],
            title="t", x_label="x", y_label="y")
        assert doc.count("<polyline") == 1
        points = doc.split('points="')[1].split('"')[0]
        assert len(points.split()) == 2

    def test_byte_identical_output(self):
        series = [("a", np.linspace(0, 1, 100), np.sin(np.linspace(0, 6, 100))),
                  ("b", np.linspace(0, 1, 100), np.cos(np.linspace(0, 6, 100)))]
        first = svgplot.render_line_chart(series, "t", "x", "y")
        second = svgplot.render_line_chart(series, "t", "x", "y")
        assert first == second

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError):
            svgplot.render_line_chart([], "t", "x", "y")
        with pytest.raises(ValueError):
            svgplot.render_line_chart([("s", np.array([]), np.array([]))],
                                      "t", "x", "y")

    def test_marker_line_present(self):
        doc = svgplot.render_line_chart(
            [("s", np.array([0.0, 1.0]), np.array([0.0, 1.0]))],
            "t", "x", "y", vmarkers=[(0.5, "bound")])
        assert "stroke-dasharray" in doc
        assert "bound" in doc

    def test_label_escaping(self):
        doc = svgplot.render_line_chart(
            [("a<b>&c", np.array([0.0, 1.0]), np.array([0.0, 1.0]))],
            "t", "x", "y")
        assert "a&lt;b&gt;&amp;c" in doc
