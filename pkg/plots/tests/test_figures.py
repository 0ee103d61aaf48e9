import json
from pathlib import Path

import matplotlib
import matplotlib.pyplot as plt
import pytest

from pinchplots import FigureError, FigureSpec, build_figure, plot
from pinchplots.cli import cli

from synthetic import (
    COMPLEXITY_ROWS,
    SCHEMES,
    write_complexity_csv,
    write_fl_csv,
    write_learning_csv,
    write_sweep_csv,
)

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def fl_csv(tmp_path):
    return write_fl_csv(tmp_path / "fl.csv")


@pytest.fixture
def complexity_csv(tmp_path):
    return write_complexity_csv(tmp_path / "complexity.csv")


class TestFlCurves:
    def test_one_median_curve_per_scheme_with_bands(self, fl_csv):
        spec = FigureSpec(kind="fl_curves", csv_paths=(str(fl_csv),), out_path="unused.png")
        fig = build_figure(spec)
        ax = fig.axes[0]
        lines = [line for line in ax.lines]
        assert len(lines) == len(SCHEMES)
        assert sorted(line.get_label() for line in lines) == sorted(SCHEMES)
        assert len(ax.collections) == len(SCHEMES)  # one IQR band each
        plt.close(fig)

    def test_median_is_the_plotted_value(self, fl_csv):
        import csv as csvmod

        import numpy as np

        with open(fl_csv) as fh:
            rows = list(csvmod.DictReader(fh))
        acc = {}
        for r in rows:
            if r["scheme"] == "NO_PA":
                acc.setdefault(float(r["round"]), []).append(float(r["accuracy"]))
        spec = FigureSpec(kind="fl_curves", csv_paths=(str(fl_csv),), out_path="unused.png")
        fig = build_figure(spec)
        ax = fig.axes[0]
        line = next(l for l in ax.lines if l.get_label() == "NO_PA")
        ys = line.get_ydata()
        xs = line.get_xdata()
        for x, y in zip(xs, ys):
            assert y == pytest.approx(float(np.median(acc[float(x)])), rel=1e-12)
        plt.close(fig)


class TestComplexityBars:
    def test_bar_heights_equal_counts_from_csv(self, complexity_csv):
        spec = FigureSpec(kind="complexity_bars", csv_paths=(str(complexity_csv),), out_path="u.png")
        fig = build_figure(spec)
        ax = fig.axes[0]
        heights = [patch.get_height() for patch in ax.patches]
        assert heights == [float(r["evaluations"]) for r in COMPLEXITY_ROWS]
        assert ax.get_yscale() == "log"
        plt.close(fig)


class TestRateHeatmap:
    def test_grid_covers_positions_and_users(self, tmp_path):
        sweep = write_sweep_csv(tmp_path / "sweep.csv", positions=11, users=2)
        spec = FigureSpec(kind="rate_heatmap", csv_paths=(str(sweep),), out_path="u.png")
        fig = build_figure(spec)
        image = fig.axes[0].images[0]
        assert image.get_array().shape == (2, 11)
        plt.close(fig)


class TestLearningCurves:
    def test_band_from_multiple_runs(self, tmp_path):
        a = write_learning_csv(tmp_path / "a.csv", offset=0.0)
        b = write_learning_csv(tmp_path / "b.csv", offset=0.5)
        spec = FigureSpec(kind="learning_curves", csv_paths=(str(a), str(b)), out_path="u.png")
        fig = build_figure(spec)
        assert len(fig.axes) == 2  # reward axis + oracle-ratio twin
        plt.close(fig)


class TestErrors:
    def test_empty_csv_errors_and_writes_nothing(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("round,scheme,seed,accuracy\n")
        out = tmp_path / "fig.png"
        with pytest.raises(FigureError, match="no data rows"):
            plot("fl_curves", [str(empty)], str(out))
        assert not out.exists()

    def test_missing_column_names_the_offending_file(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("round,scheme\n0,NO_PA\n")
        with pytest.raises(FigureError, match=str(bad)):
            plot("fl_curves", [str(bad)], str(tmp_path / "fig.png"))

    def test_unknown_kind_rejected(self):
        with pytest.raises(FigureError, match="kind"):
            FigureSpec(kind="pie", csv_paths=("x.csv",), out_path="y.png")


class TestDeterminismAndGoldens:
    def test_same_csv_bytes_same_image_bytes(self, fl_csv, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        plot("fl_curves", [str(fl_csv)], str(a))
        plot("fl_curves", [str(fl_csv)], str(b))
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("kind", ["fl_curves", "complexity_bars", "rate_heatmap", "learning_curves"])
    def test_matches_golden_image(self, kind, tmp_path):
        meta_path = GOLDEN / "meta.json"
        if not meta_path.exists():
            pytest.skip("goldens not generated; run tests/make_goldens.py")
        meta = json.loads(meta_path.read_text())
        if meta["matplotlib"] != matplotlib.__version__:
            pytest.skip(
                f"goldens pinned to matplotlib {meta['matplotlib']}, running {matplotlib.__version__}"
            )
        if kind == "fl_curves":
            inputs = [str(write_fl_csv(tmp_path / "fl.csv"))]
        elif kind == "complexity_bars":
            inputs = [str(write_complexity_csv(tmp_path / "c.csv"))]
        elif kind == "rate_heatmap":
            inputs = [str(write_sweep_csv(tmp_path / "s.csv"))]
        else:
            inputs = [
                str(write_learning_csv(tmp_path / "la.csv", offset=0.0)),
                str(write_learning_csv(tmp_path / "lb.csv", offset=0.4)),
            ]
        out = tmp_path / f"{kind}.png"
        plot(kind, inputs, str(out))
        assert out.read_bytes() == (GOLDEN / f"{kind}.png").read_bytes()


class TestCli:
    def test_cli_renders(self, fl_csv, tmp_path):
        out = tmp_path / "fig.png"
        assert cli(["fl_curves", "--in", str(fl_csv), "--out", str(out)]) == 0
        assert out.exists()

    def test_cli_reports_errors(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("round,scheme,seed,accuracy\n")
        assert cli(["fl_curves", "--in", str(empty), "--out", str(tmp_path / "f.png")]) == 1

    def test_cli_rejects_unknown_kind(self, tmp_path):
        assert cli(["pie", "--in", "x.csv", "--out", "y.png"]) == 1
