import numpy as np
import pytest
from scipy import integrate

from eigenstrata import figures
from eigenstrata.exceptions import ConfigError
from eigenstrata.runconfig import RunConfig
from eigenstrata.utilities.io import read_csv


@pytest.fixture()
def quick():
    return RunConfig.from_flat({"n": 6, "samples": 0})


class TestHistogramOnGrid:
    def test_unit_area_and_zero_outside(self):
        values = np.random.default_rng(0).normal(size=5000)
        x = np.linspace(-8, 8, 3201)
        heights = figures.histogram_on_grid(values, x)
        assert heights[0] == 0.0 and heights[-1] == 0.0
        assert integrate.trapezoid(heights, x) == pytest.approx(1.0, abs=1e-2)


class TestBuild:
    @pytest.mark.parametrize("figure_id", figures.FIGURE_IDS)
    def test_every_figure(self, figure_id, quick):
        data = figures.build_figure(figure_id, quick)
        assert data.figure_id == figure_id
        lengths = {len(values) for values in data.columns.values()}
        assert len(lengths) == 1
        assert data.curves
        assert np.all(np.isfinite(data.columns[data.x_name]))

    def test_unknown_figure(self, quick):
        with pytest.raises(ConfigError):
            figures.build_figure(15, quick)

    def test_independent_ranks_sum_to_the_parent(self, quick):
        data = figures.build_figure(1, quick)
        ranks = sum(data.columns[f"rank_k{k:02d}"] for k in range(1, 7))
        np.testing.assert_allclose(ranks, data.columns["density"], rtol=1e-10)

    def test_two_by_two(self, quick):
        columns = figures.build_figure(3, quick).columns
        np.testing.assert_allclose(
            columns["eig_largest"] + columns["eig_smallest"], columns["density"], atol=1e-11
        )
        np.testing.assert_allclose(
            columns["uncorr_largest"] + columns["uncorr_smallest"], columns["density"], atol=1e-11
        )

    def test_component_columns(self, quick):
        names = list(figures.build_figure(5, quick).columns)
        assert names[:3] == ["x", "density", "exact_k01"]
        assert "asymptotic_k06" in names
        assert not any(name.startswith("simulation") for name in names)

    def test_simulation_columns(self, small_samples):
        config = RunConfig.from_flat({"n": 6, "samples": small_samples})
        columns = figures.build_figure(13, config).columns
        assert list(columns) == ["x", "simulation", "nearly_gaussian", "tracy_widom"]

    def test_gumbel_simulation(self):
        config = RunConfig.from_flat({"samples": 5000, "seed": 1})
        columns = figures.build_figure(2, config).columns
        assert integrate.trapezoid(columns["simulation"], columns["z"]) == pytest.approx(1.0, abs=5e-2)

    def test_semicircle_parent(self):
        config = RunConfig.from_flat({"n": 6, "samples": 0, "parent": "semicircle"})
        exact = figures.build_figure(6, RunConfig.from_flat({"n": 6, "samples": 0}))
        smooth = figures.build_figure(6, config)
        assert not np.allclose(exact.columns["uncorr_k03"], smooth.columns["uncorr_k03"])

    def test_user_grid(self):
        config = RunConfig.from_flat({"lo": -1, "hi": 1, "points": 11, "samples": 0})
        assert len(figures.build_figure(3, config).columns["x"]) == 11


class TestWrite:
    def test_csv(self, tmp_path):
        config = RunConfig.from_flat({"out": str(tmp_path), "samples": 0})
        data = figures.build_figure(3, config)
        paths = figures.write_figure(data, config)
        assert paths == [tmp_path / "fig3.csv"]
        written = read_csv(paths[0])
        assert list(written) == list(data.columns)
        np.testing.assert_allclose(written["density"], data.columns["density"], rtol=1e-11)

    def test_svg(self, tmp_path):
        pytest.importorskip("matplotlib")
        config = RunConfig.from_flat({"out": str(tmp_path), "samples": 0, "svg": True})
        paths = figures.write_figure(figures.build_figure(3, config), config)
        assert [p.name for p in paths] == ["fig3.csv", "fig3.svg"]
        assert "<svg" in paths[1].read_text()


class TestTables:
    @pytest.mark.parametrize("table_id", [1, 2])
    def test_rows(self, table_id):
        table = figures.build_table(table_id, RunConfig.from_flat({"n": 10}))
        assert [row.label for row in table.computed] == ["Tracy-Widom", "nearly Gaussian (N=10)"]
        assert len(table.reference) == 2
        computed, reference = table.computed[0].cumulants, table.reference[0].cumulants
        assert computed.mean == pytest.approx(reference.mean, abs=5e-4)

    def test_unknown_table(self):
        with pytest.raises(ConfigError):
            figures.build_table(3)
