import math

import pytest

from eigenstrata import verify
from eigenstrata.ensembles import EnsembleSpec
from eigenstrata.exceptions import QuadratureNotConverged


class TestCriterion:
    def test_serialises_pass(self):
        criterion = verify.Criterion(name="a", value=0.1, bound=1.0, passed=True)
        assert criterion.model_dump(by_alias=True) == {
            "name": "a", "value": 0.1, "bound": 1.0, "pass": True,
        }


class TestSuites:
    def test_fast_is_analytic(self):
        names = [name for name, _, _ in verify.checks("fast")]
        assert len(names) == len(set(names))
        assert "tw2_mean" in names and "normalisation" in names
        assert not any("ks" in name for name in names)

    def test_full_adds_monte_carlo(self):
        fast = {name for name, _, _ in verify.checks("fast")}
        full = {name for name, _, _ in verify.checks("full")}
        assert full - fast == {
            "gumbel_ks", "ks_bulk_gue", "ks_bulk_goe", "ks_bulk_wishart",
            "ks_edge_gue", "ks_edge_goe", "ks_edge_wishart",
        }

    def test_run_suite(self, monkeypatch):
        def broken():
            raise QuadratureNotConverged("no")

        monkeypatch.setattr(
            verify,
            "checks",
            lambda suite, samples, seed: [
                ("good", lambda: 1e-9, 1e-6),
                ("bad", lambda: 1.0, 1e-6),
                ("broken", broken, 1e-6),
            ],
        )
        report = verify.run_suite()
        assert [c.passed for c in report] == [True, False, False]
        assert math.isinf(report[2].value)


class TestAnalyticCriteria:
    def test_rank_moments(self):
        assert verify.rank_moment_deviation(max_n=6) < 1e-9

    def test_two_level_oracles(self):
        assert verify.n2_density_deviation() < 1e-12
        assert verify.n2_extreme_sum_deviation() < 1e-14
        assert verify.n2_extreme_mass_deviation() < 1e-10

    def test_normalisation(self):
        assert verify.normalisation_deviation((2, 6)) < 1e-8

    def test_wronskians(self):
        assert verify.oscillator_wronskian_drift(10) < 1e-8
        assert verify.laguerre_wronskian_drift(10, 4) < 1e-6

    def test_poisson(self):
        assert verify.poisson_deviation() < 1e-6

    def test_bulk_band(self):
        spec = EnsembleSpec.wishart(20, 4)
        lo, hi = verify.bulk_band(spec)
        edge_lo, edge_hi = spec.edges
        assert edge_lo < lo < hi < edge_hi

    @pytest.mark.parametrize("name", ["tw2_mean", "tw1_std_dev_relative", "tw1_excess_kurtosis"])
    def test_tracy_widom(self, name):
        check, bound = next((c, b) for n, c, b in verify.checks("fast") if n == name)
        assert check() <= bound


class TestMonteCarloCriteria:
    def test_gumbel(self):
        assert verify.gumbel_ks(5000, seed=7) < 4e-2

    @pytest.mark.parametrize(
        "spec", [EnsembleSpec.gue(20), EnsembleSpec.goe(20), EnsembleSpec.wishart(20, 4)], ids=str
    )
    def test_edge(self, spec, small_samples):
        assert verify.edge_ks(spec, small_samples, seed=7) < 0.12
