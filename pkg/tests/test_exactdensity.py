import math

import numpy as np
import pytest
from scipy import integrate

from eigenstrata import exactdensity
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exceptions import DomainError, InvalidSpec


class TestNEquals2:
    x = np.linspace(-5, 5, 1001)

    def test_gue_matches_closed_form(self):
        np.testing.assert_allclose(
            exactdensity.density(EnsembleSpec.gue(2), self.x),
            exactdensity.gue_n2_density(self.x),
            atol=1e-12,
        )

    def test_goe_matches_closed_form(self):
        np.testing.assert_allclose(
            exactdensity.density(EnsembleSpec.goe(2), self.x),
            exactdensity.goe_n2_density(self.x),
            atol=1e-11,
        )

    @pytest.mark.parametrize("extreme", [exactdensity.gue_n2_extreme, exactdensity.goe_n2_extreme])
    def test_extremes_have_unit_mass(self, extreme):
        for which in ("largest", "smallest"):
            mass, _ = integrate.quad(lambda t: extreme(t, which), -np.inf, np.inf, epsabs=1e-13)
            assert mass == pytest.approx(1.0, abs=1e-10)

    def test_extremes_sum_to_density(self):
        total = exactdensity.gue_n2_extreme(self.x, "largest") + exactdensity.gue_n2_extreme(
            self.x, "smallest"
        )
        np.testing.assert_allclose(total, exactdensity.gue_n2_density(self.x), atol=1e-14)

    def test_largest_is_mirror_of_smallest(self):
        np.testing.assert_allclose(
            exactdensity.goe_n2_extreme(self.x, "largest"),
            exactdensity.goe_n2_extreme(-self.x, "smallest"),
            atol=1e-14,
        )

    @pytest.mark.parametrize(
        "extreme, mean",
        [
            (exactdensity.gue_n2_extreme, math.sqrt(2 / math.pi)),
            (exactdensity.goe_n2_extreme, math.sqrt(math.pi) / 2),
        ],
    )
    def test_largest_has_half_the_mean_gap(self, extreme, mean):
        largest = extreme(self.x, "largest")
        assert np.all(largest >= -1e-15)
        assert integrate.trapezoid(self.x * largest, self.x) == pytest.approx(mean, rel=1e-6)

    def test_goe_density_is_even_and_positive(self):
        values = exactdensity.goe_n2_density(self.x)
        np.testing.assert_allclose(values, values[::-1], atol=1e-15)
        assert np.all(values > 0)

    @pytest.mark.parametrize("kind", [EnsembleKind.GUE, EnsembleKind.GOE])
    def test_uncorrelated_overlay(self, kind):
        parent = exactdensity.density(EnsembleSpec.create(kind, 2), self.x)
        larger = exactdensity.uncorrelated_n2(kind, 0, self.x)
        smaller = exactdensity.uncorrelated_n2(kind, 1, self.x)
        np.testing.assert_allclose(larger + smaller, parent, atol=1e-11)
        assert integrate.trapezoid(larger, self.x) == pytest.approx(1.0, abs=1e-6)

    def test_uncorrelated_overlay_needs_gaussian_ranks(self):
        with pytest.raises(InvalidSpec):
            exactdensity.uncorrelated_n2(EnsembleKind.GUE, 2, 0.0)
        with pytest.raises(InvalidSpec):
            exactdensity.uncorrelated_n2(EnsembleKind.WISHART, 0, 1.0)


class TestDensity:
    @pytest.mark.parametrize(
        "spec",
        [
            EnsembleSpec.gue(1),
            EnsembleSpec.goe(1),
            EnsembleSpec.gue(2),
            EnsembleSpec.gue(20),
            EnsembleSpec.goe(3),
            EnsembleSpec.goe(20),
            EnsembleSpec.wishart(6, 4),
            EnsembleSpec.wishart(20, 4),
        ],
        ids=str,
    )
    def test_normalised_to_n(self, spec):
        assert exactdensity.total_mass(spec) == pytest.approx(spec.N, abs=1e-8)

    def test_gue_direct_sum(self):
        spec = EnsembleSpec.gue(7)
        x = np.linspace(-5, 5, 101)
        np.testing.assert_allclose(
            exactdensity.density(spec, x), exactdensity.direct_sum_density(spec, x), atol=1e-12
        )

    def test_wishart_forms_agree(self):
        spec = EnsembleSpec.wishart(5, 3)
        x = np.linspace(0.2, 30, 60)
        exact = exactdensity.density(spec, x)
        np.testing.assert_allclose(exact, exactdensity.direct_sum_density(spec, x), atol=1e-12)
        np.testing.assert_allclose(
            exact, exactdensity.wishart_density_shifted(5, 3, x), atol=1e-12
        )

    def test_goe_has_no_direct_sum(self):
        with pytest.raises(InvalidSpec):
            exactdensity.direct_sum_density(EnsembleSpec.goe(3), 0.0)

    def test_wishart_domain(self):
        with pytest.raises(DomainError):
            exactdensity.density(EnsembleSpec.wishart(4, 2), np.array([-1.0, 1.0]))

    def test_gaussian_densities_are_even(self):
        x = np.linspace(0, 6, 31)
        for spec in (EnsembleSpec.gue(9), EnsembleSpec.goe(9), EnsembleSpec.goe(10)):
            np.testing.assert_allclose(
                exactdensity.density(spec, x), exactdensity.density(spec, -x), atol=1e-11
            )

    def test_goe_cumulative_saturates(self):
        assert exactdensity.cumulative(EnsembleSpec.goe(3), 12.0) == pytest.approx(1.5, abs=1e-9)
        with pytest.raises(InvalidSpec):
            exactdensity.cumulative(EnsembleSpec.wishart(3, 2), 1.0)


class TestOscillatorIntegrals:
    def test_full_integral(self):
        expected, _ = integrate.quad(lambda t: exactdensity.oscillator_scalar(4, t), -np.inf, np.inf)
        assert exactdensity.oscillator_full_integral(4) == pytest.approx(expected, rel=1e-10)
        assert exactdensity.oscillator_full_integral(0) == pytest.approx(math.sqrt(2) * math.pi**0.25)
        assert exactdensity.oscillator_full_integral(5) == 0.0

    def test_odd_offset_only_for_odd_n(self):
        assert exactdensity.goe_odd_offset(4) == 0.0
        assert exactdensity.goe_odd_offset(5) != 0.0

    def test_series_tracks_quadrature_in_the_bulk(self):
        N, a, b = 40, -2.0, 2.5
        quadrature = exactdensity.gue_integral_term(N, np.array([a, b]))
        series = exactdensity.gue_integral_series(N, np.array([a, b]))
        assert quadrature[1] - quadrature[0] == pytest.approx(series[1] - series[0], abs=1e-3)

    def test_running_integral_from_origin(self):
        values = exactdensity.running_integral(math.cos, np.array([-1.0, 0.0, 2.0]))
        np.testing.assert_allclose(values, np.sin([-1.0, 0.0, 2.0]), atol=1e-12)
