import math

import numpy as np
import pytest

from eigenstrata import phasedecomp
from eigenstrata.ensembles import EnsembleSpec
from eigenstrata.exactdensity import density
from eigenstrata.exceptions import AlphaOutOfRange, DomainError, GridTooCoarse, SplitMismatch
from eigenstrata.settings import temporary_settings


class TestUnwrapPhase:
    def test_recovers_a_linear_phase(self):
        x = np.linspace(0, 10, 201)
        phase = 3 * x
        raw = np.arctan2(np.sin(phase), np.cos(phase))
        unwrapped = phasedecomp.unwrap_phase(raw, np.full_like(x, 3.0), x)
        np.testing.assert_allclose(unwrapped, phase, atol=1e-12)

    def test_coarse_grid(self):
        with pytest.raises(GridTooCoarse):
            phasedecomp.unwrap_phase(np.array([0.0, 0.1]), np.array([10.0, 10.0]), np.array([0.0, 1.0]))


class TestPhaseAmplitude:
    def test_modulus_and_phase_reproduce_the_pair(self):
        x = np.linspace(-8, 8, 641)
        table = phasedecomp.phase_table(EnsembleSpec.gue(20), 20, x)
        waves = table.waves
        np.testing.assert_allclose(table.A * np.cos(table.theta), waves.value, atol=1e-12)
        np.testing.assert_allclose(table.A * np.sin(table.theta), waves.tilde_value, atol=1e-10)

    def test_phase_increases(self):
        x = np.linspace(1, 60, 600)
        table = phasedecomp.phase_table(EnsembleSpec.wishart(10, 4), 10, x)
        assert np.all(np.diff(table.theta) > 0)
        assert np.all(table.theta_prime > 0)

    def test_wishart_phase_slope_falls_as_one_over_x(self):
        x = np.linspace(1, 60, 5901)
        table = phasedecomp.phase_table(EnsembleSpec.wishart(10, 4), 10, x)
        np.testing.assert_allclose(math.pi * x * table.A**2 * table.theta_prime, 1.0, rtol=1e-12)
        numeric = np.gradient(table.theta, x)
        np.testing.assert_allclose(numeric[1:-1], table.theta_prime[1:-1], rtol=1e-3)

    def test_points(self):
        points = phasedecomp.phase_amplitude(EnsembleSpec.gue(5), 5, [0.0, 0.1, 0.2])
        assert [p.x for p in points] == pytest.approx([0.0, 0.1, 0.2])
        assert all(p.A > 0 for p in points)


class TestGoeAuxiliary:
    def test_rotation_preserves_the_envelope(self):
        rows = phasedecomp.goe_q_table(20, np.linspace(0, 4, 81))
        for row in rows:
            assert row.Q1**2 + row.Q2**2 == pytest.approx(row.I**2 + row.I_tilde**2, rel=1e-12)

    def test_single_point(self):
        row = phasedecomp.goe_q_functions(12, 0.7)
        assert row.x == 0.7

    def test_needs_two_levels(self):
        with pytest.raises(DomainError):
            phasedecomp.goe_q_table(1, [0.0, 1.0])


class TestSplit:
    @pytest.mark.parametrize(
        "spec, lo, hi",
        [
            (EnsembleSpec.gue(20), -7.0, 7.0),
            (EnsembleSpec.goe(20), -7.0, 7.0),
            (EnsembleSpec.goe(7), -4.5, 4.5),
            (EnsembleSpec.wishart(20, 4), 2.0, 95.0),
        ],
        ids=lambda v: str(v) if isinstance(v, EnsembleSpec) else None,
    )
    def test_smooth_plus_fluctuating_is_exact(self, spec, lo, hi):
        x = np.linspace(lo, hi, 1201)
        table = phasedecomp.split_table(spec, x)
        np.testing.assert_allclose(table.rho_s + table.rho_f, table.rho, atol=1e-7)
        assert np.all(table.B >= 0)

    def test_reuses_a_supplied_density(self):
        spec = EnsembleSpec.gue(6)
        x = np.linspace(-3, 3, 121)
        rho = np.asarray(density(spec, x), dtype=float)
        table = phasedecomp.split_table(spec, x, rho=rho)
        assert table.rho is rho
        assert len(table.splits()) == len(x)

    def test_drifted_density_is_refused(self):
        spec = EnsembleSpec.gue(6)
        x = np.linspace(-3, 3, 121)
        rho = 1.05 * np.asarray(density(spec, x), dtype=float)
        with pytest.raises(SplitMismatch):
            phasedecomp.split_table(spec, x, rho=rho)

    def test_tolerance_comes_from_settings(self):
        spec = EnsembleSpec.gue(6)
        x = np.linspace(-3, 3, 121)
        rho = 1.05 * np.asarray(density(spec, x), dtype=float)
        with temporary_settings(split_tolerance=0.5):
            table = phasedecomp.split_table(spec, x, rho=rho)
        assert table.rho is rho

    def test_single_point(self):
        spec = EnsembleSpec.gue(20)
        split = phasedecomp.split_density(spec, 0.3)
        assert split.rho_s + split.rho_f == pytest.approx(density(spec, 0.3), abs=1e-8)

    def test_raw_nu_advances_by_the_counting_function(self):
        spec = EnsembleSpec.gue(20)
        x = np.linspace(-2, 2, 401)
        nu = phasedecomp.split_table(spec, x).raw_nu
        # nu tracks the mean staircase, whose slope is the semicircle
        slope = np.gradient(nu, x)
        assert np.all(np.abs(slope - math.sqrt(40 - x**2) / math.pi) < 0.5)

    def test_needs_two_levels(self):
        with pytest.raises(DomainError):
            phasedecomp.split_table(EnsembleSpec.gue(1), [0.0, 0.1])

    def test_outside_band(self):
        with pytest.raises(DomainError):
            phasedecomp.split_density(EnsembleSpec.gue(4), 50.0)

    def test_wishart_needs_alpha_two(self):
        with pytest.raises(AlphaOutOfRange):
            phasedecomp.split_table(EnsembleSpec.wishart(5, 1), [1.0, 2.0])
