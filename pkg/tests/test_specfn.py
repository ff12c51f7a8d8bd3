import math

import numpy as np
import pytest
from scipy import integrate, special

import eigenstrata
from eigenstrata import specfn
from eigenstrata.ensembles import EnsembleSpec
from eigenstrata.exactdensity import density
from eigenstrata.exceptions import (
    AlphaOutOfRange,
    DegenerateInitCondition,
    DomainError,
    QuadratureNotConverged,
)
from eigenstrata.settings import temporary_settings


class TestOscillator:
    def test_ground_state(self):
        assert specfn.oscillator_fn(0, 0.0) == pytest.approx(math.pi**-0.25, rel=1e-15)

    @pytest.mark.parametrize("n", [1, 5, 12])
    def test_matches_hermite_polynomials(self, n):
        x = np.linspace(-4, 4, 41)
        norm = math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
        expected = special.eval_hermite(n, x) * np.exp(-(x**2) / 2) / norm
        np.testing.assert_allclose(specfn.oscillator_fn(n, x), expected, atol=1e-13)

    def test_orthonormal(self):
        x = np.linspace(-15, 15, 6001)
        rows = specfn.oscillator_table(30, x)
        gram = integrate.trapezoid(rows[:, None, :] * rows[None, :, :], x, axis=-1)
        np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)

    @pytest.mark.parametrize("n", range(51))
    def test_parity(self, n):
        x = np.linspace(-6, 6, 121)
        values = specfn.oscillator_fn(n, x)
        np.testing.assert_allclose(values[::-1], (-1) ** n * values, atol=1e-12)

    @pytest.mark.parametrize("n", [0, 1, 2, 7, 20, 50])
    def test_has_n_zeros(self, n):
        reach = math.sqrt(2 * n + 1) + 3
        # an even point count keeps the origin off the grid
        values = specfn.oscillator_fn(n, np.linspace(-reach, reach, 8000))
        assert np.count_nonzero(np.diff(np.sign(values)) != 0) == n

    def test_large_index_stays_finite(self):
        values = specfn.oscillator_fn(400, np.array([0.0, 20.0, 40.0]))
        assert np.all(np.isfinite(values))
        assert abs(values[-1]) < 1e-80

    def test_derivative(self):
        x = np.linspace(-3, 3, 13)
        h = 1e-5
        numeric = (specfn.oscillator_fn(7, x + h) - specfn.oscillator_fn(7, x - h)) / (2 * h)
        np.testing.assert_allclose(specfn.oscillator_derivative(7, x), numeric, atol=1e-8)

    def test_scalar_matches_vector(self):
        assert specfn.oscillator_scalar(9, 1.3) == pytest.approx(specfn.oscillator_fn(9, 1.3), rel=1e-13)

    def test_negative_index(self):
        with pytest.raises(DomainError):
            specfn.oscillator_fn(-1, 0.0)


class TestOscillatorSecondSolution:
    @pytest.mark.parametrize("n", [20, 21])
    def test_wronskian(self, n):
        x = np.linspace(-8, 8, 401)
        table = specfn.oscillator_second_table(n, x)
        assert table.wronskian_drift() < 1e-8
        np.testing.assert_allclose(table.wronskian, 2 / math.pi, atol=1e-8)

    def test_parity(self):
        x = np.linspace(-3, 3, 61)
        even = specfn.oscillator_second_table(4, x)
        odd = specfn.oscillator_second_table(5, x)
        # the second solution has the opposite parity of phi_n
        np.testing.assert_allclose(even.tilde_value, -even.tilde_value[::-1], atol=1e-12)
        np.testing.assert_allclose(odd.tilde_value, odd.tilde_value[::-1], atol=1e-12)

    def test_running_integral(self):
        x = np.linspace(0, 4, 9)
        table = specfn.oscillator_second_table(6, x, with_integrals=True)
        expected = [integrate.quad(lambda t: specfn.oscillator_scalar(6, t), 0, b)[0] for b in x]
        np.testing.assert_allclose(table.integral, expected, atol=1e-10)

    def test_states(self):
        states = specfn.oscillator_second(3, [0.0, 0.5])
        assert [s.x for s in states] == [0.0, 0.5]
        assert states[1].wronskian == pytest.approx(2 / math.pi, abs=1e-9)

    @pytest.mark.parametrize("n", [4, 5])
    def test_vanishing_seed(self, n, monkeypatch):
        monkeypatch.setattr(specfn, "oscillator_scalar", lambda m, x: 0.0)
        with pytest.raises(DegenerateInitCondition):
            specfn.oscillator_second_table(n, [0.0, 1.0])


class TestLaguerre:
    @pytest.mark.parametrize("n, alpha", [(0, 0), (6, 3), (15, 4)])
    def test_matches_generalised_laguerre(self, n, alpha):
        x = np.array([0.5, 3.0, 10.0, 40.0])
        log_norm = 0.5 * (math.lgamma(n + 1) - math.lgamma(n + alpha + 1))
        expected = (
            np.exp(log_norm) * x ** (alpha / 2) * np.exp(-x / 2)
            * special.eval_genlaguerre(n, alpha, x)
        )
        np.testing.assert_allclose(specfn.laguerre_fn(n, alpha, x), expected, rtol=1e-10, atol=1e-14)

    def test_orthonormal(self):
        x = np.linspace(0, 250, 25001)[1:]
        rows = np.array([specfn.laguerre_fn(n, 4, x) for n in range(31)])
        gram = integrate.trapezoid(rows[:, None, :] * rows[None, :, :], x, axis=-1)
        np.testing.assert_allclose(gram, np.eye(31), atol=1e-8)

    @pytest.mark.parametrize("n, alpha", [(0, 2), (1, 0), (5, 4), (20, 2), (30, 4)])
    def test_has_n_zeros(self, n, alpha):
        x = np.linspace(0.01, 4 * n + 2 * alpha + 30, 20000)
        values = specfn.laguerre_fn(n, alpha, x)
        assert np.count_nonzero(np.diff(np.sign(values)) != 0) == n

    def test_derivative(self):
        x = np.linspace(1, 30, 12)
        h = 1e-5
        _, derivative = specfn.laguerre_pair(5, 4, x)
        numeric = (specfn.laguerre_fn(5, 4, x + h) - specfn.laguerre_fn(5, 4, x - h)) / (2 * h)
        np.testing.assert_allclose(derivative, numeric, atol=1e-8)

    def test_negative_abscissa(self):
        with pytest.raises(DomainError):
            specfn.laguerre_fn(2, 2, -1.0)

    def test_integral_representation(self):
        for x in (2.0, 9.0, 25.0):
            assert specfn.laguerre_from_integral(3, 4, x) == pytest.approx(
                specfn.laguerre_fn(3, 4, x), abs=1e-8
            )


class TestLaguerreSecondSolution:
    def test_wronskian_at_a_point(self):
        state = specfn.laguerre_second(5, 4, 12.0)
        assert math.pi * state.x * state.wronskian == pytest.approx(1.0, abs=1e-6)

    def test_small_alpha(self):
        with pytest.raises(AlphaOutOfRange):
            specfn.laguerre_second(5, 1, 3.0)

    def test_table(self):
        x = np.linspace(1.0, 40.0, 300)
        table = specfn.laguerre_second_table(6, 4, x)
        np.testing.assert_allclose(math.pi * x * table.wronskian, 1.0, atol=1e-6)
        np.testing.assert_allclose(table.exact_wronskian, 1 / (math.pi * x))

    def test_table_wronskian_guard(self):
        with temporary_settings(ode_rtol=1e-3, ode_atol=1e-3, wronskian_tolerance_laguerre=1e-12):
            with pytest.raises(QuadratureNotConverged):
                specfn.laguerre_second_table(6, 4, np.linspace(1.0, 40.0, 50))

    def test_table_needs_positive_grid(self):
        with pytest.raises(DomainError):
            specfn.laguerre_second_table(3, 4, [0.0, 1.0])


class TestCountingFunction:
    def test_saturates_at_half_n(self):
        assert specfn.counting_fn_gue(5, 10.0) == pytest.approx(2.5, abs=1e-12)
        assert specfn.counting_fn_gue(5, -10.0) == pytest.approx(-2.5, abs=1e-12)

    def test_is_the_integral_of_the_density(self):
        spec = EnsembleSpec.gue(6)
        expected, _ = integrate.quad(lambda t: density(spec, t), 0, 1.3, epsabs=1e-13)
        assert specfn.counting_fn_gue(6, 1.3) == pytest.approx(expected, abs=1e-10)


def test_special_functions_wrap_scipy():
    assert specfn.airy(0.0) == pytest.approx(special.airy(0.0)[0])
    assert specfn.airy_prime(1.0) == pytest.approx(special.airy(1.0)[1])
    assert specfn.erf(0.3) + specfn.erfc(0.3) == pytest.approx(1.0)
