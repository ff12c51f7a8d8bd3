"""
Weighted Hermite (oscillator) and Laguerre functions, their second solutions
and the special functions used throughout the package.

Both families are evaluated by recurrence on the weighted functions
themselves. A per-abscissa log scale absorbs the Gaussian or exponential
weight, so the recurrences neither overflow nor underflow before the final
product.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

import eigenstrata
from eigenstrata.exceptions import (
    AlphaOutOfRange,
    DegenerateInitCondition,
    DomainError,
    QuadratureNotConverged,
)
from eigenstrata.utilities.general import ArrayLike, FrozenModel, as_array, restore
from eigenstrata.utilities.logging import get_logger
from eigenstrata.utilities.validators import is_increasing

logger = get_logger(__name__)

OSCILLATOR_WRONSKIAN = 2 / math.pi
# Laguerre functions satisfy x W(psi, psi~) = 1/pi; W itself is not constant.
LAGUERRE_SCALED_WRONSKIAN = 1 / math.pi

_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)
_TINY = 1e-300
_HYPERBOLIC_CUTOFF = math.log(1e14)


class WaveState(FrozenModel):
    """A basis function and its second independent solution at one abscissa."""

    x: float
    value: float
    derivative: float
    tilde_value: float
    tilde_derivative: float

    @property
    def wronskian(self) -> float:
        return self.value * self.tilde_derivative - self.derivative * self.tilde_value


@dataclass(frozen=True)
class WaveTable:
    """
    Grid tabulation of a basis function, its second solution and (optionally)
    their running integrals from the origin.

    `exact_wronskian` holds the value the Wronskian must take at each grid
    point: constant 2/pi for oscillator functions, 1/(pi x) for Laguerre ones.
    """

    x: np.ndarray
    value: np.ndarray
    derivative: np.ndarray
    tilde_value: np.ndarray
    tilde_derivative: np.ndarray
    exact_wronskian: np.ndarray
    integral: Optional[np.ndarray] = None
    tilde_integral: Optional[np.ndarray] = None

    @property
    def wronskian(self) -> np.ndarray:
        return self.value * self.tilde_derivative - self.derivative * self.tilde_value

    def wronskian_drift(self) -> float:
        return float(np.max(np.abs(self.wronskian - self.exact_wronskian)))

    def states(self) -> list[WaveState]:
        return [
            WaveState(
                x=float(x), value=float(v), derivative=float(d),
                tilde_value=float(tv), tilde_derivative=float(td),
            )
            for x, v, d, tv, td in zip(
                self.x, self.value, self.derivative,
                self.tilde_value, self.tilde_derivative,
            )
        ]


def _check_index(n: int, name: str = "n") -> int:
    if n < 0 or int(n) != n:
        raise DomainError(f"{name} must be a non-negative integer, got {n}")
    return int(n)


# ------------ oscillator functions ------------


def _oscillator_recurrence(
    n: int, x: np.ndarray, keep_rows: bool = False
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """phi_n and phi_{n-1} on `x`, plus every phi_k for k <= n if requested."""
    log_scale = -0.5 * x * x - 0.25 * math.log(math.pi)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    rows = [np.exp(log_scale)] if keep_rows else []
    for k in range(1, n + 1):
        prev, cur = cur, math.sqrt(2 / k) * x * cur - math.sqrt((k - 1) / k) * prev
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        if keep_rows:
            rows.append(cur * np.exp(log_scale))
    scale = np.exp(log_scale)
    return cur * scale, prev * scale, rows


def oscillator_scalar(n: int, x: float) -> float:
    """phi_n at a single float abscissa, for ODE right-hand sides and quadrature."""
    log_scale = -0.5 * x * x - 0.25 * math.log(math.pi)
    prev, cur = 0.0, 1.0
    for k in range(1, n + 1):
        prev, cur = cur, math.sqrt(2 / k) * x * cur - math.sqrt((k - 1) / k) * prev
        if abs(cur) > _RESCALE:
            cur /= _RESCALE
            prev /= _RESCALE
            log_scale += _LOG_RESCALE
    return cur * math.exp(log_scale)


def oscillator_fn(n: int, x: ArrayLike) -> ArrayLike:
    """
    The oscillator function phi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)).

    Args:
        n: Quantum number, n >= 0.
        x: Abscissa (scalar or array).
    """
    n = _check_index(n)
    arr, scalar = as_array(x)
    value, _, _ = _oscillator_recurrence(n, arr.copy())
    return restore(value, scalar)


def oscillator_derivative(n: int, x: ArrayLike) -> ArrayLike:
    n = _check_index(n)
    arr, scalar = as_array(x)
    value, previous = oscillator_pair(n, arr)
    return restore(-arr * value + math.sqrt(2 * n) * previous, scalar)


def oscillator_pair(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """phi_n and phi_{n-1} (zero when n = 0) on an array."""
    value, previous, _ = _oscillator_recurrence(n, np.asarray(x, dtype=float).copy())
    return value, previous


def oscillator_table(n_max: int, x: ArrayLike) -> np.ndarray:
    """Rows phi_0 ... phi_{n_max} evaluated on `x`."""
    n_max = _check_index(n_max, "n_max")
    arr, _ = as_array(x)
    _, _, rows = _oscillator_recurrence(n_max, arr.copy(), keep_rows=True)
    return np.vstack(rows)


def _second_initial_conditions(n: int) -> tuple[float, float]:
    value0 = oscillator_scalar(n, 0.0)
    derivative0 = math.sqrt(2 * n) * oscillator_scalar(n - 1, 0.0) if n else 0.0
    if n % 2 == 0:
        if abs(value0) < _TINY:
            raise DegenerateInitCondition(f"phi_{n}(0) underflows; cannot seed phi~")
        return 0.0, OSCILLATOR_WRONSKIAN / value0
    if abs(derivative0) < _TINY:
        raise DegenerateInitCondition(f"phi_{n}'(0) underflows; cannot seed phi~")
    return -OSCILLATOR_WRONSKIAN / derivative0, 0.0


def oscillator_second_table(
    n: int,
    x_grid: ArrayLike,
    with_integrals: bool = False,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> WaveTable:
    """
    Integrate the oscillator equation phi~'' = (x^2 - 2n - 1) phi~ outward from
    the origin and tabulate (phi, phi', phi~, phi~') on `x_grid`.

    For even n the second solution is odd with phi~'(0) = 2 / (pi phi_n(0));
    for odd n it is even with phi~(0) = -2 / (pi phi_n'(0)). Negative abscissas
    are filled in by parity.

    With `with_integrals`, the running integrals I_n = int_0^x phi_n and
    I~_n = int phi~_n (with I~_n(0) = -phi~_n'(0) / (2n + 1)) are co-integrated.
    """
    n = _check_index(n)
    x = is_increasing(strict=False)(x_grid)
    rtol = rtol or eigenstrata.settings.ode_rtol
    atol = atol or eigenstrata.settings.ode_atol

    tilde0, dtilde0 = _second_initial_conditions(n)
    tilde_integral0 = -dtilde0 / (2 * n + 1)
    energy = 2 * n + 1

    abs_x, inverse = np.unique(np.abs(x), return_inverse=True)

    if with_integrals:

        def rhs(t, y):
            return [y[1], (t * t - energy) * y[0], y[0], oscillator_scalar(n, t)]

        y0 = [tilde0, dtilde0, tilde_integral0, 0.0]
    else:

        def rhs(t, y):
            return [y[1], (t * t - energy) * y[0]]

        y0 = [tilde0, dtilde0]

    if abs_x[-1] > 0:
        solution = integrate.solve_ivp(
            rhs, (0.0, float(abs_x[-1])), y0,
            method="DOP853", t_eval=abs_x, rtol=rtol, atol=atol,
        )
        if not solution.success:
            raise QuadratureNotConverged(f"phi~_{n} integration failed: {solution.message}")
        logger.debug("phi~_%d solved with %d evaluations", n, solution.nfev)
        track = solution.y[:, inverse]
    else:
        track = np.array(y0, dtype=float)[:, None].repeat(len(x), axis=1)

    # phi~ has the opposite parity of phi_n
    tilde_parity = -1.0 if n % 2 == 0 else 1.0
    negative = x < 0
    sign = np.where(negative, tilde_parity, 1.0)
    tilde_value = sign * track[0]
    tilde_derivative = np.where(negative, -tilde_parity, 1.0) * track[1]

    value, previous = oscillator_pair(n, x)
    derivative = -x * value + math.sqrt(2 * n) * previous

    integral = tilde_integral = None
    if with_integrals:
        tilde_integral = np.where(negative, -tilde_parity, 1.0) * track[2]
        phi_parity = 1.0 if n % 2 == 0 else -1.0
        integral = np.where(negative, -phi_parity, 1.0) * track[3]

    table = WaveTable(
        x=x, value=value, derivative=derivative,
        tilde_value=tilde_value, tilde_derivative=tilde_derivative,
        exact_wronskian=np.full_like(x, OSCILLATOR_WRONSKIAN),
        integral=integral, tilde_integral=tilde_integral,
    )
    drift = table.wronskian_drift()
    tolerance = eigenstrata.settings.wronskian_tolerance_oscillator
    if drift > tolerance:
        if rtol > 1e-13:
            logger.warning(
                "phi~_%d Wronskian drift %.2e above %.1e; tightening tolerances",
                n, drift, tolerance,
            )
            return oscillator_second_table(
                n, x, with_integrals, rtol=max(rtol / 100, 1e-13), atol=atol / 100
            )
        logger.warning("phi~_%d Wronskian drift %.2e persists", n, drift)
    return table


def oscillator_second(n: int, x_grid: ArrayLike) -> list[WaveState]:
    return oscillator_second_table(n, x_grid).states()


# ------------ Laguerre functions ------------


def _check_laguerre(n: int, alpha: int) -> tuple[int, int]:
    return _check_index(n), _check_index(alpha, "alpha")


def _laguerre_recurrence(
    n: int, alpha: int, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore"):
        log_x = np.log(x) if alpha else np.zeros_like(x)
    log_scale = 0.5 * alpha * log_x - 0.5 * x - 0.5 * math.lgamma(alpha + 1)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for k in range(1, n + 1):
        prev, cur = cur, (
            (2 * k + alpha - 1 - x) * cur
            - math.sqrt((k - 1) * (k - 1 + alpha)) * prev
        ) / math.sqrt(k * (k + alpha))
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
    scale = np.exp(log_scale)
    return cur * scale, prev * scale


def laguerre_fn(n: int, alpha: int, x: ArrayLike) -> ArrayLike:
    """
    The weighted Laguerre function
    psi_n^alpha(x) = sqrt(n! / (n + alpha)!) x^(alpha/2) exp(-x/2) L_n^alpha(x).
    """
    n, alpha = _check_laguerre(n, alpha)
    arr, scalar = as_array(x)
    if np.any(arr < 0):
        raise DomainError("Laguerre functions are defined for x >= 0")
    value, _ = _laguerre_recurrence(n, alpha, arr)
    return restore(value, scalar)


def laguerre_pair(n: int, alpha: int, x: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """psi_n and its derivative, from x psi_n' = (2n + alpha - x)/2 psi_n - sqrt(n(n+alpha)) psi_{n-1}."""
    n, alpha = _check_laguerre(n, alpha)
    arr, _ = as_array(x)
    if np.any(arr <= 0):
        raise DomainError("Laguerre derivatives need x > 0")
    value, previous = _laguerre_recurrence(n, alpha, arr)
    derivative = (
        0.5 * (2 * n + alpha - arr) * value - math.sqrt(n * (n + alpha)) * previous
    ) / arr
    return value, derivative


def _laguerre_prefactor(n: int, alpha: int) -> float:
    log_ratio = math.lgamma(n + alpha + 1) - math.lgamma(n + 1)
    return (-1) ** n * 2.0**alpha * math.exp(0.5 * log_ratio) / math.pi


def _fourier_integral(f: Callable[[float], float], weight: str, omega: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(
            f, 0.0, np.inf, weight=weight, wvar=omega,
            epsabs=eigenstrata.settings.quad_epsabs,
            limit=eigenstrata.settings.quad_limit, limlst=200,
        )
    if error > 1e-9 * max(1.0, abs(value)):
        raise QuadratureNotConverged(
            f"Fourier integral ({weight}, omega={omega:.4g}) error {error:.2e}"
        )
    return value


def _hyperbolic_integral(n: int, alpha: int, x: float) -> tuple[float, float]:
    """
    H(x) = int_0^inf cosh^(alpha-1) t exp(x tanh(t)/2 - (2n+alpha+1) t) dt and H'(x),
    truncated where the integrand drops below 1e-14 of its peak.
    """
    m = 2 * n + alpha + 1

    def log_integrand(t):
        log_cosh = t + np.log1p(np.exp(-2 * t)) - math.log(2)
        return (alpha - 1) * log_cosh + 0.5 * x * np.tanh(t) - m * t

    decay = m - alpha + 1
    t_scan = np.linspace(0.0, (0.5 * x + 2 * _HYPERBOLIC_CUTOFF) / decay + 1.0, 4001)
    log_values = log_integrand(t_scan)
    peak = float(log_values.max())
    alive = np.nonzero(log_values >= peak - _HYPERBOLIC_CUTOFF)[0]
    t_max = float(t_scan[min(alive[-1] + 1, len(t_scan) - 1)])

    def integrand(t):
        return math.exp(float(log_integrand(t)) - peak)

    def slope_integrand(t):
        return 0.5 * math.tanh(t) * integrand(t)

    options = dict(
        epsabs=eigenstrata.settings.quad_epsabs,
        epsrel=1e-12,
        limit=eigenstrata.settings.quad_limit,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(integrand, 0.0, t_max, **options)
        slope, _ = integrate.quad(slope_integrand, 0.0, t_max, **options)
    if error > 1e-9 * max(1.0, abs(value)):
        raise QuadratureNotConverged(f"hyperbolic integral error {error:.2e} at x={x}")
    scale = math.exp(peak)
    return value * scale, slope * scale


def _laguerre_fourier_parts(n: int, alpha: int, x: float) -> dict[str, float]:
    """
    Real and imaginary parts of g(x) = int_0^inf h(u) exp(iux/2) du and g'(x),
    with h(u) = (1 - iu)^n (1 + iu)^-(n + alpha + 1).
    """
    m = 2 * n + alpha + 1
    power = -(alpha + 1) / 2

    def h_re(u):
        return (1 + u * u) ** power * math.cos(m * math.atan(u))

    def h_im(u):
        return -((1 + u * u) ** power) * math.sin(m * math.atan(u))

    def uh_re(u):
        return u * h_re(u)

    def uh_im(u):
        return u * h_im(u)

    omega = 0.5 * x
    cos_re = _fourier_integral(h_re, "cos", omega)
    sin_re = _fourier_integral(h_re, "sin", omega)
    cos_im = _fourier_integral(h_im, "cos", omega)
    sin_im = _fourier_integral(h_im, "sin", omega)
    ucos_re = _fourier_integral(uh_re, "cos", omega)
    usin_re = _fourier_integral(uh_re, "sin", omega)
    ucos_im = _fourier_integral(uh_im, "cos", omega)
    usin_im = _fourier_integral(uh_im, "sin", omega)
    return {
        "re": cos_re - sin_im,
        "im": sin_re + cos_im,
        "re_prime": -0.5 * (usin_re + ucos_im),
        "im_prime": 0.5 * (ucos_re - usin_im),
    }


def laguerre_from_integral(n: int, alpha: int, x: float) -> float:
    """Reconstruct psi_n^alpha from its cosine-kernel integral representation."""
    n, alpha = _check_laguerre(n, alpha)
    if x <= 0:
        raise DomainError("The integral representation needs x > 0")
    parts = _laguerre_fourier_parts(n, alpha, x)
    return _laguerre_prefactor(n, alpha) * x ** (-alpha / 2) * parts["re"]


def laguerre_second(n: int, alpha: int, x: float) -> WaveState:
    """
    The Laguerre second solution psi~_n^alpha at x > 0 from its integral
    representation: a sine-kernel Fourier integral plus a hyperbolic
    correction integral, both by adaptive quadrature.

    Raises:
        AlphaOutOfRange: alpha < 2, where the hyperbolic integral degenerates.
        QuadratureNotConverged: a quadrature or the Wronskian check failed.
    """
    n, alpha = _check_laguerre(n, alpha)
    if alpha < 2:
        raise AlphaOutOfRange(f"psi~ needs alpha >= 2, got {alpha}")
    if x <= 0:
        raise DomainError("psi~ is evaluated for x > 0 only")

    prefactor = _laguerre_prefactor(n, alpha)
    parts = _laguerre_fourier_parts(n, alpha, x)
    hyperbolic, hyperbolic_slope = _hyperbolic_integral(n, alpha, x)

    core = parts["im"] + hyperbolic
    core_slope = parts["im_prime"] + hyperbolic_slope
    x_power = x ** (-alpha / 2)
    tilde_value = prefactor * x_power * core
    tilde_derivative = prefactor * x_power * (core_slope - 0.5 * alpha * core / x)

    value, derivative = laguerre_pair(n, alpha, x)
    state = WaveState(
        x=x, value=float(value[0]), derivative=float(derivative[0]),
        tilde_value=tilde_value, tilde_derivative=tilde_derivative,
    )
    drift = abs(math.pi * x * state.wronskian - 1.0)
    if drift > eigenstrata.settings.wronskian_tolerance_laguerre:
        raise QuadratureNotConverged(
            f"psi~_{n}^{alpha}({x}) Wronskian off by {drift:.2e} (relative)"
        )
    return state


def laguerre_second_table(n: int, alpha: int, x_grid: ArrayLike) -> WaveTable:
    """
    Tabulate (psi, psi', psi~, psi~') on a positive grid.

    psi~ is anchored by quadrature at the grid point nearest the middle of the
    classical region and continued in both directions by integrating
    x y'' + y' + [n + 1/2 - (alpha - x)^2 / (4x)] y = 0.
    """
    n, alpha = _check_laguerre(n, alpha)
    x = is_increasing()(x_grid)
    if x[0] <= 0:
        raise DomainError("Laguerre grids must be strictly positive")

    anchor_index = int(np.argmin(np.abs(x - (2 * n + alpha + 1))))
    anchor = laguerre_second(n, alpha, float(x[anchor_index]))
    c0 = n + 0.5 + 0.5 * alpha

    def rhs(t, y):
        c = c0 - 0.25 * t - alpha * alpha / (4 * t)
        return [y[1], -(y[1] + c * y[0]) / t]

    settings = eigenstrata.settings
    y0 = [anchor.tilde_value, anchor.tilde_derivative]
    tilde = np.empty((2, len(x)))
    tilde[:, anchor_index] = y0
    for chunk in (x[anchor_index:], x[: anchor_index + 1][::-1]):
        if len(chunk) < 2:
            continue
        solution = integrate.solve_ivp(
            rhs, (float(chunk[0]), float(chunk[-1])), y0,
            method="DOP853", t_eval=chunk,
            rtol=settings.ode_rtol, atol=settings.ode_atol,
        )
        if not solution.success:
            raise QuadratureNotConverged(f"psi~ continuation failed: {solution.message}")
        idx = np.searchsorted(x, chunk)
        tilde[:, idx] = solution.y

    value, derivative = laguerre_pair(n, alpha, x)
    table = WaveTable(
        x=x, value=value, derivative=derivative,
        tilde_value=tilde[0], tilde_derivative=tilde[1],
        exact_wronskian=LAGUERRE_SCALED_WRONSKIAN / x,
    )
    drift = float(np.max(np.abs(math.pi * x * table.wronskian - 1.0)))
    logger.debug("psi~_%d^%d grid Wronskian drift %.2e", n, alpha, drift)
    if drift > settings.wronskian_tolerance_laguerre:
        raise QuadratureNotConverged(f"psi~_{n}^{alpha} grid Wronskian drift {drift:.2e}")
    return table


# ------------ counting function ------------


def counting_fn_gue(N: int, x: ArrayLike) -> ArrayLike:
    """
    N(x) = int_0^x rho_GUE, summed from the per-level recursion
    c_n = -(x/n) phi_{n-1}^2 + c_{n-1}/n + ((n-1)/n) c_{n-2}, c_0 = erf(x)/2.
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    arr, scalar = as_array(x)
    squares = oscillator_table(max(N - 2, 0), arr) ** 2
    before, current = np.zeros_like(arr), 0.5 * special.erf(arr)
    total = current.copy()
    for n in range(1, N):
        before, current = current, (
            -arr * squares[n - 1] + current + (n - 1) * before
        ) / n
        total += current
    return restore(total, scalar)


# ------------ special functions ------------


def airy(x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    return restore(special.airy(arr)[0], scalar)


def airy_prime(x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    return restore(special.airy(arr)[1], scalar)


def erf(x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    return restore(special.erf(arr), scalar)


def erfc(x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    return restore(special.erfc(arr), scalar)
