"""
Exact finite-N eigenvalue densities and the N=2 closed forms.

GUE:      rho = N phi_{N-1}^2 - sqrt(N(N-1)) phi_N phi_{N-2}
          (the Christoffel-Darboux form sqrt(N/2)[phi_N' phi_{N-1} - phi_N phi_{N-1}'])
GOE:      GUE form + sqrt(N/2) phi_{N-1}(x) I_N(x), I_N = int_0^x phi_N,
          plus phi_{N-1} / int phi_{N-1} (with I_N shifted to a zero mean) for odd N
Wishart:  rho = sqrt(N(N+alpha)) [psi_N psi_{N-1}' - psi_{N-1} psi_N']
"""

import math
import warnings
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy import integrate, special

import eigenstrata
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exceptions import DomainError, InvalidSpec, QuadratureNotConverged
from eigenstrata.orderstats import DensityMap
from eigenstrata.specfn import (
    counting_fn_gue,
    laguerre_fn,
    laguerre_pair,
    oscillator_fn,
    oscillator_scalar,
    oscillator_table,
)
from eigenstrata.utilities.general import ArrayLike, as_array, restore
from eigenstrata.utilities.logging import get_logger

logger = get_logger(__name__)

Extreme = Literal["largest", "smallest"]

_SQRT_PI = math.sqrt(math.pi)
_SQRT2 = math.sqrt(2.0)


def _quad(f: Callable[[float], float], a: float, b: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(
            f, a, b,
            epsabs=eigenstrata.settings.quad_epsabs, epsrel=1e-12,
            limit=eigenstrata.settings.quad_limit,
        )
    if error > 1e-9 * max(1.0, abs(value)):
        raise QuadratureNotConverged(f"quadrature on [{a:.4g}, {b:.4g}] error {error:.2e}")
    return value


def running_integral(f: Callable[[float], float], x: ArrayLike) -> ArrayLike:
    """int_0^x f for every x, by adaptive quadrature between sorted neighbours."""
    arr, scalar = as_array(x)
    nodes = np.unique(np.concatenate([arr, [0.0]]))
    pieces = np.array([_quad(f, a, b) for a, b in zip(nodes[:-1], nodes[1:])])
    cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
    cumulative -= cumulative[np.searchsorted(nodes, 0.0)]
    return restore(cumulative[np.searchsorted(nodes, arr)], scalar)


# ------------ oscillator integrals ------------


def gue_integral_term(N: int, x: ArrayLike) -> ArrayLike:
    """I_N(x) = int_0^x phi_N, by adaptive quadrature."""
    if N < 1:
        raise InvalidSpec("N must be at least 1")
    return running_integral(lambda t: oscillator_scalar(N, t), x)


def gue_integral_series(N: int, x: ArrayLike) -> ArrayLike:
    """Two-term inverse-momentum series -phi_N'/p^2 + 2x phi_N/p^4, p^2 = 2N + 1 - x^2."""
    arr, scalar = as_array(x)
    rows = oscillator_table(N, arr)
    value = rows[N]
    derivative = -arr * value + math.sqrt(2 * N) * rows[N - 1]
    p2 = 2 * N + 1 - arr**2
    return restore(-derivative / p2 + 2 * arr * value / p2**2, scalar)


def oscillator_full_integral(n: int) -> float:
    """int phi_n over the real line: zero for odd n, closed form for even n."""
    if n % 2:
        return 0.0
    m = n // 2
    log_value = (
        0.5 * math.log(2) + 0.25 * math.log(math.pi)
        + 0.5 * math.lgamma(n + 1) - m * math.log(2) - math.lgamma(m + 1)
    )
    return math.exp(log_value)


@lru_cache(maxsize=64)
def goe_odd_offset(N: int) -> float:
    """
    Constant folded into I_N for odd N, so that the odd-N GOE density reads
    GUE form + sqrt(N/2) phi_{N-1} (I_N + offset).
    """
    if N % 2 == 0:
        return 0.0
    upper = math.sqrt(2 * N + 1) + 15.0
    half_integral = _quad(lambda t: oscillator_scalar(N, t), 0.0, upper)
    return math.sqrt(2 / N) / oscillator_full_integral(N - 1) - half_integral


# ------------ densities ------------


def _gue_density(N: int, x: np.ndarray) -> np.ndarray:
    rows = oscillator_table(N, x)
    result = N * rows[N - 1] ** 2
    if N >= 2:
        result -= math.sqrt(N * (N - 1)) * rows[N] * rows[N - 2]
    return result


def _goe_density(N: int, x: np.ndarray) -> np.ndarray:
    integral = np.asarray(gue_integral_term(N, x), dtype=float) + goe_odd_offset(N)
    correction = math.sqrt(N / 2) * np.asarray(oscillator_fn(N - 1, x)) * integral
    return _gue_density(N, x) + correction


def _wishart_density(N: int, alpha: int, x: np.ndarray) -> np.ndarray:
    if np.any(x <= 0):
        raise DomainError("the Wishart density is defined for x > 0")
    top, top_prime = laguerre_pair(N, alpha, x)
    below, below_prime = laguerre_pair(N - 1, alpha, x)
    return math.sqrt(N * (N + alpha)) * (top * below_prime - below * top_prime)


def density(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """
    Exact eigenvalue density of the ensemble, normalised to N.

    Raises:
        DomainError: Wishart density requested at x <= 0.
    """
    arr, scalar = as_array(x)
    if spec.kind is EnsembleKind.GUE:
        values = _gue_density(spec.N, arr)
    elif spec.kind is EnsembleKind.GOE:
        values = _goe_density(spec.N, arr)
    else:
        values = _wishart_density(spec.N, spec.alpha, arr)
    return restore(values, scalar)


def wishart_density_shifted(N: int, alpha: int, x: ArrayLike) -> ArrayLike:
    """
    The same Wishart density written with alpha + 1 functions:
    sqrt(N(N+alpha)/x) [psi_{N-1} psi_{N-1}^{+} - sqrt((N-1)/N) psi_N psi_{N-2}^{+}].
    """
    arr, scalar = as_array(x)
    if np.any(arr <= 0):
        raise DomainError("the Wishart density is defined for x > 0")
    shifted_below = laguerre_fn(N - 2, alpha + 1, arr) if N >= 2 else np.zeros_like(arr)
    values = np.sqrt(N * (N + alpha) / arr) * (
        laguerre_fn(N - 1, alpha, arr) * laguerre_fn(N - 1, alpha + 1, arr)
        - math.sqrt((N - 1) / N) * laguerre_fn(N, alpha, arr) * shifted_below
    )
    return restore(np.asarray(values, dtype=float), scalar)


def direct_sum_density(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """Unitary densities as the plain sum of squared basis functions."""
    arr, scalar = as_array(x)
    if spec.kind is EnsembleKind.GUE:
        values = np.sum(oscillator_table(spec.N - 1, arr) ** 2, axis=0)
    elif spec.kind is EnsembleKind.WISHART:
        values = sum(laguerre_fn(n, spec.alpha, arr) ** 2 for n in range(spec.N))
    else:
        raise InvalidSpec("the direct sum applies to unitary ensembles only")
    return restore(np.asarray(values, dtype=float), scalar)


def cumulative(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """int_0^x rho for the Gaussian ensembles."""
    if spec.kind is EnsembleKind.GUE:
        return counting_fn_gue(spec.N, x)
    if spec.kind is EnsembleKind.GOE:
        return running_integral(lambda t: float(density(spec, t)), x)
    raise InvalidSpec("cumulative counts from the origin apply to Gaussian ensembles")


def exact_density_map(spec: EnsembleSpec) -> DensityMap:
    """The exact symmetric density as a parent for uncorrelated rank overlays."""
    if not spec.is_gaussian:
        raise InvalidSpec("rank overlays need a symmetric parent density")
    return DensityMap(
        density=lambda x: np.asarray(density(spec, x), dtype=float),
        cumulative=lambda x: np.asarray(cumulative(spec, x), dtype=float),
    )


# ------------ N = 2 closed forms ------------


def gue_n2_density(x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    return restore(np.exp(-arr**2) * (1 + 2 * arr**2) / _SQRT_PI, scalar)


def goe_n2_density(x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    values = np.exp(-arr**2) / _SQRT_PI + arr * np.exp(-0.5 * arr**2) * special.erf(
        arr / _SQRT2
    ) / _SQRT2
    return restore(values, scalar)


def gue_n2_extreme(x: ArrayLike, which: Extreme) -> ArrayLike:
    """Density of the largest or smallest eigenvalue of a 2x2 GUE matrix."""
    arr, scalar = as_array(x)
    gauss = np.exp(-arr**2)
    largest = gauss / (2 * _SQRT_PI) * (
        (1 + 2 * arr**2) * (1 + special.erf(arr)) + 2 * arr * gauss / _SQRT_PI
    )
    if which == "largest":
        return restore(largest, scalar)
    return restore(np.asarray(gue_n2_density(arr)) - largest, scalar)


def goe_n2_extreme(x: ArrayLike, which: Extreme) -> ArrayLike:
    """Density of the largest or smallest eigenvalue of a 2x2 GOE matrix."""
    arr, scalar = as_array(x)
    largest = _SQRT2 * arr * np.exp(-0.5 * arr**2) / 4 * special.erfc(
        -arr / _SQRT2
    ) + np.exp(-arr**2) / (2 * _SQRT_PI)
    if which == "largest":
        return restore(largest, scalar)
    return restore(np.asarray(goe_n2_density(arr)) - largest, scalar)


def uncorrelated_n2(kind: EnsembleKind, n: int, x: ArrayLike) -> ArrayLike:
    """
    Rank densities of two independent variables drawn from the N=2 density:
    rho/2 [1 + (-1)^n t(x)], with t(x) = int_0^x rho; n = 0 is the larger.
    """
    if n not in (0, 1):
        raise InvalidSpec("N=2 overlays have ranks 0 and 1")
    arr, scalar = as_array(x)
    if kind is EnsembleKind.GUE:
        rho = np.asarray(gue_n2_density(arr))
        t = special.erf(arr) - arr * np.exp(-arr**2) / _SQRT_PI
    elif kind is EnsembleKind.GOE:
        rho = np.asarray(goe_n2_density(arr))
        t = special.erf(arr) - np.exp(-0.5 * arr**2) * special.erf(arr / _SQRT2) / _SQRT2
    else:
        raise InvalidSpec("N=2 overlays exist for GUE and GOE only")
    return restore(0.5 * rho * (1 + (-1) ** n * t), scalar)


def total_mass(spec: EnsembleSpec, nodes: int = 40) -> float:
    """
    int rho over the support band (from the origin for Wishart), by
    Gauss-Legendre quadrature on pieces about one mean level spacing wide.
    """
    lo, hi = spec.support_band()
    if not spec.is_gaussian:
        lo = 0.0
    width = spec.edges[1] - spec.edges[0]
    # 2 sqrt(2N) or 4 sqrt(MN): positive for every spec that passed validation
    assert width > 0, f"degenerate edges for {spec}"
    pieces = max(int(math.ceil(2 * spec.N * (hi - lo) / width)), 8)
    t, w = special.roots_legendre(nodes)
    edges = np.linspace(lo, hi, pieces + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return float(np.dot(weights, np.asarray(density(spec, points), dtype=float)))
