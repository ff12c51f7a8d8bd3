"""
Order statistics of N independent, identically distributed variables.

Uniform variables on (-N/2, N/2) have the exact beta-family rank densities.
Any symmetric parent density is carried onto that case through its
cumulative t(x) = int_0^x rho, which is how the uncorrelated overlays of the
eigenvalue figures are built.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from pydantic import Field
from scipy import special, stats

from eigenstrata.exceptions import RankOutOfRange
from eigenstrata.utilities.general import ArrayLike, FrozenModel, as_array, restore


class OrderStatSpec(FrozenModel):
    """Sample size N and rank index n (n = 0 is the largest variable)."""

    N: int = Field(ge=1)
    n: int

    def checked(self) -> "OrderStatSpec":
        if not 0 <= self.n <= self.N - 1:
            raise RankOutOfRange(f"rank {self.n} outside [0, {self.N - 1}]")
        return self

    @property
    def log_binomial(self) -> float:
        """log of (N-1)! / (n! (N-n-1)!), via log-gamma."""
        N, n = self.N, self.n
        return special.gammaln(N) - special.gammaln(n + 1) - special.gammaln(N - n)


@dataclass(frozen=True)
class DensityMap:
    """
    A symmetric parent density normalised to N and its cumulative from the
    origin, t(x) = int_0^x rho, which runs from -N/2 to N/2.
    """

    density: Callable[[np.ndarray], np.ndarray]
    cumulative: Callable[[np.ndarray], np.ndarray]


def gaussian_map(N: int) -> DensityMap:
    """rho(x) = (N / sqrt(pi)) exp(-x^2), t(x) = (N/2) erf(x)."""
    return DensityMap(
        density=lambda x: N / math.sqrt(math.pi) * np.exp(-np.square(x)),
        cumulative=lambda x: 0.5 * N * special.erf(x),
    )


def _rank_kernel(spec: OrderStatSpec, fraction: np.ndarray) -> np.ndarray:
    # binomial * (1/2 - f)^n (1/2 + f)^(N-n-1), with f = t/N, in log space
    upper = np.clip(0.5 - fraction, 0.0, 1.0)
    lower = np.clip(0.5 + fraction, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_value = (
            spec.log_binomial
            + special.xlogy(spec.n, upper)
            + special.xlogy(spec.N - spec.n - 1, lower)
        )
    return np.exp(log_value)


def beta_rank_density(spec: OrderStatSpec, t: ArrayLike) -> ArrayLike:
    """
    Density of the (n+1)-th largest of N uniform variables on (-N/2, N/2).

    Args:
        spec: Sample size and rank.
        t: Position(s); values outside the interval have zero density.
    """
    spec = spec.checked()
    arr, scalar = as_array(t)
    values = _rank_kernel(spec, arr / spec.N)
    values = np.where(np.abs(arr) <= spec.N / 2, values, 0.0)
    return restore(values, scalar)


def rank_moments(spec: OrderStatSpec) -> tuple[float, float]:
    """Exact mean and variance of the beta rank density."""
    spec = spec.checked()
    N, n = spec.N, spec.n
    mean = N * (N - 1 - 2 * n) / (2 * (N + 1))
    variance = (n + 1) * (N - n) * N**2 / ((N + 2) * (N + 1) ** 2)
    return mean, variance


def bulk_rank_moments(spec: OrderStatSpec) -> tuple[float, float]:
    """Large-N bulk limits: mean (N-1)/2 - n and variance n(N-n)/N."""
    spec = spec.checked()
    N, n = spec.N, spec.n
    return (N - 1) / 2 - n, n * (N - n) / N


def bulk_rank_density(spec: OrderStatSpec, t: ArrayLike) -> ArrayLike:
    """Gaussian bulk limit of the rank density, for ranks with 0 < n < N."""
    mean, variance = bulk_rank_moments(spec)
    if variance <= 0:
        raise RankOutOfRange("the bulk limit needs 0 < n < N")
    arr, scalar = as_array(t)
    return restore(stats.norm.pdf(arr, loc=mean, scale=math.sqrt(variance)), scalar)


def edge_limit_density(n: int, y: ArrayLike) -> ArrayLike:
    """(-y)^n e^y / n! for y <= 0, the density of the (n+1)-th largest near the edge."""
    if n < 0:
        raise RankOutOfRange(f"rank {n} must be non-negative")
    arr, scalar = as_array(y)
    with np.errstate(divide="ignore"):
        log_value = special.xlogy(n, -np.minimum(arr, 0.0)) + arr - special.gammaln(n + 1)
    values = np.where(arr <= 0, np.exp(log_value), 0.0)
    return restore(values, scalar)


def gumbel_density(z: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(z)
    return restore(np.exp(-np.exp(-arr) - arr), scalar)


def gumbel_cdf(z: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(z)
    return restore(np.exp(-np.exp(-arr)), scalar)


def gumbel_variable(N: int, x: ArrayLike) -> ArrayLike:
    """
    z(x) = -ln[(N/2) erfc(x)] for the largest of N Gaussians.

    erfc is taken through log_ndtr so that the far tail keeps full precision.
    """
    arr, scalar = as_array(x)
    log_erfc = math.log(2.0) + special.log_ndtr(-math.sqrt(2.0) * arr)
    return restore(-(math.log(N / 2) + log_erfc), scalar)


def mapped_rank_density(density_map: DensityMap, spec: OrderStatSpec, x: ArrayLike) -> ArrayLike:
    """
    Density of the (n+1)-th largest of N variables drawn from the map's parent:
    rho(x) times the beta kernel evaluated at t(x).
    """
    spec = spec.checked()
    arr, scalar = as_array(x)
    fraction = np.asarray(density_map.cumulative(arr), dtype=float) / spec.N
    values = np.asarray(density_map.density(arr), dtype=float) * _rank_kernel(spec, fraction)
    return restore(values, scalar)
