"""
Decomposition of an exact density into N nearly-Gaussian eigenvalue
distributions,

    rho_k(x) = rho_s(x) (2 pi sigma^2(x))^(-1/2) exp[-(nu(x) - nu_k)^2 / (2 sigma^2(x))],

where nu(x) is the phase-based scaled position, sigma^2 = -ln[B / (2 rho_s)] / (2 pi^2),
and components are ranked from the smallest eigenvalue (k = 1) upwards.
Past the outermost inflection points the extreme components take the exact
tail: the density minus every other component.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import Field
from scipy import integrate, special
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

import eigenstrata
from eigenstrata.asymptotics import (
    counting_xi,
    goe_bulk_amplitude,
    goe_bulk_smooth,
    leading_density,
)
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exactdensity import density
from eigenstrata.exceptions import DomainError, NotFound, RankOutOfRange, VarianceUndefined
from eigenstrata.phasedecomp import SplitTable, split_table
from eigenstrata.utilities.general import ArrayLike, FrozenModel, as_array, restore
from eigenstrata.utilities.logging import get_logger

logger = get_logger(__name__)

Mode = Literal["exact", "bulk"]

_FINE_POINTS = 20_001
_GRID_FLOOR = 0.2
_REMAINDER_LIMIT = 1e-6


class ComponentKind(str, Enum):
    BULK_GAUSSIAN = "bulk_gaussian"
    EDGE_EXACT_TAIL = "edge_exact_tail"


class EigenComponent(FrozenModel):
    k: int = Field(ge=1)
    nu_k: float
    kind: ComponentKind


class ScaledCoordinates(FrozenModel):
    nu: float
    sigma2: float = Field(gt=0)


class ComponentMoments(FrozenModel):
    mass: float
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


def component_center(spec: EnsembleSpec, k: int) -> float:
    """nu_k = k - (N+1)/2 for the Gaussian ensembles and k - 1/2 for Wishart."""
    if not 1 <= k <= spec.N:
        raise RankOutOfRange(f"component {k} outside [1, {spec.N}]")
    return k - (spec.N + 1) / 2 if spec.is_gaussian else k - 0.5


def variance_from_ratio(B: ArrayLike, rho_s: ArrayLike) -> ArrayLike:
    """sigma^2 = -ln[B / (2 rho_s)] / (2 pi^2); NaN where the ratio is not in (0, 1)."""
    b, scalar = as_array(B)
    s = np.asarray(rho_s, dtype=float) * np.ones_like(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = b / (2 * s)
        values = np.where((s > 0) & (ratio > 0) & (ratio < 1), -np.log(ratio), np.nan)
    return restore(values / (2 * math.pi**2), scalar)


def decomposition_grid(spec: EnsembleSpec, spacing: Optional[float] = None) -> np.ndarray:
    """
    Abscissae across the support band, spaced `spacing` mean level spacings
    apart inside the spectrum and at a fixed fraction of the peak density
    outside it.
    """
    spacing = spacing or eigenstrata.settings.grid_spacing
    lo, hi = spec.support_band()
    fine = np.linspace(lo, hi, _FINE_POINTS)
    weight = np.asarray(leading_density(spec, fine), dtype=float)
    weight = np.maximum(weight, _GRID_FLOOR * weight.max())
    counts = integrate.cumulative_trapezoid(weight, fine, initial=0.0)
    n_points = max(int(math.ceil(counts[-1] / spacing)), 2) + 1
    grid = np.interp(np.linspace(0.0, counts[-1], n_points), counts, fine)
    return np.unique(grid)


# ------------ bulk closed forms ------------


def _bulk_coords(spec: EnsembleSpec, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = spec.edges
    if np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(f"bulk coordinates need x strictly inside ({lo:.4g}, {hi:.4g})")
    N = spec.N
    rho = np.asarray(leading_density(spec, x), dtype=float)
    xi = np.asarray(counting_xi(spec, x), dtype=float)
    if spec.kind is EnsembleKind.GUE:
        sigma2 = 3 / (2 * math.pi**2) * np.log(math.pi * math.sqrt(2) * rho / N ** (1 / 6))
        return xi, sigma2
    if spec.kind is EnsembleKind.GOE:
        tilt = 3 * x / (4 * math.pi * rho)
        nu = xi - np.arctan(tilt) / (2 * math.pi)
        sigma2 = np.asarray(
            variance_from_ratio(goe_bulk_amplitude(N, x), goe_bulk_smooth(N, x)), dtype=float
        )
        return nu, sigma2
    sigma2 = 3 / (2 * math.pi**2) * np.log(
        2 * math.pi * (2 * x) ** (2 / 3) * rho / (hi - lo) ** (1 / 3)
    )
    return xi, sigma2


# ------------ decomposition ------------


@dataclass
class Decomposition:
    """
    Grid tables of the exact split (rho, rho_s, B) with the scaled position nu
    and variance sigma^2, from which every component is evaluated.
    """

    spec: EnsembleSpec
    table: SplitTable
    nu: np.ndarray
    sigma2: np.ndarray
    x_left: float
    x_right: float
    branch: int = 0
    _splines: dict = field(default_factory=dict, init=False, repr=False)

    @classmethod
    def build(
        cls, spec: EnsembleSpec, x_grid: Optional[ArrayLike] = None
    ) -> "Decomposition":
        if spec.N < 2:
            raise DomainError("decomposition needs N >= 2")
        grid = decomposition_grid(spec) if x_grid is None else np.asarray(x_grid, dtype=float)
        rho = np.asarray(density(spec, grid), dtype=float)
        table = split_table(spec, grid, rho=rho)
        raw = table.raw_nu

        leading = np.asarray(leading_density(spec, grid), dtype=float)
        bulk = leading > 0.5 * leading.max()
        xi = np.asarray(counting_xi(spec, grid[bulk]), dtype=float)
        branch = int(np.round(np.mean(xi - raw[bulk])))
        nu = raw + branch

        sigma2 = np.asarray(variance_from_ratio(table.B, table.rho_s), dtype=float)
        x_left, x_right = inflection_points(spec)
        logger.debug(
            "%s decomposition on %d points: branch %+d, inflections %.4f, %.4f",
            spec, len(grid), branch, x_left, x_right,
        )
        return cls(
            spec=spec, table=table, nu=nu, sigma2=sigma2,
            x_left=x_left, x_right=x_right, branch=branch,
        )

    # ------------ grid tables ------------

    @property
    def x(self) -> np.ndarray:
        return self.table.x

    @cached_property
    def filled_sigma2(self) -> np.ndarray:
        """sigma^2 with undefined points interpolated (held flat past the ends)."""
        valid = np.isfinite(self.sigma2)
        if not np.any(valid):
            raise VarianceUndefined(f"sigma^2 is undefined everywhere for {self.spec}")
        return np.where(valid, self.sigma2, np.interp(self.x, self.x[valid], self.sigma2[valid]))

    def center_abscissa(self, k: int) -> float:
        """Where nu(x) crosses nu_k."""
        target = component_center(self.spec, k)
        idx = int(np.argmin(np.abs(self.nu - target)))
        return float(self.x[idx])

    @cached_property
    def components(self) -> list[EigenComponent]:
        N = self.spec.N
        result = []
        for k in range(1, N + 1):
            kind = ComponentKind.BULK_GAUSSIAN
            if k in (1, N):
                kind = ComponentKind.EDGE_EXACT_TAIL
            else:
                idx = int(np.argmin(np.abs(self.nu - component_center(self.spec, k))))
                centre = self.center_abscissa(k)
                if not np.isfinite(self.sigma2[idx]) or not self.x_left < centre < self.x_right:
                    logger.warning(
                        "component %d of %s has no defined variance at its centre; "
                        "treating it as an edge component", k, self.spec,
                    )
                    kind = ComponentKind.EDGE_EXACT_TAIL
            result.append(
                EigenComponent(k=k, nu_k=component_center(self.spec, k), kind=kind)
            )
        return result

    def _gaussian_table(self, k: int) -> np.ndarray:
        nu_k = component_center(self.spec, k)
        s2 = self.filled_sigma2
        values = self.table.rho_s / np.sqrt(2 * math.pi * s2) * np.exp(
            -((self.nu - nu_k) ** 2) / (2 * s2)
        )
        return np.where(self.table.rho_s > 0, values, 0.0)

    @cached_property
    def _gaussian_tables(self) -> np.ndarray:
        return np.array([self._gaussian_table(k) for k in range(1, self.spec.N + 1)])

    @cached_property
    def component_tables(self) -> np.ndarray:
        """
        Row k-1 holds component k on the grid. The extreme components take the
        exact tail past the outer inflections; an interior component relabelled
        as an edge component takes it inside its own unit cell |nu - nu_k| < 1/2.
        """
        tables = self._gaussian_tables.copy()
        rho = self.table.rho
        N = self.spec.N
        left = self.x < self.x_left
        right = self.x > self.x_right
        regions = [
            (c.k, ~(left | right) & (np.abs(self.nu - c.nu_k) < 0.5))
            for c in self.components[1:-1]
            if c.kind is ComponentKind.EDGE_EXACT_TAIL
        ]
        regions += [(1, left), (N, right)]
        for k, mask in regions:
            others = tables.sum(axis=0) - tables[k - 1]
            tables[k - 1] = np.where(mask, np.clip(rho - others, 0.0, None), tables[k - 1])
        return tables

    def component_table(self, k: int) -> np.ndarray:
        component_center(self.spec, k)
        return self.component_tables[k - 1]

    # ------------ evaluation ------------

    def _spline(self, k: int) -> CubicSpline:
        if k not in self._splines:
            self._splines[k] = CubicSpline(self.x, self.component_table(k))
        return self._splines[k]

    def _check(self, x: np.ndarray) -> None:
        if np.any(x < self.x[0]) or np.any(x > self.x[-1]):
            raise DomainError(
                f"x outside the decomposition grid [{self.x[0]:.4g}, {self.x[-1]:.4g}]"
            )

    def component(self, k: int, x: ArrayLike) -> ArrayLike:
        component_center(self.spec, k)
        arr, scalar = as_array(x)
        self._check(arr)
        return restore(np.clip(self._spline(k)(arr), 0.0, None), scalar)

    def coords(self, x: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
        """(nu, sigma^2) interpolated from the grid; sigma^2 is NaN where undefined."""
        arr, scalar = as_array(x)
        self._check(arr)
        nu = np.interp(arr, self.x, self.nu)
        sigma2 = np.interp(arr, self.x, self.sigma2)
        return restore(nu, scalar), restore(sigma2, scalar)

    def total(self) -> np.ndarray:
        return self.component_tables.sum(axis=0)

    def mass(self, k: int) -> float:
        return float(integrate.trapezoid(self.component_table(k), self.x))

    def moments(self, k: int) -> ComponentMoments:
        values = self.component_table(k)
        mass = float(integrate.trapezoid(values, self.x))
        weights = values / mass
        mean = float(integrate.trapezoid(weights * self.x, self.x))
        centred = self.x - mean
        variance = float(integrate.trapezoid(weights * centred**2, self.x))
        third = float(integrate.trapezoid(weights * centred**3, self.x))
        fourth = float(integrate.trapezoid(weights * centred**4, self.x))
        return ComponentMoments(
            mass=mass, mean=mean, variance=variance,
            skewness=third / variance**1.5,
            excess_kurtosis=fourth / variance**2 - 3.0,
        )

    def cdf(self, k: int, x: ArrayLike) -> ArrayLike:
        """Cumulative distribution of component k, normalised to unit mass."""
        values = self.component_table(k)
        cumulative = integrate.cumulative_trapezoid(values, self.x, initial=0.0)
        cumulative /= cumulative[-1]
        arr, scalar = as_array(x)
        return restore(np.interp(arr, self.x, cumulative, left=0.0, right=1.0), scalar)

    def peak(self, k: int) -> float:
        return float(self.x[int(np.argmax(self.component_table(k)))])


@lru_cache(maxsize=16)
def _cached_decomposition(spec: EnsembleSpec, spacing: float) -> Decomposition:
    return Decomposition.build(spec, decomposition_grid(spec, spacing))


def decompose(spec: EnsembleSpec) -> Decomposition:
    """The decomposition on the default grid, cached per spec and grid spacing."""
    return _cached_decomposition(spec, eigenstrata.settings.grid_spacing)


# ------------ operations ------------


def scaled_coords(spec: EnsembleSpec, x: float, mode: Mode = "exact") -> ScaledCoordinates:
    """
    The scaled position nu(x) and variance sigma^2(x).

    Raises:
        DomainError: x outside the support band (exact) or the open support (bulk).
        VarianceUndefined: B / (2 rho_s) >= 1, where no Gaussian model exists.
    """
    if mode == "bulk":
        nu, sigma2 = _bulk_coords(spec, np.atleast_1d(np.asarray(x, dtype=float)))
        nu, sigma2 = float(nu[0]), float(sigma2[0])
    elif mode == "exact":
        nu, sigma2 = decompose(spec).coords(float(x))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not math.isfinite(sigma2) or sigma2 <= 0:
        raise VarianceUndefined(f"sigma^2 undefined at x = {x} for {spec}")
    return ScaledCoordinates(nu=nu, sigma2=sigma2)


def bulk_component_density(spec: EnsembleSpec, k: int, x: ArrayLike) -> ArrayLike:
    """The Gaussian form with the closed-form bulk phases and variance."""
    nu_k = component_center(spec, k)
    arr, scalar = as_array(x)
    nu, sigma2 = _bulk_coords(spec, arr)
    if spec.kind is EnsembleKind.GOE:
        rho_s = np.asarray(goe_bulk_smooth(spec.N, arr), dtype=float)
    else:
        rho_s = np.asarray(leading_density(spec, arr), dtype=float)
    with np.errstate(invalid="ignore"):
        values = rho_s / np.sqrt(2 * math.pi * sigma2) * np.exp(-((nu - nu_k) ** 2) / (2 * sigma2))
    return restore(np.nan_to_num(values, nan=0.0), scalar)


def component_density(spec: EnsembleSpec, k: int, x: ArrayLike, mode: Mode = "exact") -> ArrayLike:
    """
    Density of the k-th smallest eigenvalue as a nearly-Gaussian component.

    Raises:
        RankOutOfRange: k outside [1, N].
    """
    component_center(spec, k)
    if mode == "bulk":
        return bulk_component_density(spec, k, x)
    return decompose(spec).component(k, x)


def _comb_remainder_bound(sigma: float, nu: float, N: int) -> float:
    # Gaussians centred outside [1, N]: the nearest term plus the integral tail
    bound = 0.0
    for distance in (nu + (N - 1) / 2 + 1, (N + 1) / 2 - nu):
        if distance <= 0:
            return math.inf
        nearest = math.exp(-(distance**2) / (2 * sigma**2)) / math.sqrt(2 * math.pi * sigma**2)
        bound += nearest + 0.5 * special.erfc(distance / (sigma * math.sqrt(2)))
    return bound


def poisson_sum_check(sigma: float, nu: float, N: int, m_max: int = 3) -> tuple[float, float]:
    """
    Compare the finite comb of N unit-spaced Gaussians of width sigma centred
    on nu_k = k - (N+1)/2 against its Poisson resummation truncated at m_max.
    When the analytic bound on the out-of-range terms exceeds 1e-6, those terms
    are summed directly into the left-hand side.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    centres = np.arange(1, N + 1) - (N + 1) / 2
    norm = 1 / math.sqrt(2 * math.pi * sigma**2)
    lhs = float(np.sum(norm * np.exp(-((nu - centres) ** 2) / (2 * sigma**2))))
    bound = _comb_remainder_bound(sigma, nu, N)
    if bound >= _REMAINDER_LIMIT:
        reach = int(math.ceil(abs(nu) + 40 * sigma)) + N
        outside = np.concatenate(
            [np.arange(1 - reach, 1), np.arange(N + 1, N + 1 + reach)]
        ) - (N + 1) / 2
        lhs += float(np.sum(norm * np.exp(-((nu - outside) ** 2) / (2 * sigma**2))))
    logger.debug("comb remainder bound %.2e at sigma=%.3f nu=%.3f", bound, sigma, nu)
    m = np.arange(1, m_max + 1)
    rhs = 1 + 2 * float(
        np.sum((-1.0) ** m * np.exp(-2 * (math.pi * m * sigma) ** 2) * np.cos(2 * math.pi * m * (nu + N / 2)))
    )
    return lhs, rhs


# ------------ inflection points ------------


def _curvature(spec: EnsembleSpec, step: float):
    def curvature(t: float) -> float:
        values = np.asarray(density(spec, np.array([t - step, t, t + step])), dtype=float)
        return float(values[0] - 2 * values[1] + values[2]) / step**2

    return curvature


@lru_cache(maxsize=32)
def inflection_points(spec: EnsembleSpec) -> tuple[float, float]:
    """
    Outermost sign changes of the exact density's curvature, bracketed on a
    grid and refined by bisection on a finite-difference second derivative.

    Raises:
        NotFound: no sign change (the N = 1 density).
    """
    if spec.N < 2:
        raise NotFound("the N = 1 density has no bulk wiggles")
    lo, hi = spec.support_band()
    x = np.linspace(lo, hi, 4001)
    rho = np.asarray(density(spec, x), dtype=float)
    second = np.gradient(np.gradient(rho, x), x)
    changes = np.nonzero(np.diff(np.sign(second)) != 0)[0]
    if len(changes) < 2:
        raise NotFound(f"no curvature sign change in the {spec} density")
    step = 1e-3 * (x[1] - x[0]) ** 0.5
    curvature = _curvature(spec, step)
    roots = []
    for i in (changes[0], changes[-1]):
        a, b = float(x[max(i - 1, 0)]), float(x[min(i + 2, len(x) - 1)])
        try:
            roots.append(brentq(curvature, a, b, xtol=1e-12))
        except ValueError:
            roots.append(0.5 * float(x[i] + x[i + 1]))
    if spec.is_gaussian:
        # even densities
        half = 0.5 * (roots[1] - roots[0])
        return -half, half
    return roots[0], roots[1]
