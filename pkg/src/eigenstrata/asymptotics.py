"""
Semiclassical approximations: leading densities, counting functions, WKB
wave functions and the closed-form asymptotic densities with their leading
fluctuating corrections.
"""

import math
import warnings
from typing import Literal, Optional

import numpy as np
from pydantic import Field, model_validator
from scipy import integrate, signal
from scipy.optimize import brentq

import eigenstrata
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exactdensity import density
from eigenstrata.exceptions import DomainError, EdgeSingularity, TurningPointProximity
from eigenstrata.utilities.general import ArrayLike, FrozenModel, as_array, restore

WaveKind = Literal["oscillator", "laguerre"]

_CLAMP = 1e-14


def _clip_unit(value: np.ndarray) -> np.ndarray:
    return np.clip(value, -1.0 - _CLAMP, 1.0 + _CLAMP).clip(-1.0, 1.0)


class ClassicalRegion(FrozenModel):
    """
    The classically allowed interval of index n, where the squared momentum is
    positive. Oscillator: p = sqrt(2n + 1 - x^2). Laguerre (for sqrt(x) psi):
    p = sqrt((x - x_lo)(x_hi - x)) / (2x).
    """

    kind: WaveKind
    n: int = Field(ge=0)
    alpha: Optional[int] = Field(default=None, ge=0)
    x_lo: float
    x_hi: float

    @model_validator(mode="after")
    def _validate_interval(self):
        if self.x_lo >= self.x_hi:
            raise ValueError("x_lo must be below x_hi")
        return self

    @classmethod
    def oscillator(cls, n: int) -> "ClassicalRegion":
        edge = math.sqrt(2 * n + 1)
        return cls(kind="oscillator", n=n, x_lo=-edge, x_hi=edge)

    @classmethod
    def laguerre(cls, n: int, alpha: int) -> "ClassicalRegion":
        if alpha < 1:
            raise DomainError("Laguerre classical regions need alpha >= 1")
        centre = 2 * n + alpha + 1
        half_width = math.sqrt(centre**2 + 1 - alpha**2)
        return cls(
            kind="laguerre", n=n, alpha=alpha,
            x_lo=centre - half_width, x_hi=centre + half_width,
        )

    def momentum(self, x: ArrayLike) -> ArrayLike:
        arr, scalar = as_array(x)
        gap = np.clip((arr - self.x_lo) * (self.x_hi - arr), 0.0, None)
        if self.kind == "oscillator":
            values = np.sqrt(gap)
        else:
            values = np.sqrt(gap) / (2 * arr)
        return restore(values, scalar)

    def action(self, x: ArrayLike) -> ArrayLike:
        """xi_n(x): the action (1/pi) int p, from 0 (oscillator) or x_lo (Laguerre)."""
        if self.kind == "oscillator":
            return oscillator_action(self.n, x)
        return _laguerre_like_action(self.x_lo, self.x_hi, x)


# ------------ leading densities ------------


def semicircle(N: int, x: ArrayLike) -> ArrayLike:
    """Wigner's semicircle (1/pi) sqrt(2N - x^2), normalised to N."""
    arr, scalar = as_array(x)
    values = np.sqrt(np.clip(2 * N - arr**2, 0.0, None)) / math.pi
    return restore(values, scalar)


def mp_edges(N: int, alpha: int) -> tuple[float, float]:
    c = math.sqrt((N + alpha) / N)
    return N * (c - 1) ** 2, N * (c + 1) ** 2


def marchenko_pastur(N: int, alpha: int, x: ArrayLike) -> ArrayLike:
    """Marchenko-Pastur density sqrt((x+ - x)(x - x-)) / (2 pi x), normalised to N."""
    lo, hi = mp_edges(N, alpha)
    arr, scalar = as_array(x)
    gap = np.clip((hi - arr) * (arr - lo), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(arr > 0, np.sqrt(gap) / (2 * math.pi * arr), 0.0)
    return restore(values, scalar)


def leading_density(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    if spec.is_gaussian:
        return semicircle(spec.N, x)
    return marchenko_pastur(spec.N, spec.alpha, x)


# ------------ counting functions ------------


def oscillator_action(n: int, x: ArrayLike) -> ArrayLike:
    """(2n+1)/(2 pi) [arcsin(u) + u sqrt(1 - u^2)], u = x / sqrt(2n+1), saturated at +-(2n+1)/4."""
    arr, scalar = as_array(x)
    energy = 2 * n + 1
    u = _clip_unit(arr / math.sqrt(energy))
    values = energy / (2 * math.pi) * (np.arcsin(u) + u * np.sqrt(1 - u**2))
    return restore(values, scalar)


def _laguerre_like_action(lo: float, hi: float, x: ArrayLike) -> ArrayLike:
    arr, scalar = as_array(x)
    inside = np.clip(arr, lo, hi)
    gap = np.clip((hi - inside) * (inside - lo), 0.0, None)
    angle = np.arccos(_clip_unit((hi + lo - 2 * inside) / (hi - lo)))
    if lo > 0:
        with np.errstate(divide="ignore"):
            ratio = np.sqrt(hi * (inside - lo) / (lo * (hi - inside)))
        twist = -4 * math.sqrt(lo * hi) * np.arctan(ratio)
    else:
        twist = np.zeros_like(inside)
    values = (twist + (hi + lo) * angle + 2 * np.sqrt(gap)) / (4 * math.pi)
    return restore(values, scalar)


def counting_xi(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """
    The mean staircase xi(x): integral of the leading density, counted from the
    centre (Gaussian, saturating at +-N/2) or from the lower edge (Wishart,
    saturating at 0 and N).
    """
    if spec.is_gaussian:
        arr, scalar = as_array(x)
        u = _clip_unit(arr / math.sqrt(2 * spec.N))
        values = spec.N / math.pi * (np.arcsin(u) + u * np.sqrt(1 - u**2))
        return restore(values, scalar)
    lo, hi = spec.edges
    return _laguerre_like_action(lo, hi, x)


def inverse_xi(spec: EnsembleSpec, xi: float) -> float:
    """The abscissa where the counting function reaches `xi`."""
    lo, hi = spec.edges
    target_lo = -spec.N / 2 if spec.is_gaussian else 0.0
    if not target_lo <= xi <= target_lo + spec.N:
        raise DomainError(f"xi = {xi} outside the counting range")
    return brentq(lambda t: float(counting_xi(spec, t)) - xi, lo, hi, xtol=1e-13)


# ------------ WKB ------------


def wkb_wavefunction(region: ClassicalRegion, x: ArrayLike) -> ArrayLike:
    """
    WKB approximation of the basis function of the region's index.

    Oscillator: sqrt(2/pi) cos[(xi_n - n/2) pi] / (2n + 1 - x^2)^(1/4).
    Laguerre:   sqrt(2/pi) cos(pi xi_n - pi/4) / [(x_hi - x)(x - x_lo)]^(1/4).

    Raises:
        TurningPointProximity: x within one local wavelength of a turning point.
    """
    arr, scalar = as_array(x)
    momentum = np.asarray(region.momentum(arr), dtype=float)
    distance = np.minimum(arr - region.x_lo, region.x_hi - arr)
    with np.errstate(divide="ignore"):
        wavelength = np.where(momentum > 0, 2 * math.pi / momentum, np.inf)
    if np.any(distance < wavelength):
        raise TurningPointProximity(
            "WKB evaluation within one wavelength of a turning point"
        )
    gap = (arr - region.x_lo) * (region.x_hi - arr)
    action = np.asarray(region.action(arr), dtype=float)
    if region.kind == "oscillator":
        phase = (action - region.n / 2) * math.pi
    else:
        phase = math.pi * action - math.pi / 4
    values = math.sqrt(2 / math.pi) * np.cos(phase) / gap**0.25
    return restore(values, scalar)


def normalisation_constant(region: ClassicalRegion) -> float:
    """
    C = [1/2 int dx w(x) / p(x)]^(-1/2) over the classical region, with the
    oscillating part of the integrand dropped. The Laguerre weight w = 1/x
    normalises psi rather than sqrt(x) psi.
    """
    if region.kind == "oscillator":

        def smooth(t):
            return 1.0

    else:

        def smooth(t):
            return 2.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(
            smooth, region.x_lo, region.x_hi, weight="alg", wvar=(-0.5, -0.5)
        )
    return (0.5 * value) ** -0.5


def semiclassical_wronskian(region: ClassicalRegion) -> float:
    """W(Psi, Psi~) = C^2 for the WKB pair M cos(beta), M sin(beta)."""
    return normalisation_constant(region) ** 2


# ------------ asymptotic densities ------------


def goe_bulk_smooth(N: int, x: ArrayLike) -> ArrayLike:
    """rho_W - 1/(2 pi^2 rho_W): the smooth GOE density away from the edges."""
    arr, scalar = as_array(x)
    rho = np.asarray(semicircle(N, arr), dtype=float)
    with np.errstate(divide="ignore"):
        values = rho - 1 / (2 * math.pi**2 * rho)
    return restore(values, scalar)


def _goe_fluctuation_terms(N: int, x: np.ndarray, rho: np.ndarray):
    with np.errstate(divide="ignore", invalid="ignore"):
        cosine = math.sqrt(2 * N) / (2 * math.pi**5 * rho**4)
        tilt = 3 * x / (4 * math.pi * rho)
    return cosine, tilt


def goe_bulk_amplitude(N: int, x: ArrayLike) -> ArrayLike:
    """B(x) = sqrt(2N) / (2 pi^5 rho_W^4) sqrt(1 + 9 x^2 / (16 pi^2 rho_W^2))."""
    arr, scalar = as_array(x)
    rho = np.asarray(semicircle(N, arr), dtype=float)
    cosine, tilt = _goe_fluctuation_terms(N, arr, rho)
    return restore(cosine * np.sqrt(1 + tilt**2), scalar)


def _asymptotic_terms(spec: EnsembleSpec, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(leading, smooth correction + fluctuating correction, correction amplitude)."""
    N = spec.N
    leading = np.asarray(leading_density(spec, x), dtype=float)
    xi = np.asarray(counting_xi(spec, x), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.kind is EnsembleKind.GUE:
            size = math.sqrt(2 * N) / (2 * math.pi**3 * leading**2)
            correction = -size * np.cos((N - 2 * xi) * math.pi)
            amplitude = size
        elif spec.kind is EnsembleKind.GOE:
            smooth = -1 / (2 * math.pi**2 * leading)
            cosine, tilt = _goe_fluctuation_terms(N, x, leading)
            phase = (2 * xi + N) * math.pi
            correction = smooth - cosine * (np.cos(phase) + tilt * np.sin(phase))
            amplitude = np.abs(smooth) + cosine * np.sqrt(1 + tilt**2)
        else:
            lo, hi = spec.edges
            size = (hi - lo) / (16 * math.pi**3 * x**2 * leading**2)
            correction = -size * np.cos(2 * math.pi * xi)
            amplitude = size
    return leading, correction, amplitude


def asymptotic_density(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """
    Leading density plus its first fluctuating correction.

    Raises:
        EdgeSingularity: the correction amplitude exceeds the configured
            fraction of the leading density (or x lies outside the support).
    """
    arr, scalar = as_array(x)
    leading, correction, amplitude = _asymptotic_terms(spec, arr)
    limit = eigenstrata.settings.edge_correction_ratio
    if np.any(~(leading > 0)) or np.any(~(amplitude < limit * leading)):
        raise EdgeSingularity(
            f"asymptotic correction exceeds {limit:.0%} of the leading density"
        )
    return restore(leading + correction, scalar)


def unfolded_density(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """Exact density over the leading density, the density in the variable xi."""
    arr, scalar = as_array(x)
    leading, _, amplitude = _asymptotic_terms(spec, arr)
    limit = eigenstrata.settings.edge_correction_ratio
    if np.any(~(leading > 0)) or np.any(~(amplitude < limit * leading)):
        raise EdgeSingularity("unfolding is refused where the asymptotic form fails")
    return restore(np.asarray(density(spec, arr), dtype=float) / leading, scalar)


def unfolded_asymptotic(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """Asymptotic density over the leading density."""
    arr, scalar = as_array(x)
    values = np.asarray(asymptotic_density(spec, arr), dtype=float)
    return restore(values / np.asarray(leading_density(spec, arr)), scalar)


def asymptotic_mask(spec: EnsembleSpec, x: ArrayLike) -> np.ndarray:
    """Where the asymptotic form is accepted (see `asymptotic_density`)."""
    arr, _ = as_array(x)
    leading, _, amplitude = _asymptotic_terms(spec, arr)
    limit = eigenstrata.settings.edge_correction_ratio
    with np.errstate(invalid="ignore"):
        return (leading > 0) & (amplitude < limit * leading)


def unfolded_peak_spacings(spec: EnsembleSpec, fraction: float = 0.8, points: int = 8001) -> np.ndarray:
    """
    Spacings, in the unfolded variable xi, between successive maxima of the
    exact density over the leading density, across the central `fraction` of
    the counting range.
    """
    N = spec.N
    start = -N / 2 if spec.is_gaussian else 0.0
    lo = inverse_xi(spec, start + 0.5 * (1 - fraction) * N)
    hi = inverse_xi(spec, start + 0.5 * (1 + fraction) * N)
    x = np.linspace(lo, hi, points)
    ratio = np.asarray(density(spec, x), dtype=float) / np.asarray(leading_density(spec, x))
    peaks, _ = signal.find_peaks(ratio)
    xi = np.asarray(counting_xi(spec, x[peaks]), dtype=float)
    return np.diff(xi)
