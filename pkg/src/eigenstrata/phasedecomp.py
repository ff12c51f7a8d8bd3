"""
Phase-amplitude representation of the basis functions and the exact split of
the density into a smooth part and a fluctuating part.

With (P, Q) = (A_N'/A_N - A_{N-1}'/A_{N-1}, theta_N' - theta_{N-1}'),
S = theta_N + theta_{N-1} and D = theta_N - theta_{N-1}:

    GUE      rho_s = sqrt(N/8) A_N A_{N-1} [P cos D - (theta_N' + theta_{N-1}') sin D]
             rho_f = B cos(S + theta),  B = sqrt(N/8) A_N A_{N-1} sqrt(P^2 + Q^2)
    GOE      as GUE with P -> P + Q1/A_N, Q -> Q - Q2/A_N and rho_s -> rho_s + gamma_s
    Wishart  rho_s = sqrt(N(N+alpha)/4) A_N A_{N-1} [-P cos D + (theta_N' + theta_{N-1}') sin D]
             rho_f = -B cos(S - theta)

theta is the atan2 quadrant angle, so B >= 0 everywhere.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

import eigenstrata
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exactdensity import density, goe_odd_offset
from eigenstrata.exceptions import DomainError, GridTooCoarse, SplitMismatch
from eigenstrata.specfn import WaveTable, laguerre_second_table, oscillator_second_table
from eigenstrata.utilities.general import ArrayLike, FrozenModel, as_array
from eigenstrata.utilities.logging import get_logger
from eigenstrata.utilities.validators import is_increasing

logger = get_logger(__name__)

_MAX_STEP = math.pi / 2
_TINY = 1e-300


class PhaseAmplitude(FrozenModel):
    x: float
    A: float
    theta: float
    A_prime: float
    theta_prime: float


class DensitySplit(FrozenModel):
    x: float
    rho_s: float
    rho_f: float
    B: float
    theta_shift: float


class GoeAuxiliary(FrozenModel):
    x: float
    Q1: float
    Q2: float
    I: float
    I_tilde: float


@dataclass(frozen=True)
class PhaseTable:
    x: np.ndarray
    A: np.ndarray
    theta: np.ndarray
    A_prime: np.ndarray
    theta_prime: np.ndarray
    waves: WaveTable

    def points(self) -> list[PhaseAmplitude]:
        return [
            PhaseAmplitude(x=x, A=a, theta=t, A_prime=ap, theta_prime=tp)
            for x, a, t, ap, tp in zip(
                self.x.tolist(), self.A.tolist(), self.theta.tolist(),
                self.A_prime.tolist(), self.theta_prime.tolist(),
            )
        ]


@dataclass(frozen=True)
class SplitTable:
    """Grid tabulation of the exact split and the phases it was built from."""

    spec: EnsembleSpec
    x: np.ndarray
    rho: np.ndarray
    rho_s: np.ndarray
    rho_f: np.ndarray
    B: np.ndarray
    theta_shift: np.ndarray
    phase_sum: np.ndarray

    @property
    def raw_nu(self) -> np.ndarray:
        """The scaled position before its integer branch is fixed."""
        if self.spec.is_gaussian:
            return (self.phase_sum + self.theta_shift - math.pi) / (2 * math.pi) - self.spec.N / 2
        return (self.phase_sum - self.theta_shift) / (2 * math.pi)

    def splits(self) -> list[DensitySplit]:
        return [
            DensitySplit(x=x, rho_s=s, rho_f=f, B=b, theta_shift=t)
            for x, s, f, b, t in zip(
                self.x.tolist(), self.rho_s.tolist(), self.rho_f.tolist(),
                self.B.tolist(), self.theta_shift.tolist(),
            )
        ]


# ------------ phases ------------


def unwrap_phase(raw: np.ndarray, slope: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Continue atan2 phases along the grid, choosing each 2 pi branch closest to
    the increment predicted from the exact phase derivative.

    Raises:
        GridTooCoarse: a predicted or realised step reaches pi/2.
    """
    if len(raw) < 2:
        return raw.copy()
    predicted = 0.5 * (slope[1:] + slope[:-1]) * np.diff(x)
    steps = np.diff(raw)
    steps = steps + 2 * math.pi * np.round((predicted - steps) / (2 * math.pi))
    worst = float(np.max(np.abs(steps))) if len(steps) else 0.0
    if worst >= _MAX_STEP or np.any(predicted >= _MAX_STEP):
        raise GridTooCoarse(f"phase step {worst:.3f} rad reaches pi/2; refine the grid")
    return raw[0] + np.concatenate([[0.0], np.cumsum(steps)])


def _wave_table(spec: EnsembleSpec, n: int, x: np.ndarray, with_integrals: bool = False) -> WaveTable:
    if spec.is_gaussian:
        return oscillator_second_table(n, x, with_integrals=with_integrals)
    spec.require_phase_ready()
    return laguerre_second_table(n, spec.alpha, x)


def phase_table_from_waves(waves: WaveTable) -> PhaseTable:
    A2 = waves.value**2 + waves.tilde_value**2
    A = np.sqrt(A2)
    theta_prime = waves.exact_wronskian / A2
    A_prime = (waves.value * waves.derivative + waves.tilde_value * waves.tilde_derivative) / A
    raw = np.arctan2(waves.tilde_value, waves.value)
    theta = unwrap_phase(raw, theta_prime, waves.x)
    return PhaseTable(
        x=waves.x, A=A, theta=theta, A_prime=A_prime,
        theta_prime=theta_prime, waves=waves,
    )


def phase_table(spec: EnsembleSpec, n: int, x_grid: ArrayLike) -> PhaseTable:
    x = is_increasing()(x_grid)
    return phase_table_from_waves(_wave_table(spec, n, x))


def phase_amplitude(spec: EnsembleSpec, n: int, x_grid: ArrayLike) -> list[PhaseAmplitude]:
    """
    Modulus A_n = sqrt(f^2 + f~^2) and unwrapped phase theta_n = atan2(f~, f) of
    the ensemble's basis function of index n, with A' and theta' from the exact
    relations A A' = f f' + f~ f~' and theta' = W / A^2.
    """
    return phase_table(spec, n, x_grid).points()


# ------------ GOE integral envelopes ------------


def _q_functions(N: int, upper: PhaseTable) -> tuple[np.ndarray, ...]:
    waves = upper.waves
    integral = waves.integral + goe_odd_offset(N)
    cos_n, sin_n = np.cos(upper.theta), np.sin(upper.theta)
    q1 = integral * cos_n + waves.tilde_integral * sin_n
    q2 = integral * sin_n - waves.tilde_integral * cos_n
    return q1, q2, integral, waves.tilde_integral


def goe_q_table(N: int, x_grid: ArrayLike) -> list[GoeAuxiliary]:
    """
    Smooth envelopes of I_N = int_0^x phi_N: Q1 = I cos(theta_N) + I~ sin(theta_N),
    Q2 = I sin(theta_N) - I~ cos(theta_N), with I~' = phi~_N and
    I~(0) = -phi~_N'(0) / (2N + 1).
    """
    if N < 2:
        raise DomainError("Q functions need N >= 2")
    x = is_increasing()(x_grid)
    upper = phase_table_from_waves(oscillator_second_table(N, x, with_integrals=True))
    q1, q2, integral, tilde = _q_functions(N, upper)
    return [
        GoeAuxiliary(x=a, Q1=b, Q2=c, I=d, I_tilde=e)
        for a, b, c, d, e in zip(
            x.tolist(), q1.tolist(), q2.tolist(), integral.tolist(), tilde.tolist()
        )
    ]


def goe_q_functions(N: int, x: float) -> GoeAuxiliary:
    return goe_q_table(N, [x])[0]


# ------------ density split ------------


def _check_band(spec: EnsembleSpec, x: np.ndarray) -> None:
    lo, hi = spec.support_band()
    if np.any(x < lo) or np.any(x > hi):
        raise DomainError(f"x outside the {spec} support band [{lo:.4g}, {hi:.4g}]")


def split_table(
    spec: EnsembleSpec, x_grid: ArrayLike, rho: Optional[np.ndarray] = None
) -> SplitTable:
    """
    The exact smooth/fluctuating split tabulated on an increasing grid.

    Raises:
        SplitMismatch: rho_s + rho_f misses rho by more than `settings.split_tolerance`.
    """
    x = is_increasing()(x_grid)
    _check_band(spec, x)
    N = spec.N
    if N < 2:
        raise DomainError("the smooth/fluctuating split needs N >= 2")

    goe = spec.kind is EnsembleKind.GOE
    upper = phase_table_from_waves(_wave_table(spec, N, x, with_integrals=goe))
    lower = phase_table_from_waves(_wave_table(spec, N - 1, x))

    P = upper.A_prime / upper.A - lower.A_prime / lower.A
    Q = upper.theta_prime - lower.theta_prime
    slope_sum = upper.theta_prime + lower.theta_prime
    S = upper.theta + lower.theta
    D = upper.theta - lower.theta
    product = upper.A * lower.A

    if spec.is_gaussian:
        prefactor = math.sqrt(N / 8) * product
        rho_s = prefactor * (P * np.cos(D) - slope_sum * np.sin(D))
        if goe:
            q1, q2, _, _ = _q_functions(N, upper)
            rho_s = rho_s + math.sqrt(N / 8) * lower.A * (q1 * np.cos(D) + q2 * np.sin(D))
            P = P + q1 / upper.A
            Q = Q - q2 / upper.A
        B = prefactor * np.hypot(P, Q)
        shift = np.arctan2(Q, P)
        rho_f = B * np.cos(S + shift)
    else:
        prefactor = math.sqrt(N * (N + spec.alpha) / 4) * product
        rho_s = prefactor * (-P * np.cos(D) + slope_sum * np.sin(D))
        B = prefactor * np.hypot(P, Q)
        shift = -np.arctan2(Q, P)
        rho_f = -B * np.cos(S - shift)

    if rho is None:
        rho = np.asarray(density(spec, x), dtype=float)
    # relative to the terms: outside the spectrum rho_s and rho_f nearly cancel
    scale = np.abs(rho_s) + np.abs(rho_f) + np.abs(rho) + _TINY
    residual = float(np.max(np.abs(rho_s + rho_f - rho) / scale))
    logger.debug("%s split residual %.2e on %d points", spec, residual, len(x))
    if not residual <= eigenstrata.settings.split_tolerance:
        raise SplitMismatch(
            f"rho_s + rho_f misses the {spec} density by {residual:.2e} "
            f"(relative), above {eigenstrata.settings.split_tolerance:.1e}"
        )
    return SplitTable(
        spec=spec, x=x, rho=rho, rho_s=rho_s, rho_f=rho_f,
        B=B, theta_shift=shift, phase_sum=S,
    )


def split_density(spec: EnsembleSpec, x: float) -> DensitySplit:
    """
    The exact split rho = rho_s + rho_f at a single abscissa.

    Raises:
        DomainError: x outside the ensemble's support band.
    """
    arr, _ = as_array(x)
    return split_table(spec, arr[:1]).splits()[0]
