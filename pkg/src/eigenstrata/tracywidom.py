"""
Tracy-Widom laws of the largest eigenvalue.

The Hastings-McLeod solution q of q'' = s q + 2 q^3, q ~ Ai(s) as s -> inf, is
integrated backwards together with the tail integrals

    J(s)  = int_s^inf q^2,   I2(s) = int_s^inf (x - s) q^2,   mu(s) = int_s^inf q,

giving F2 = exp(-I2) for beta = 2 and F1 = exp(-(I2 + mu)/2) for beta = 1.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import Field
from scipy import integrate, special
from scipy.optimize import brentq

import eigenstrata
from eigenstrata.ensembles import EnsembleSpec
from eigenstrata.exceptions import BlowUp, DomainError, InsufficientGrid, OutOfGrid
from eigenstrata.gaussdecomp import decompose
from eigenstrata.utilities.general import ArrayLike, FrozenModel, as_array, restore
from eigenstrata.utilities.logging import get_logger

logger = get_logger(__name__)

Beta = Literal[1, 2]

_BLOW_UP = 1e6
_GRID_POINTS = 4001


class EdgeScaling(FrozenModel):
    """The linear map x = center + scale * s."""

    center: float
    scale: float = Field(gt=0)

    def to_s(self, x: ArrayLike) -> ArrayLike:
        arr, scalar = as_array(x)
        return restore((arr - self.center) / self.scale, scalar)

    def to_x(self, s: ArrayLike) -> ArrayLike:
        arr, scalar = as_array(s)
        return restore(self.center + self.scale * arr, scalar)


class Cumulants(FrozenModel):
    mean: float
    std_dev: float
    skewness: float
    excess_kurtosis: float


class TableRow(FrozenModel):
    label: str
    cumulants: Cumulants


@dataclass(frozen=True)
class PainleveSolution:
    s_grid: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    I2: np.ndarray
    J: np.ndarray
    mu: np.ndarray
    dense: integrate.OdeSolution
    tol: float

    @property
    def s_min(self) -> float:
        return float(self.s_grid[0])

    @property
    def s_max(self) -> float:
        return float(self.s_grid[-1])

    def state(self, s: ArrayLike) -> tuple[np.ndarray, bool]:
        """ODE state rows (q, q', I2, J, mu) at s, from the dense output."""
        arr, scalar = as_array(s)
        if np.any(arr < self.s_min) or np.any(arr > self.s_max):
            raise OutOfGrid(
                f"s outside the Painleve grid [{self.s_min:.3g}, {self.s_max:.3g}]"
            )
        return self.dense(arr), scalar


# ------------ Painleve II ------------


def airy_tails(s: float) -> tuple[float, float, float]:
    """(I2, J, mu) for q = Ai, which the solution matches at large s."""
    ai, aip, _, _ = special.airy(s)
    J = aip**2 - s * ai**2
    I2 = (2 * s**2 * ai**2 - 2 * s * aip**2 - ai * aip) / 3
    mu = 1 / 3 - special.itairy(s)[0]
    return I2, J, mu


def _rhs(s, y):
    q, qp, _, J, _ = y
    return [qp, s * q + 2 * q**3, -J, -(q**2), -q]


def _blow_up(s, y):
    return _BLOW_UP - abs(y[0])


_blow_up.terminal = True


def solve_painleve2(
    s_min: Optional[float] = None,
    s_max: Optional[float] = None,
    tol: Optional[float] = None,
) -> PainleveSolution:
    """
    Integrate the Hastings-McLeod solution from s_max down to s_min with the
    tail integrals carried as ODE components.

    Raises:
        DomainError: the window or tolerance is outside the supported range.
        BlowUp: |q| exceeded 1e6.
    """
    s_min = eigenstrata.settings.tw_s_min if s_min is None else s_min
    s_max = eigenstrata.settings.tw_s_max if s_max is None else s_max
    tol = eigenstrata.settings.tw_tol if tol is None else tol
    if s_max < 6 or s_min > -8 or tol < 1e-12:
        raise DomainError("Painleve II needs s_max >= 6, s_min <= -8 and tol >= 1e-12")

    ai, aip, _, _ = special.airy(s_max)
    I2, J, mu = airy_tails(s_max)
    grid = np.linspace(s_max, s_min, _GRID_POINTS)
    result = integrate.solve_ivp(
        _rhs, (s_max, s_min), [ai, aip, I2, J, mu],
        method="DOP853", t_eval=grid, dense_output=True,
        rtol=tol, atol=tol * 1e-8, events=_blow_up,
    )
    if result.status == 1 or not np.all(np.isfinite(result.y)):
        where = result.t_events[0][0] if len(result.t_events[0]) else result.t[-1]
        raise BlowUp(f"Painleve II solution left the Hastings-McLeod branch near s = {where:.3f}")
    if not result.success:
        raise BlowUp(result.message)
    logger.debug("Painleve II: %d right-hand side evaluations", result.nfev)

    order = np.argsort(result.t)
    y = result.y[:, order]
    return PainleveSolution(
        s_grid=result.t[order], q=y[0], q_prime=y[1], I2=y[2], J=y[3], mu=y[4],
        dense=result.sol, tol=tol,
    )


@lru_cache(maxsize=4)
def _cached_solution(s_min: float, s_max: float, tol: float) -> PainleveSolution:
    return solve_painleve2(s_min, s_max, tol)


def default_solution() -> PainleveSolution:
    s = eigenstrata.settings
    return _cached_solution(s.tw_s_min, s.tw_s_max, s.tw_tol)


# ------------ distributions ------------


def _check_beta(beta: int) -> None:
    if beta not in (1, 2):
        raise DomainError(f"beta must be 1 or 2, got {beta}")


def tw_cdf(sol: PainleveSolution, s: ArrayLike, beta: Beta = 2) -> ArrayLike:
    _check_beta(beta)
    state, scalar = sol.state(s)
    I2, mu = state[2], state[4]
    values = np.exp(-I2) if beta == 2 else np.exp(-0.5 * (I2 + mu))
    return restore(np.clip(values, 0.0, 1.0), scalar)


def tw_density(sol: PainleveSolution, s: ArrayLike, beta: Beta = 2) -> ArrayLike:
    """F2' = J F2 and F1' = F1 (J + q) / 2."""
    _check_beta(beta)
    state, scalar = sol.state(s)
    q, I2, J, mu = state[0], state[2], state[3], state[4]
    if beta == 2:
        values = J * np.exp(-I2)
    else:
        values = 0.5 * (J + q) * np.exp(-0.5 * (I2 + mu))
    return restore(values, scalar)


def tw_quantile(sol: PainleveSolution, p: float, beta: Beta = 2) -> float:
    if not 0 < p < 1:
        raise DomainError("quantiles need 0 < p < 1")
    lo, hi = sol.s_min, sol.s_max
    if not float(tw_cdf(sol, lo, beta)) < p < float(tw_cdf(sol, hi, beta)):
        raise OutOfGrid(f"quantile {p} lies outside the Painleve grid")
    return brentq(lambda t: float(tw_cdf(sol, t, beta)) - p, lo, hi, xtol=1e-12)


def cumulants_from_density(x: np.ndarray, values: np.ndarray) -> Cumulants:
    mass = integrate.simpson(values, x=x)
    weights = values / mass
    mean = integrate.simpson(weights * x, x=x)
    centred = x - mean
    variance = integrate.simpson(weights * centred**2, x=x)
    third = integrate.simpson(weights * centred**3, x=x)
    fourth = integrate.simpson(weights * centred**4, x=x)
    return Cumulants(
        mean=float(mean),
        std_dev=float(math.sqrt(variance)),
        skewness=float(third / variance**1.5),
        excess_kurtosis=float(fourth / variance**2 - 3),
    )


def tw_cumulants(sol: PainleveSolution, beta: Beta = 2) -> Cumulants:
    """
    Mean, standard deviation, skewness and excess kurtosis.

    Raises:
        InsufficientGrid: more than `tw_mass_tolerance` of the mass lies
            outside the solution grid.
    """
    _check_beta(beta)
    s = np.linspace(sol.s_min, sol.s_max, 8 * _GRID_POINTS + 1)
    cdf = np.asarray(tw_cdf(sol, s, beta))
    missing = cdf[0] + (1 - cdf[-1])
    if missing > eigenstrata.settings.tw_mass_tolerance:
        raise InsufficientGrid(f"{missing:.2e} of the mass lies outside the grid")
    return cumulants_from_density(s, np.asarray(tw_density(sol, s, beta)))


# ------------ edge scaling ------------


def edge_scaling(spec: EnsembleSpec, which: Literal["largest"] = "largest") -> EdgeScaling:
    """
    GUE/GOE: x = sqrt(2N) + s / (sqrt(2) N^(1/6)).
    Wishart: x = x_+ + s x_+^(2/3) (MN)^(-1/6).
    """
    if which != "largest":
        raise DomainError("only the largest eigenvalue has an edge scaling")
    return EdgeScaling(center=spec.edges[1], scale=spec.edge_scale)


def scaled_tw_density(spec: EnsembleSpec, x: ArrayLike, sol: Optional[PainleveSolution] = None) -> ArrayLike:
    """Tracy-Widom density of the largest eigenvalue in the spectrum variable."""
    sol = sol or default_solution()
    scaling = edge_scaling(spec)
    arr, scalar = as_array(x)
    s = np.clip(np.asarray(scaling.to_s(arr)), sol.s_min, sol.s_max)
    values = np.asarray(tw_density(sol, s, spec.beta)) / scaling.scale
    return restore(values, scalar)


def scaled_tw_cdf(spec: EnsembleSpec, x: ArrayLike, sol: Optional[PainleveSolution] = None) -> ArrayLike:
    sol = sol or default_solution()
    s = np.clip(np.asarray(edge_scaling(spec).to_s(x)), sol.s_min, sol.s_max)
    return tw_cdf(sol, s, spec.beta)


def edge_component_cumulants(spec: EnsembleSpec) -> Cumulants:
    """Cumulants of the largest nearly-Gaussian component in the edge variable s."""
    decomposition = decompose(spec)
    scaling = edge_scaling(spec)
    values = decomposition.component_table(spec.N) * scaling.scale
    return cumulants_from_density(np.asarray(scaling.to_s(decomposition.x)), values)


REFERENCE_TABLES: dict[int, list[TableRow]] = {
    1: [
        TableRow(label="Tracy-Widom", cumulants=Cumulants(
            mean=-1.77109, std_dev=0.9018, skewness=0.224, excess_kurtosis=0.093)),
        TableRow(label="nearly Gaussian", cumulants=Cumulants(
            mean=-1.829, std_dev=0.9066, skewness=0.114, excess_kurtosis=0.074)),
    ],
    2: [
        TableRow(label="Tracy-Widom", cumulants=Cumulants(
            mean=-1.20653, std_dev=1.2580, skewness=0.293, excess_kurtosis=0.165)),
        TableRow(label="nearly Gaussian", cumulants=Cumulants(
            mean=-1.382, std_dev=1.264, skewness=0.325, excess_kurtosis=0.067)),
    ],
}
