import math
from enum import Enum
from typing import Optional

from pydantic import Field, ValidationError, model_validator

from eigenstrata.exceptions import AlphaOutOfRange, InvalidSpec
from eigenstrata.utilities.general import FrozenModel


class EnsembleKind(str, Enum):
    GUE = "GUE"
    GOE = "GOE"
    WISHART = "WishartUnitary"

    @classmethod
    def parse(cls, value: str) -> "EnsembleKind":
        aliases = {"gue": cls.GUE, "goe": cls.GOE, "wishart": cls.WISHART}
        key = value.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(value)
        except ValueError:
            raise InvalidSpec(
                f"Unknown ensemble {value!r}; expected one of GUE, GOE, Wishart"
            ) from None


class EnsembleSpec(FrozenModel):
    """
    Which ensemble, its matrix size and (for Wishart) alpha = M - N.

    Gaussian ensembles use the weight exp(-beta x^2 / 2), so both have their
    spectrum edge at sqrt(2N). The unitary Wishart ensemble uses the weight
    x^alpha exp(-x), i.e. W = X^H X with unit-variance complex entries.
    """

    kind: EnsembleKind
    N: int = Field(ge=1, description="Matrix size (number of eigenvalues).")
    alpha: Optional[int] = Field(
        default=None, ge=0, description="Wishart parameter M - N."
    )

    @model_validator(mode="after")
    def _validate_alpha(self):
        if self.kind is EnsembleKind.WISHART and self.alpha is None:
            raise ValueError("Wishart ensembles need alpha = M - N")
        if self.kind is not EnsembleKind.WISHART and self.alpha is not None:
            raise ValueError("alpha only applies to Wishart ensembles")
        return self

    # ------------ constructors ------------

    @classmethod
    def create(
        cls, kind: "EnsembleKind | str", N: int, alpha: Optional[int] = None
    ) -> "EnsembleSpec":
        """Build a spec, turning validation failures into `InvalidSpec`."""
        if isinstance(kind, str) and not isinstance(kind, EnsembleKind):
            kind = EnsembleKind.parse(kind)
        if kind is not EnsembleKind.WISHART:
            alpha = None
        try:
            return cls(kind=kind, N=N, alpha=alpha)
        except ValidationError as exc:
            raise InvalidSpec(str(exc)) from exc

    @classmethod
    def gue(cls, N: int) -> "EnsembleSpec":
        return cls.create(EnsembleKind.GUE, N)

    @classmethod
    def goe(cls, N: int) -> "EnsembleSpec":
        return cls.create(EnsembleKind.GOE, N)

    @classmethod
    def wishart(cls, N: int, alpha: int) -> "EnsembleSpec":
        return cls.create(EnsembleKind.WISHART, N, alpha)

    # ------------ derived quantities ------------

    @property
    def beta(self) -> int:
        return 1 if self.kind is EnsembleKind.GOE else 2

    @property
    def is_gaussian(self) -> bool:
        return self.kind is not EnsembleKind.WISHART

    @property
    def M(self) -> int:
        if self.is_gaussian:
            raise InvalidSpec("M is only defined for Wishart ensembles")
        return self.N + self.alpha

    @property
    def edges(self) -> tuple[float, float]:
        """Edges of the leading-order density (semicircle or Marchenko-Pastur)."""
        if self.is_gaussian:
            r = math.sqrt(2 * self.N)
            return -r, r
        c = math.sqrt(self.M / self.N)
        return self.N * (c - 1) ** 2, self.N * (c + 1) ** 2

    @property
    def center(self) -> float:
        lo, hi = self.edges
        return 0.0 if self.is_gaussian else 0.5 * (lo + hi)

    @property
    def edge_scale(self) -> float:
        """Width of the largest-eigenvalue fluctuations at the upper edge."""
        if self.is_gaussian:
            return 2**-0.5 * self.N ** (-1 / 6)
        _, hi = self.edges
        return hi ** (2 / 3) * (self.M * self.N) ** (-1 / 6)

    def support_band(self, margin: float = 8.0) -> tuple[float, float]:
        """
        The interval where exact densities and their splits are tabulated: the
        leading-order support widened by `margin` edge scales (Wishart bands
        stay strictly positive).
        """
        lo, hi = self.edges
        pad = margin * self.edge_scale
        if self.is_gaussian:
            return -(hi + pad), hi + pad
        return max(lo - pad, 1e-3 * hi), hi + pad

    def require_phase_ready(self) -> "EnsembleSpec":
        """Wishart phase-amplitude work needs the integral second solution."""
        if self.kind is EnsembleKind.WISHART and self.alpha < 2:
            raise AlphaOutOfRange(
                f"Wishart phase-amplitude analysis needs alpha >= 2, got {self.alpha}"
            )
        return self

    def __str__(self) -> str:
        if self.is_gaussian:
            return f"{self.kind.value}(N={self.N})"
        return f"Wishart(N={self.N}, alpha={self.alpha})"
