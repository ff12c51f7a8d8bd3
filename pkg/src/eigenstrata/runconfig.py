"""
Run configuration for the command-line front end.

A run can be described by a flat key=value file (dotenv syntax); every key can
be overridden by the command-line flag of the same name, and flags win.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Union

import numpy as np
from dotenv import dotenv_values
from pydantic import Field, ValidationError, model_validator

import eigenstrata
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exceptions import ConfigError, InvalidSpec
from eigenstrata.utilities.general import EigenstrataModel, FrozenModel

FLAT_KEYS = (
    "ensemble", "n", "alpha", "lo", "hi", "points",
    "samples", "seed", "out", "svg", "parent",
)
_RENAMED = {"samples": "samples", "seed": "seed", "out": "outputs", "parent": "parent"}


class OutputFormat(str, Enum):
    CSV = "csv"
    CSV_SVG = "csv+svg"


class GridSpec(FrozenModel):
    lo: float
    hi: float
    points: int = Field(ge=2)

    @model_validator(mode="after")
    def _validate_order(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


class RunConfig(EigenstrataModel):
    ensemble: EnsembleSpec = Field(
        default_factory=lambda: EnsembleSpec.gue(eigenstrata.settings.default_n)
    )
    wishart_alpha: int = Field(
        default_factory=lambda: eigenstrata.settings.default_alpha, ge=0,
        description="alpha used when a figure needs a Wishart ensemble.",
    )
    grid: Optional[GridSpec] = None
    samples: int = Field(default_factory=lambda: eigenstrata.settings.samples, ge=0)
    seed: int = Field(default_factory=lambda: eigenstrata.settings.seed)
    outputs: Path = Field(default_factory=lambda: eigenstrata.settings.output_dir)
    format: OutputFormat = OutputFormat.CSV
    parent: Literal["exact", "semicircle"] = Field(
        default="exact",
        description="Parent density of the uncorrelated rank overlays.",
    )

    @property
    def N(self) -> int:
        return self.ensemble.N

    @property
    def alpha(self) -> int:
        if self.ensemble.alpha is not None:
            return self.ensemble.alpha
        return self.wishart_alpha

    def spec_for(self, kind: EnsembleKind, N: Optional[int] = None) -> EnsembleSpec:
        """This run's size (and alpha) applied to another ensemble."""
        N = self.N if N is None else N
        alpha = self.alpha if kind is EnsembleKind.WISHART else None
        return EnsembleSpec.create(kind, N, alpha)

    def grid_or(self, lo: float, hi: float, points: int) -> np.ndarray:
        if self.grid is not None:
            return self.grid.values()
        return np.linspace(lo, hi, points)

    @property
    def svg(self) -> bool:
        return self.format is OutputFormat.CSV_SVG

    # ------------ loading ------------

    @classmethod
    def from_flat(cls, values: Mapping[str, Any]) -> "RunConfig":
        """
        Build a config from flat keys (see FLAT_KEYS); None values are ignored.

        Raises:
            ConfigError: unknown keys or invalid values.
        """
        values = {k.lower(): v for k, v in values.items() if v is not None}
        unknown = sorted(set(values) - set(FLAT_KEYS))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

        data: dict[str, Any] = {}
        try:
            kind = EnsembleKind.parse(str(values.get("ensemble", "GUE")))
            n = int(values.get("n", eigenstrata.settings.default_n))
            alpha = values.get("alpha")
            if kind is EnsembleKind.WISHART:
                alpha = int(alpha if alpha is not None else eigenstrata.settings.default_alpha)
            data["ensemble"] = EnsembleSpec.create(kind, n, alpha)
            if alpha is not None:
                data["wishart_alpha"] = int(alpha)
            if any(key in values for key in ("lo", "hi", "points")):
                data["grid"] = GridSpec(
                    lo=float(values["lo"]), hi=float(values["hi"]),
                    points=int(values.get("points", 401)),
                )
            for key, name in _RENAMED.items():
                if key in values:
                    data[name] = values[key]
            if "svg" in values:
                data["format"] = OutputFormat.CSV_SVG if _truthy(values["svg"]) else OutputFormat.CSV
            return cls(**data)
        except ConfigError:
            raise
        except KeyError as exc:
            raise ConfigError(f"grid needs lo and hi, missing {exc.args[0]}") from exc
        except (ValidationError, InvalidSpec, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(
        cls, path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None
    ) -> "RunConfig":
        """Read a key=value file (if given) and apply flag overrides on top."""
        values: dict[str, Any] = {}
        if path is not None:
            path = Path(path)
            if not path.exists():
                raise ConfigError(f"configuration file {path} does not exist")
            values.update({k: v for k, v in dotenv_values(path).items() if v is not None})
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_flat(values)


def _truthy(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in {"1", "true", "yes", "on"}
