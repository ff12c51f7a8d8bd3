import copy
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Literal, Union

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from eigenstrata.utilities.validators import between, chain, is_positive

EIGENSTRATA_ENV_FILE = os.path.expanduser(
    os.path.expandvars(os.getenv("EIGENSTRATA_ENV_FILE", "~/.eigenstrata/.env"))
)


class EigenstrataSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="EIGENSTRATA_",
        env_file=(
            "" if os.getenv("EIGENSTRATA_TEST_MODE") else (".env", EIGENSTRATA_ENV_FILE)
        ),
        extra="ignore",
        arbitrary_types_allowed=True,
        validate_assignment=True,
    )


class Settings(EigenstrataSettings):
    # ------------ display and logging settings ------------

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="The log level for eigenstrata.",
    )

    output_dir: Path = Field(
        default=Path("."),
        description="Directory where figure and table artifacts are written.",
    )

    # ------------ ensemble defaults ------------

    default_n: int = Field(
        default=20,
        description="Default matrix size used by figures, tables and the verify suite.",
    )
    default_alpha: int = Field(
        default=4,
        description="Default Wishart parameter alpha = M - N.",
    )

    # ------------ Monte Carlo settings ------------

    samples: int = Field(
        default=100_000,
        description="Default number of Monte Carlo matrices drawn per batch.",
    )
    seed: int = Field(default=7, description="Default Monte Carlo seed.")
    chunk_size: int = Field(
        default=4096,
        description="Matrices drawn per counter-keyed chunk. Changing it changes "
        "the sampled stream, so it is part of the reproducibility key.",
    )
    workers: int = Field(
        default=1,
        description="Threads used to sample chunks. Results do not depend on it.",
    )

    # ------------ ODE and quadrature settings ------------

    ode_rtol: float = Field(
        default=1e-11, description="Relative tolerance for second-solution ODEs."
    )
    ode_atol: float = Field(
        default=1e-13, description="Absolute tolerance for second-solution ODEs."
    )
    quad_epsabs: float = Field(
        default=1e-12, description="Absolute tolerance for adaptive quadrature."
    )
    quad_limit: int = Field(
        default=400, description="Subinterval limit for adaptive quadrature."
    )
    wronskian_tolerance_oscillator: float = Field(
        default=1e-8,
        description="Allowed Wronskian deviation for oscillator second solutions.",
    )
    wronskian_tolerance_laguerre: float = Field(
        default=1e-6,
        description="Allowed relative Wronskian deviation for Laguerre second solutions.",
    )
    split_tolerance: float = Field(
        default=1e-4,
        description="Largest allowed residual of rho_s + rho_f - rho, relative to "
        "the magnitude of the three terms.",
    )
    grid_spacing: float = Field(
        default=0.01,
        description="Default abscissa spacing for phase and decomposition grids, "
        "in units of the local spectrum scale.",
    )

    # ------------ asymptotic settings ------------

    edge_correction_ratio: float = Field(
        default=0.5,
        description="Largest allowed ratio of the fluctuating correction to the "
        "leading density before an asymptotic form is refused.",
    )

    # ------------ Tracy-Widom settings ------------

    tw_s_min: float = Field(
        default=-8.0, description="Lower end of the Painleve II integration window."
    )
    tw_s_max: float = Field(
        default=8.0, description="Start of the backward Painleve II integration."
    )
    tw_tol: float = Field(
        default=1e-12, description="Local error tolerance for the Painleve II solve."
    )
    tw_mass_tolerance: float = Field(
        default=1e-7,
        description="Largest probability mass allowed outside the Painleve grid "
        "when computing cumulants.",
    )

    @field_validator("default_n", "samples", "chunk_size", "workers", "quad_limit")
    @classmethod
    def _validate_counts(cls, v: int) -> int:
        return between(min_value=1)(v)

    @field_validator("default_alpha")
    @classmethod
    def _validate_alpha(cls, v: int) -> int:
        return between(min_value=0)(v)

    @field_validator(
        "ode_rtol",
        "ode_atol",
        "quad_epsabs",
        "wronskian_tolerance_oscillator",
        "wronskian_tolerance_laguerre",
        "split_tolerance",
        "grid_spacing",
        "tw_tol",
        "tw_mass_tolerance",
    )
    @classmethod
    def _validate_tolerances(cls, v: float) -> float:
        return chain(is_positive(), between(max_value=1.0))(v)

    @field_validator("edge_correction_ratio")
    @classmethod
    def _validate_ratio(cls, v: float) -> float:
        return chain(is_positive(), between(max_value=1.0))(v)

    @field_validator("output_dir", mode="before")
    @classmethod
    def _validate_output_dir(cls, v: Union[str, Path]) -> Path:
        return Path(v).expanduser()

    @model_validator(mode="after")
    def _validate_tw_window(self):
        if self.tw_s_min >= self.tw_s_max:
            raise ValueError("tw_s_min must be below tw_s_max")
        return self

    @model_validator(mode="after")
    def set_log_level(self):
        from eigenstrata.utilities.logging import setup_logging

        setup_logging(level=self.log_level)
        return self


settings = Settings()


@contextmanager
def temporary_settings(**kwargs: Any):
    """
    Temporarily override eigenstrata setting values.

    Args:
        **kwargs: The settings to override.

    Example:
        Temporarily shrink the Monte Carlo batch:
        ```python
        import eigenstrata
        from eigenstrata.settings import temporary_settings

        with temporary_settings(samples=1000):
            assert eigenstrata.settings.samples == 1000
        ```
    """
    old_settings = copy.deepcopy(settings.model_dump())

    try:
        for attr, value in kwargs.items():
            if not hasattr(settings, attr):
                raise AttributeError(f"Setting {attr} does not exist.")
            setattr(settings, attr, value)
        yield

    finally:
        for attr in kwargs:
            if hasattr(settings, attr):
                setattr(settings, attr, old_settings[attr])
