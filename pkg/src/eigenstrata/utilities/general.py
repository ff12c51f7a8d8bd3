from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict

ArrayLike = Union[float, np.ndarray, list[float]]


def as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    """
    Convert a scalar or sequence to a float array.

    Returns:
        The array (at least one-dimensional) and a flag telling whether the
        input was a scalar, so callers can hand back the same shape.
    """
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def restore(values: np.ndarray, scalar: bool) -> Union[float, np.ndarray]:
    return float(values[0]) if scalar else values


class EigenstrataModel(BaseModel):
    model_config = ConfigDict(
        validate_assignment=True,
        extra="forbid",
    )


class FrozenModel(BaseModel):
    """Immutable value object; hashable so it can key caches."""

    model_config = ConfigDict(frozen=True, extra="forbid")
