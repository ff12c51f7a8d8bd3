from typing import Any, Callable, Optional, Sized, TypeVar

import numpy as np

T = TypeVar("T")


def chain(*fns: Callable[[T], T]) -> Callable[[T], T]:
    """
    Chain multiple validator functions together.

    The returned function applies every validator in order and propagates the
    first exception raised.

    Args:
        *fns: Validator functions to apply in sequence.

    Returns:
        A function that applies all the validator functions in sequence.

    Example:
        >>> check = chain(is_positive(), between(max_value=1.0))
        >>> check(1e-9)  # Returns 1e-09
        >>> check(0.0)  # Raises ValueError: Value must be positive
    """

    def chained_validator(value: T) -> T:
        for fn in fns:
            value = fn(value)
        return value

    return chained_validator


def between(
    min_value: Optional[Any] = None,
    max_value: Optional[Any] = None,
) -> Callable[[Any], Any]:
    """
    Create a validator for values with an optional inclusive minimum and maximum.

    Args:
        min_value: The minimum allowed value. If None, no minimum is enforced.
        max_value: The maximum allowed value. If None, no maximum is enforced.

    Returns:
        A function that returns its argument unchanged or raises ValueError.

    Example:
        >>> rank = between(min_value=1, max_value=20)
        >>> rank(5)  # Returns 5
        >>> rank(21)  # Raises ValueError
    """

    def validate(value: Any) -> Any:
        if min_value is not None and value < min_value:
            raise ValueError(f"Value must be greater than or equal to {min_value}")
        if max_value is not None and value > max_value:
            raise ValueError(f"Value must be less than or equal to {max_value}")
        return value

    return validate


def is_positive() -> Callable[[Any], Any]:
    """Create a validator that rejects zero, negative and NaN values."""

    def validate(value: Any) -> Any:
        if not value > 0:
            raise ValueError("Value must be positive")
        return value

    return validate


def has_len(
    min_length: Optional[int] = None,
    max_length: Optional[int] = None,
) -> Callable[[Sized], Sized]:
    """
    Create a validator for sized objects (lists, arrays, tuples) with optional
    minimum and maximum lengths.

    Args:
        min_length: The minimum allowed length. If None, no minimum is enforced.
        max_length: The maximum allowed length. If None, no maximum is enforced.

    Returns:
        A function that validates a sized object.

    Raises:
        ValueError: If the length is outside the allowed range.
    """

    def validate(value: Sized) -> Sized:
        if min_length is not None and len(value) < min_length:
            raise ValueError(f"Length must be at least {min_length}")
        if max_length is not None and len(value) > max_length:
            raise ValueError(f"Length must be at most {max_length}")
        return value

    return validate


def is_increasing(strict: bool = True) -> Callable[[Any], np.ndarray]:
    """
    Create a validator for one-dimensional grids that must be ordered.

    Args:
        strict: If True, equal neighbours are rejected.

    Returns:
        A function that returns the grid as a float array.

    Example:
        >>> grid = is_increasing()
        >>> grid([0.0, 0.5, 1.0])  # Returns array([0. , 0.5, 1. ])
        >>> grid([0.0, 0.0])  # Raises ValueError
    """

    def validate(value: Any) -> np.ndarray:
        arr = np.asarray(value, dtype=float)
        if arr.ndim != 1:
            raise ValueError("Grid must be one-dimensional")
        steps = np.diff(arr)
        if (strict and np.any(steps <= 0)) or np.any(steps < 0):
            raise ValueError("Grid must be increasing")
        return arr

    return validate
