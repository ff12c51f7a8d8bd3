import numpy as np
import pytest

from eigenstrata.utilities.validators import (
    between,
    chain,
    has_len,
    is_increasing,
    is_positive,
)


def test_chain():
    def add_one(x):
        return x + 1

    def multiply_by_two(x):
        return x * 2

    chained = chain(add_one, multiply_by_two)
    assert chained(3) == 8  # (3 + 1) * 2


def test_between():
    validator = between(min_value=0, max_value=10)
    assert validator(5) == 5
    with pytest.raises(ValueError):
        validator(-1)
    with pytest.raises(ValueError):
        validator(11)


def test_is_positive():
    validator = is_positive()
    assert validator(1e-12) == 1e-12
    with pytest.raises(ValueError):
        validator(0.0)
    with pytest.raises(ValueError):
        validator(float("nan"))


def test_has_len():
    validator = has_len(min_length=2, max_length=5)
    assert validator([1, 2]) == [1, 2]
    with pytest.raises(ValueError):
        validator([1])
    with pytest.raises(ValueError):
        validator([1, 2, 3, 4, 5, 6])


class TestIsIncreasing:
    def test_strict(self):
        grid = is_increasing()([0, 0.5, 1])
        np.testing.assert_array_equal(grid, [0.0, 0.5, 1.0])
        with pytest.raises(ValueError):
            is_increasing()([0.0, 0.0, 1.0])

    def test_non_strict_allows_repeats(self):
        grid = is_increasing(strict=False)([0.0, 0.0, 1.0])
        assert len(grid) == 3
        with pytest.raises(ValueError):
            is_increasing(strict=False)([1.0, 0.0])

    def test_rejects_two_dimensional_input(self):
        with pytest.raises(ValueError):
            is_increasing()([[0.0, 1.0]])
