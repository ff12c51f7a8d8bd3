import numpy as np
import pytest
from pydantic import ValidationError

import eigenstrata.utilities.general as general


class TestArrays:
    def test_scalar_round_trip(self):
        arr, scalar = general.as_array(1.5)
        assert scalar is True
        assert arr.shape == (1,)
        value = general.restore(arr * 2, scalar)
        assert isinstance(value, float)
        assert value == 3.0

    def test_array_passes_through(self):
        arr, scalar = general.as_array([0, 1, 2])
        assert scalar is False
        assert arr.dtype == float
        np.testing.assert_array_equal(general.restore(arr, scalar), [0.0, 1.0, 2.0])


class TestModels:
    def test_frozen_model_is_hashable_and_immutable(self):
        class Point(general.FrozenModel):
            x: float

        p = Point(x=1.0)
        assert hash(p) == hash(Point(x=1.0))
        with pytest.raises(ValidationError):
            p.x = 2.0

    def test_models_forbid_extra_fields(self):
        class Point(general.EigenstrataModel):
            x: float

        with pytest.raises(ValidationError):
            Point(x=1.0, y=2.0)
