import numpy as np
import pytest

from eigenstrata.utilities.io import atomic_path, format_csv, read_csv, write_csv


class TestCsv:
    def test_format(self):
        text = format_csv({"x": np.array([0.0, 1.5]), "y": np.array([-2.0, 1e-20])})
        assert text == (
            "x,y\n"
            "0.000000000000e+00,-2.000000000000e+00\n"
            "1.500000000000e+00,1.000000000000e-20\n"
        )

    def test_write_then_read(self, tmp_path):
        columns = {"x": np.linspace(0, 1, 5), "density": np.arange(5.0)}
        path = write_csv(tmp_path / "out" / "fig1.csv", columns)
        assert path.exists()
        loaded = read_csv(path)
        assert list(loaded) == ["x", "density"]
        np.testing.assert_allclose(loaded["x"], columns["x"], rtol=1e-12)

    def test_identical_inputs_give_identical_bytes(self, tmp_path):
        columns = {"x": np.linspace(-1, 1, 11), "y": np.sin(np.linspace(-1, 1, 11))}
        a = write_csv(tmp_path / "a.csv", columns).read_bytes()
        b = write_csv(tmp_path / "b.csv", columns).read_bytes()
        assert a == b
        assert b"\r\n" not in a

    def test_unequal_columns(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "bad.csv", {"x": np.zeros(3), "y": np.zeros(4)})

    def test_no_columns(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "empty.csv", {})


class TestAtomicPath:
    def test_replaces_on_success(self, tmp_path):
        target = tmp_path / "fig.svg"
        target.write_text("old")
        with atomic_path(target) as tmp:
            tmp.write_text("new")
            assert target.read_text() == "old"
        assert target.read_text() == "new"
        assert list(tmp_path.iterdir()) == [target]

    def test_leaves_target_on_failure(self, tmp_path):
        target = tmp_path / "fig.svg"
        target.write_text("old")
        with pytest.raises(RuntimeError):
            with atomic_path(target) as tmp:
                tmp.write_text("partial")
                raise RuntimeError("boom")
        assert target.read_text() == "old"
        assert list(tmp_path.iterdir()) == [target]
