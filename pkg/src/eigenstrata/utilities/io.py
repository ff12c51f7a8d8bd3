import io
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Mapping, Union

import numpy as np

from eigenstrata.utilities.validators import has_len

CSV_FORMAT = "%.12e"


@contextmanager
def atomic_path(path: Union[str, Path]) -> Iterator[Path]:
    """
    Yield a temporary path next to `path`; on success it replaces `path`.

    Example:
        ```python
        with atomic_path("out/fig3.svg") as tmp:
            figure.savefig(tmp, format="svg")
        ```
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def format_csv(columns: Mapping[str, np.ndarray]) -> str:
    """UTF-8 CSV text: header row, `%.12e` values, LF line endings."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
    buffer = io.StringIO()
    np.savetxt(
        buffer, data, fmt=CSV_FORMAT, delimiter=",",
        header=",".join(names), comments="", newline="\n",
    )
    return buffer.getvalue()


def write_csv(path: Union[str, Path], columns: Mapping[str, np.ndarray]) -> Path:
    """Write equal-length columns as CSV, atomically."""
    has_len(min_length=1)(columns)
    lengths = {len(np.atleast_1d(values)) for values in columns.values()}
    if len(lengths) != 1:
        raise ValueError("CSV columns must all have the same length")
    text = format_csv(columns)
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8", newline="\n")
    return Path(path)


def read_csv(path: Union[str, Path]) -> dict[str, np.ndarray]:
    path = Path(path)
    with path.open(encoding="utf-8") as f:
        names = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(names)}
