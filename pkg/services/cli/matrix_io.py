"""Plain-text matrix format and atomic file output.

Format: a first line "m n", then m lines of n whitespace-separated reals.
"""

import os
import sys
import tempfile

import numpy as np

from services.svd.errors import MatrixFormatError
from services.svd.matrix_core import DataMatrix


def parse_matrix_text(text: str) -> DataMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix input")
    head = lines[0].split()
    if len(head) != 2:
        raise MatrixFormatError("first line must be 'm n', got {0!r}".format(lines[0]))
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise MatrixFormatError("non-integer dimensions {0!r}".format(lines[0]))
    if m < 1 or n < 1:
        raise MatrixFormatError("dimensions must be positive, got {0}x{1}".format(m, n))
    body = lines[1:]
    if len(body) != m:
        raise MatrixFormatError("expected {0} rows, found {1}".format(m, len(body)))
    rows = []
    for i, line in enumerate(body):
        fields = line.split()
        if len(fields) != n:
            raise MatrixFormatError("row {0} has {1} entries, expected {2}".format(
                i, len(fields), n))
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise MatrixFormatError("row {0} contains a non-numeric entry".format(i))
    return DataMatrix(np.array(rows))


def write_matrix_text(a: DataMatrix) -> str:
    lines = ["{0} {1}".format(a.rows, a.cols)]
    for row in a.values:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def read_input(path: str) -> bytes:
    """Raw bytes from a file, or from standard input for '-'."""
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as f:
        return f.read()


def read_matrix(path: str) -> DataMatrix:
    try:
        text = read_input(path).decode("utf-8")
    except UnicodeDecodeError:
        raise MatrixFormatError("matrix input is not UTF-8 text")
    return parse_matrix_text(text)


def atomic_write(path: str, data: bytes) -> None:
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
