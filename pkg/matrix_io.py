"""
Plain-text matrix files.

Format: a first line `dims d_a d_b`, then d_a*d_b rows of d_a*d_b
whitespace-separated complex entries written `re+imj`. Blank lines and
lines starting with `#` are ignored.
"""

from pathlib import Path

import numpy as np

from exceptions import MatrixParseError


def format_complex(z):
    """17 significant digits, decimal point regardless of locale"""
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def parse_matrix_text(text):
    """
    Parse the matrix file format.

    Returns:
    --------
    dims : tuple of int
        (d_a, d_b)
    matrix : ndarray
        Complex square matrix of side d_a * d_b
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith('#')]
    if not lines:
        raise MatrixParseError("empty matrix file")

    header = lines[0].split()
    if len(header) != 3 or header[0] != 'dims':
        raise MatrixParseError(f"expected header 'dims d_a d_b', got {lines[0]!r}")
    try:
        dims = (int(header[1]), int(header[2]))
    except ValueError:
        raise MatrixParseError(f"dimensions must be integers, got {lines[0]!r}") from None
    if dims[0] < 1 or dims[1] < 1:
        raise MatrixParseError(f"dimensions must be positive, got {dims}")

    n = dims[0] * dims[1]
    rows = lines[1:]
    if len(rows) != n:
        raise MatrixParseError(f"expected {n} matrix rows, found {len(rows)}")

    matrix = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        entries = row.split()
        if len(entries) != n:
            raise MatrixParseError(f"row {i + 1} has {len(entries)} entries, expected {n}")
        try:
            matrix[i] = [complex(entry) for entry in entries]
        except ValueError:
            raise MatrixParseError(f"row {i + 1} has a malformed complex entry") from None

    if not np.all(np.isfinite(matrix)):
        raise MatrixParseError("matrix has non-finite entries")
    return dims, matrix


def read_matrix_file(path):
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise MatrixParseError(f"cannot read {path}: {e}") from e
    return parse_matrix_text(text)


def format_matrix(matrix, dims):
    matrix = np.asarray(matrix)
    lines = [f"dims {dims[0]} {dims[1]}"]
    for row in matrix:
        lines.append(' '.join(format_complex(z) for z in row))
    return '\n'.join(lines) + '\n'


def write_matrix_file(path, d):
    """Write a bipartite DensityOperator in the matrix file format"""
    Path(path).write_text(format_matrix(d.matrix, d.dims))
    return path
