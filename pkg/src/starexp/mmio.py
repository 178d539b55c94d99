"""Matrix Market (.mtx) reader and writer.

Supports ``coordinate`` and ``array`` storage; ``real``, ``complex``,
``integer`` and ``pattern`` fields; ``general``, ``symmetric``,
``skew-symmetric`` and ``hermitian`` symmetry. Coordinate files load as CSR
matrices, array files as dense ndarrays.
"""
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import MatrixMarketError

FORMATS = ("coordinate", "array")
FIELDS = ("real", "complex", "integer", "pattern")
SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")
MAX_DIM = 2**31 - 1


def _parse_header(line, path):
    parts = line.strip().split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket" or parts[1].lower() != "matrix":
        raise MatrixMarketError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'", 1, path)
    fmt, field, sym = (p.lower() for p in parts[2:])
    if fmt not in FORMATS:
        raise MatrixMarketError(f"unknown format {fmt!r}", 1, path)
    if field not in FIELDS:
        raise MatrixMarketError(f"unknown field {field!r}", 1, path)
    if sym not in SYMMETRIES:
        raise MatrixMarketError(f"unknown symmetry {sym!r}", 1, path)
    if fmt == "array" and field == "pattern":
        raise MatrixMarketError("pattern field requires coordinate format", 1, path)
    if sym == "hermitian" and field != "complex":
        raise MatrixMarketError("hermitian symmetry requires complex field", 1, path)
    return fmt, field, sym


def _ints(tokens, count, lineno, path, what):
    if len(tokens) != count:
        raise MatrixMarketError(f"expected {count} integers for {what}, got {len(tokens)}", lineno, path)
    try:
        vals = [int(tok) for tok in tokens]
    except ValueError:
        raise MatrixMarketError(f"non-integer {what}: {' '.join(tokens)}", lineno, path) from None
    return vals


def _value(tokens, field, lineno, path):
    try:
        if field == "pattern":
            if tokens:
                raise ValueError
            return 1.0
        if field == "complex":
            if len(tokens) != 2:
                raise ValueError
            return complex(float(tokens[0]), float(tokens[1]))
        if len(tokens) != 1:
            raise ValueError
        return float(int(tokens[0])) if field == "integer" else float(tokens[0])
    except ValueError:
        raise MatrixMarketError(f"bad {field} entry: {' '.join(tokens)!r}", lineno, path) from None


def _data_lines(lines):
    for lineno, line in enumerate(lines, start=1):
        if lineno == 1:
            continue
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        yield lineno, stripped.split()


def load_matrix_market(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read Matrix Market file {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 1, path)
    fmt, field, sym = _parse_header(lines[0], path)
    dtype = complex if field == "complex" else float
    body = _data_lines(lines)

    try:
        lineno, tokens = next(body)
    except StopIteration:
        raise MatrixMarketError("missing size line", len(lines), path) from None
    if fmt == "coordinate":
        rows, cols, nnz = _ints(tokens, 3, lineno, path, "size line")
    else:
        rows, cols = _ints(tokens, 2, lineno, path, "size line")
    if rows < 0 or cols < 0 or rows > MAX_DIM or cols > MAX_DIM:
        raise MatrixMarketError(f"invalid dimensions {rows} x {cols}", lineno, path)
    if sym != "general" and rows != cols:
        raise MatrixMarketError(f"{sym} matrix must be square, got {rows} x {cols}", lineno, path)

    if fmt == "coordinate":
        if nnz < 0 or nnz > rows * cols:
            raise MatrixMarketError(f"invalid entry count {nnz} for {rows} x {cols}", lineno, path)
        I = np.empty(nnz, dtype=np.int64)
        J = np.empty(nnz, dtype=np.int64)
        V = np.empty(nnz, dtype=dtype)
        count = 0
        for lineno, tokens in body:
            if count >= nnz:
                raise MatrixMarketError(f"more than the declared {nnz} entries", lineno, path)
            i, j = _ints(tokens[:2], 2, lineno, path, "entry indices")
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(f"index ({i}, {j}) out of range {rows} x {cols}", lineno, path)
            if sym != "general" and i < j:
                raise MatrixMarketError(f"{sym} file stores upper-triangle entry ({i}, {j})", lineno, path)
            if sym == "skew-symmetric" and i == j:
                raise MatrixMarketError("skew-symmetric file stores a diagonal entry", lineno, path)
            I[count], J[count] = i - 1, j - 1
            V[count] = _value(tokens[2:], field, lineno, path)
            count += 1
        if count != nnz:
            raise MatrixMarketError(f"declared {nnz} entries, found {count}", len(lines), path)
        I, J, V = _expand(I, J, V, sym)
        return sp.csr_matrix((V, (I, J)), shape=(rows, cols))

    # array: column-major, lower triangle only for symmetric kinds
    if sym == "general":
        positions = [(i, j) for j in range(cols) for i in range(rows)]
    elif sym == "skew-symmetric":
        positions = [(i, j) for j in range(cols) for i in range(j + 1, rows)]
    else:
        positions = [(i, j) for j in range(cols) for i in range(j, rows)]
    dense = np.zeros((rows, cols), dtype=dtype)
    count = 0
    for lineno, tokens in body:
        if count >= len(positions):
            raise MatrixMarketError(f"more than the expected {len(positions)} values", lineno, path)
        i, j = positions[count]
        dense[i, j] = _value(tokens, field, lineno, path)
        count += 1
    if count != len(positions):
        raise MatrixMarketError(f"expected {len(positions)} values, found {count}", len(lines), path)
    if sym != "general":
        lower = np.tril(dense, -1)
        if sym == "symmetric":
            dense = dense + lower.T
        elif sym == "skew-symmetric":
            dense = dense - lower.T
        else:
            dense = dense + lower.conj().T
    return dense


def _expand(I, J, V, sym):
    if sym == "general":
        return I, J, V
    off = I != J
    if sym == "symmetric":
        mirrored = V[off]
    elif sym == "skew-symmetric":
        mirrored = -V[off]
    else:
        mirrored = V[off].conj()
    return (np.concatenate([I, J[off]]), np.concatenate([J, I[off]]), np.concatenate([V, mirrored]))


def _fmt(x, field):
    if field == "complex":
        return f"{x.real:.17g} {x.imag:.17g}"
    if field == "integer":
        return f"{int(x.real)}"
    return f"{x.real:.17g}"


def write_matrix_market(path, A, field=None, comment=None):
    """Write ``A`` (sparse -> coordinate, dense -> array) with ``general`` symmetry.

    Values use 17 significant digits, so a round trip is bitwise exact.
    """
    path = Path(path)
    if field is None:
        field = "complex" if np.iscomplexobj(A.data if sp.issparse(A) else A) else "real"
    lines = []
    if sp.issparse(A):
        C = sp.coo_matrix(A)
        lines.append(f"%%MatrixMarket matrix coordinate {field} general")
        if comment:
            lines.extend(f"% {c}" for c in comment.splitlines())
        lines.append(f"{C.shape[0]} {C.shape[1]} {C.nnz}")
        for i, j, x in zip(C.row, C.col, C.data):
            val = "" if field == "pattern" else " " + _fmt(x, field)
            lines.append(f"{i + 1} {j + 1}{val}")
    else:
        D = np.atleast_2d(np.asarray(A))
        if D.ndim == 2 and D.shape[0] == 1 and np.asarray(A).ndim == 1:
            D = D.T
        lines.append(f"%%MatrixMarket matrix array {field} general")
        if comment:
            lines.extend(f"% {c}" for c in comment.splitlines())
        lines.append(f"{D.shape[0]} {D.shape[1]}")
        lines.extend(_fmt(x, field) for x in D.T.ravel())
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write Matrix Market file {path}: {exc}") from exc
