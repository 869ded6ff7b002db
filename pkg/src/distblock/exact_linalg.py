"""Exact dense linear algebra over the rationals.

Everything here works on :class:`ExactMatrix`, an immutable row-major
matrix of :class:`fractions.Fraction` entries.  Zero-dimension matrices
(``0 x k`` and ``k x 0``) are legal values so block layouts with empty
blocks can be assembled without special cases.

The determinant uses fraction-free (Bareiss) elimination on an
integer-scaled copy of the matrix.  Large matrices are handed to FLINT
when it is importable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Any, Callable, Iterable, Sequence

try:  # optional accelerated backend for large determinants
    import flint
except ImportError:  # pragma: no cover
    flint = None

Rational = Fraction

# Above this size ``determinant`` delegates to FLINT (if installed).
FLINT_THRESHOLD = 64
INVERSE_FLINT_THRESHOLD = 16

_SMALL = {k: Fraction(k) for k in range(-8, 9)}


def as_rational(x: Any) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3"``, ``"-1/2"``, ``"0.25"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return _SMALL[x] if x in _SMALL else Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class DimensionError(ValueError):
    """Matrix shapes do not fit the requested operation."""


class SingularMatrixError(ArithmeticError):
    """Raised when an inverse is requested for a singular matrix."""

    def __init__(self, message: str, det: Fraction | None = None):
        super().__init__(message)
        self.det = det


class ExactMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, data: Iterable[Iterable[Any]] = (), cols: int | None = None):
        rows = tuple(tuple(as_rational(x) for x in row) for row in data)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise DimensionError("ragged rows")
            if cols is not None and cols != width:
                raise DimensionError(f"declared {cols} columns, rows have {width}")
        else:
            width = cols or 0
        self.rows = len(rows)
        self.cols = width
        self._data = rows
        self._hash = None

    @classmethod
    def _wrap(cls, rows: tuple[tuple[Fraction, ...], ...], cols: int) -> "ExactMatrix":
        # trusted constructor: entries already Fractions, shape consistent
        m = cls.__new__(cls)
        m.rows = len(rows)
        m.cols = cols
        m._data = rows
        m._hash = None
        return m

    # -- constructors ---------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        z = _SMALL[0]
        return cls._wrap(tuple((z,) * cols for _ in range(rows)), cols)

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        o = _SMALL[1]
        return cls._wrap(tuple((o,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_function(n, n, lambda i, j: 1 if i == j else 0)

    @classmethod
    def scalar(cls, n: int, value: Any) -> "ExactMatrix":
        v = as_rational(value)
        return cls.from_function(n, n, lambda i, j: v if i == j else 0)

    @classmethod
    def from_function(cls, rows: int, cols: int, f: Callable[[int, int], Any]) -> "ExactMatrix":
        return cls._wrap(
            tuple(tuple(as_rational(f(i, j)) for j in range(cols)) for i in range(rows)), cols
        )

    @classmethod
    def column(cls, values: Iterable[Any]) -> "ExactMatrix":
        return cls([[v] for v in values], cols=1)

    @classmethod
    def row_vector(cls, values: Iterable[Any]) -> "ExactMatrix":
        vals = [as_rational(v) for v in values]
        return cls._wrap((tuple(vals),), len(vals))

    # -- basic protocol -------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._data[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._data)

    def __iter__(self):
        return iter(self._data)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(_fmt(x) for x in r) for r in self._data)
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"

    # -- arithmetic -----------------------------------------------------
    def _check_same_shape(self, other: "ExactMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix._wrap(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.cols,
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix._wrap(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.cols,
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix._wrap(tuple(tuple(-a for a in r) for r in self._data), self.cols)

    def scale(self, c: Any) -> "ExactMatrix":
        c = as_rational(c)
        return ExactMatrix._wrap(tuple(tuple(c * a for a in r) for r in self._data), self.cols)

    def __mul__(self, c: Any) -> "ExactMatrix":
        if isinstance(c, ExactMatrix):
            raise TypeError("use @ for matrix products")
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        # Multiply integer numerators, divide by the common denominator once.
        a, da = _integer_rows(self._data)
        bt, db = _integer_rows(other.transpose()._data)
        den = da * db
        out = []
        for r in a:
            out.append(tuple(Fraction(sum(x * y for x, y in zip(r, c)), den) for c in bt))
        return ExactMatrix._wrap(tuple(out), other.cols)

    def transpose(self) -> "ExactMatrix":
        if self.rows == 0:
            return ExactMatrix.zeros(self.cols, 0)
        return ExactMatrix._wrap(tuple(zip(*self._data)), self.rows)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix._wrap(
            tuple(tuple(self._data[i][j] for j in cols) for i in rows), len(cols)
        )

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "ExactMatrix":
        """Contiguous slice ``[r0:r1, c0:c1]``."""
        return ExactMatrix._wrap(tuple(r[c0:c1] for r in self._data[r0:r1]), max(0, c1 - c0))

    def minor_matrix(self, i: int, j: int) -> "ExactMatrix":
        """``A(i|j)``: delete row ``i`` and column ``j``."""
        return ExactMatrix._wrap(
            tuple(r[:j] + r[j + 1 :] for k, r in enumerate(self._data) if k != i), self.cols - 1
        )

    def entry_sum(self) -> Fraction:
        return sum((sum(r, Fraction(0)) for r in self._data), Fraction(0))

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(r, Fraction(0)) for r in self._data)

    def col_sums(self) -> tuple[Fraction, ...]:
        return self.transpose().row_sums() if self.rows else (Fraction(0),) * self.cols

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.transpose()

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for r in self._data for x in r)

    def permute(self, order: Sequence[int]) -> "ExactMatrix":
        """Simultaneous row/column permutation: result[i, j] = self[order[i], order[j]]."""
        return self.submatrix(order, order)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale rows by one common denominator; returns (integer rows, denominator)."""
    den = reduce(lcm, (x.denominator for r in rows for x in r), 1)
    if den == 1:
        return [[x.numerator for x in r] for r in rows], 1
    return [[x.numerator * (den // x.denominator) for x in r] for r in rows], den


def _require_square(A: ExactMatrix, what: str) -> None:
    if not A.is_square:
        raise DimensionError(f"{what} needs a square matrix, got {A.rows}x{A.cols}")


# ---------------------------------------------------------------------------
# determinants, adjugates, inverses
# ---------------------------------------------------------------------------

def bareiss_det_int(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination on an integer matrix (copied)."""
    n = len(rows)
    if n == 0:
        return 1
    M = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for p in range(k + 1, n):
                if M[p][k] != 0:
                    M[k], M[p] = M[p], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = M[k][k]
        rk = M[k]
        for i in range(k + 1, n):
            ri = M[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pivot * ri[j] - f * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * M[n - 1][n - 1]


def _flint_det_int(rows: list[list[int]]) -> int:
    n = len(rows)
    return int(flint.fmpz_mat(n, n, [x for r in rows for x in r]).det())


def determinant(A: ExactMatrix, *, backend: str = "auto") -> Fraction:
    """Exact determinant; ``backend`` is ``"auto"``, ``"bareiss"`` or ``"flint"``."""
    _require_square(A, "determinant")
    if A.rows == 0:
        return Fraction(1)
    # Scale each row to integers separately to keep the entries small.
    int_rows = []
    scale = 1
    for r in A:
        d = reduce(lcm, (x.denominator for x in r), 1)
        scale *= d
        int_rows.append([x.numerator * (d // x.denominator) for x in r])
    use_flint = backend == "flint" or (
        backend == "auto" and flint is not None and A.rows > FLINT_THRESHOLD
    )
    if use_flint:
        if flint is None:
            raise RuntimeError("python-flint is not installed")
        det = _flint_det_int(int_rows)
    elif backend in ("auto", "bareiss"):
        det = bareiss_det_int(int_rows)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return Fraction(det, scale)


def _gauss_jordan_inverse(A: ExactMatrix) -> ExactMatrix:
    n = A.rows
    M = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular", det=Fraction(0))
        if p != k:
            M[k], M[p] = M[p], M[k]
        inv_piv = 1 / M[k][k]
        rk = [x * inv_piv for x in M[k]]
        M[k] = rk
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], rk)]
    return ExactMatrix._wrap(tuple(tuple(r[n:]) for r in M), n)


def _flint_inverse(A: ExactMatrix) -> ExactMatrix:
    n = A.rows
    M = flint.fmpq_mat(n, n, [flint.fmpq(x.numerator, x.denominator) for r in A for x in r])
    try:
        Mi = M.inv()
    except ZeroDivisionError:
        raise SingularMatrixError("matrix is singular", det=Fraction(0)) from None
    return ExactMatrix._wrap(
        tuple(tuple(Fraction(int(Mi[i, j].p), int(Mi[i, j].q)) for j in range(n)) for i in range(n)), n
    )


def inverse(A: ExactMatrix, *, backend: str = "auto") -> ExactMatrix:
    """Exact inverse; ``backend`` is ``"auto"``, ``"gauss"`` or ``"flint"``.

    ``auto`` runs Gauss-Jordan over Fraction up to INVERSE_FLINT_THRESHOLD
    rows and flint's fmpq_mat above.  Raises SingularMatrixError if ``A``
    is singular.
    """
    _require_square(A, "inverse")
    if backend == "flint" or (backend == "auto" and flint is not None and A.rows > INVERSE_FLINT_THRESHOLD):
        if flint is None:
            raise RuntimeError("python-flint is not installed")
        return _flint_inverse(A)
    if backend not in ("auto", "gauss"):
        raise ValueError(f"unknown backend {backend!r}")
    return _gauss_jordan_inverse(A)


def adjugate(A: ExactMatrix) -> ExactMatrix:
    """Classical adjoint: ``A @ adjugate(A) == det(A) * I`` even for singular ``A``."""
    _require_square(A, "adjugate")
    n = A.rows
    if n == 0:
        raise DimensionError("adjugate needs dimension >= 1")
    if n == 1:
        return ExactMatrix([[1]])
    det = determinant(A)
    if det != 0:
        return inverse(A).scale(det)
    # singular: cofactor expansion, entry (i, j) is the (j, i) cofactor
    cof = [[(-1) ** (i + j) * determinant(A.minor_matrix(i, j)) for j in range(n)] for i in range(n)]
    return ExactMatrix._wrap(tuple(tuple(cof[j][i] for j in range(n)) for i in range(n)), n)


def cofactor_sum(A: ExactMatrix) -> Fraction:
    """Sum of all cofactors of ``A`` (``1^t Adj(A) 1``), singular ``A`` included.

    Subtract the first row from every other row, then the first column
    from every other column; the cofactor sum is the determinant of what
    remains after deleting the first row and column.
    """
    _require_square(A, "cofactor_sum")
    n = A.rows
    if n == 0:
        raise DimensionError("cofactor_sum needs dimension >= 1")
    first = A.row(0)
    rows = [first] + [tuple(a - b for a, b in zip(A.row(i), first)) for i in range(1, n)]
    rows = [tuple([r[0]] + [x - r[0] for x in r[1:]]) for r in rows]
    M = ExactMatrix._wrap(tuple(r[1:] for r in rows[1:]), n - 1)
    return determinant(M)


def inv_aI_bJ(n: int, a: Any, b: Any) -> ExactMatrix:
    """Inverse of ``a*I_n + b*J_n``: ``(1/a) (I - b/(a+nb) J)``."""
    a, b = as_rational(a), as_rational(b)
    if a == 0 or a + n * b == 0:
        raise SingularMatrixError(f"aI+bJ singular for n={n}, a={a}, b={b}", det=a ** (n - 1) * (a + n * b))
    off = -b / (a * (a + n * b))
    diag = 1 / a + off
    return ExactMatrix.from_function(n, n, lambda i, j: diag if i == j else off)


def aI_bJ(n: int, a: Any, b: Any) -> ExactMatrix:
    a, b = as_rational(a), as_rational(b)
    return ExactMatrix.from_function(n, n, lambda i, j: a + b if i == j else b)


def _split(B: ExactMatrix, split: int):
    _require_square(B, "schur_complement")
    if not 0 <= split <= B.rows:
        raise DimensionError(f"split {split} outside 0..{B.rows}")
    n = B.rows
    return (
        B.block(0, split, 0, split),
        B.block(0, split, split, n),
        B.block(split, n, 0, split),
        B.block(split, n, split, n),
    )


def schur_complement(B: ExactMatrix, split: int) -> ExactMatrix:
    """``B11 - B12 B22^{-1} B21`` for the partition at row/column ``split``."""
    B11, B12, B21, B22 = _split(B, split)
    return B11 - B12 @ inverse(B22) @ B21


def schur_block_inverse(B: ExactMatrix, split: int) -> ExactMatrix:
    """Inverse of ``B`` assembled from the Schur complement of ``B22``."""
    B11, B12, B21, B22 = _split(B, split)
    B22i = inverse(B22)
    Si = inverse(B11 - B12 @ B22i @ B21)
    top_right = -(Si @ B12 @ B22i)
    bottom_left = -(B22i @ B21 @ Si)
    bottom_right = B22i + B22i @ B21 @ Si @ B12 @ B22i
    return block_assemble([[Si, top_right], [bottom_left, bottom_right]])


def block_assemble(grid: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
    """Concatenate a 2-D grid of blocks.

    Blocks in one grid row must share their row count, blocks in one grid
    column their column count.  Empty blocks are allowed and contribute
    nothing.
    """
    if not grid:
        return ExactMatrix.zeros(0, 0)
    ncols = len(grid[0])
    if any(len(r) != ncols for r in grid):
        raise DimensionError("ragged block grid")
    widths = [grid[0][j].cols for j in range(ncols)]
    out: list[tuple[Fraction, ...]] = []
    for bi, brow in enumerate(grid):
        height = brow[0].rows
        for bj, blk in enumerate(brow):
            if blk.rows != height:
                raise DimensionError(f"block ({bi},{bj}) has {blk.rows} rows, expected {height}")
            if blk.cols != widths[bj]:
                raise DimensionError(f"block ({bi},{bj}) has {blk.cols} cols, expected {widths[bj]}")
        for i in range(height):
            out.append(tuple(x for blk in brow for x in blk.row(i)))
    return ExactMatrix._wrap(tuple(out), sum(widths))


def outer(u: Sequence[Any], v: Sequence[Any]) -> ExactMatrix:
    u = [as_rational(x) for x in u]
    v = [as_rational(x) for x in v]
    return ExactMatrix._wrap(tuple(tuple(a * b for b in v) for a in u), len(v))


def matvec(A: ExactMatrix, x: Sequence[Any]) -> tuple[Fraction, ...]:
    x = [as_rational(v) for v in x]
    if len(x) != A.cols:
        raise DimensionError("vector length does not match column count")
    return tuple(sum((a * b for a, b in zip(r, x)), Fraction(0)) for r in A)


def vecmat(x: Sequence[Any], A: ExactMatrix) -> tuple[Fraction, ...]:
    return matvec(A.transpose(), x)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def rational_to_str(x: Fraction) -> str:
    return _fmt(x)


def matrix_to_json(A: ExactMatrix) -> list[list[str]]:
    return [[_fmt(x) for x in r] for r in A]


def matrix_from_json(obj: Any, cols: int | None = None) -> ExactMatrix:
    """Accepts a list of lists (or its JSON text) of ints or rational strings."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    return ExactMatrix(obj, cols=cols)


def dumps(A: ExactMatrix) -> str:
    return json.dumps(matrix_to_json(A), separators=(",", ":"))
