"""Exact Gaussian-rational scalars and dense matrices.

Every matrix in the package (Pauli triples, Dirac matrices, projectors,
packings, PDE coefficient tables) lives over Q(i).  Nothing here ever rounds,
so identities are checked with ``==`` and no tolerance.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ExactScalar",
    "ExactMatrix",
    "ShapeError",
    "I",
    "ZERO",
    "ONE",
    "HALF",
    "matrix_product",
    "kron",
    "commutator",
    "anticommutator",
    "conj_transpose",
    "rref",
    "row_space_equal",
    "inverse",
    "identity",
    "zeros",
    "diag",
    "block",
]


class ShapeError(ValueError):
    """Raised when matrix shapes are incompatible for an operation."""


class ExactScalar:
    """A Gaussian rational ``re + i*im`` with arbitrary-precision parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def coerce(cls, x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x, 0)
        if isinstance(x, complex) and x.real.is_integer() and x.imag.is_integer():
            return cls(int(x.real), int(x.imag))
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Inverse of ``str``: accepts ``'3/2'``, ``'-i'``, ``'1/2-3/4i'``."""
        s = text.replace(" ", "")
        if not s.endswith("i"):
            return cls(Fraction(s))
        body = s[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split <= 0:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:split], body[split:]
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return cls(Fraction(re_part), Fraction(im_part))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.im and not self.im:
            return ExactScalar(self.re * o.re, 0)
        return ExactScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ExactScalar.coerce(other)
        if not o:
            raise ZeroDivisionError("division by exact zero")
        den = o.re * o.re + o.im * o.im
        return ExactScalar(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) / self

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    @property
    def real(self) -> "ExactScalar":
        return ExactScalar(self.re, 0)

    @property
    def imag(self) -> "ExactScalar":
        return ExactScalar(self.im, 0)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # comparison -----------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if not self.im:
            return str(self.re)
        if self.im == 1:
            im = "i"
        elif self.im == -1:
            im = "-i"
        else:
            im = f"{self.im}i"
        if not self.re:
            return im
        return f"{self.re}{'' if im.startswith('-') else '+'}{im}"

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"


ZERO = ExactScalar(0)
ONE = ExactScalar(1)
HALF = ExactScalar(Fraction(1, 2))
I = ExactScalar(0, 1)


class ExactMatrix:
    """Immutable dense matrix over the Gaussian rationals, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, data: Sequence[Sequence], *, _entries=None, _shape=None):
        if _entries is not None:
            rows, cols = _shape
            entries = _entries
        else:
            data = [list(r) for r in data]
            if not data or not data[0]:
                raise ShapeError("matrix must have at least one row and one column")
            rows, cols = len(data), len(data[0])
            if any(len(r) != cols for r in data):
                raise ShapeError("ragged rows")
            entries = tuple(ExactScalar.coerce(x) for r in data for x in r)
        if rows < 1 or cols < 1 or len(entries) != rows * cols:
            raise ShapeError(f"bad shape {rows}x{cols} for {len(entries)} entries")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def _raw(cls, rows: int, cols: int, entries) -> "ExactMatrix":
        return cls(None, _entries=tuple(entries), _shape=(rows, cols))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self) -> list[list[ExactScalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(x) for x in self.entries], dtype=complex).reshape(self.shape)

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]]) -> "ExactMatrix":
        return cls([[ExactScalar.parse(s) for s in r] for r in rows])

    # elementwise ----------------------------------------------------------
    def _check_same(self, other, op):
        if self.shape != other.shape:
            raise ShapeError(f"{op}: shapes {self.rows}x{self.cols} and {other.rows}x{other.cols} differ")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other, "add")
        return ExactMatrix._raw(self.rows, self.cols, (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other, "subtract")
        return ExactMatrix._raw(self.rows, self.cols, (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return ExactMatrix._raw(self.rows, self.cols, (-a for a in self.entries))

    def __mul__(self, scalar) -> "ExactMatrix":
        s = ExactScalar.coerce(scalar)
        return ExactMatrix._raw(self.rows, self.cols, (s * a for a in self.entries))

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        return matrix_product(self, other)

    @property
    def H(self) -> "ExactMatrix":
        return conj_transpose(self)

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.cols, self.rows,
                                (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def nonzero(self) -> list[tuple[int, int, ExactScalar]]:
        return [(k // self.cols, k % self.cols, x) for k, x in enumerate(self.entries) if x]

    def rank(self) -> int:
        return len(rref(self.tolist())[0])

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"ExactMatrix([{body}])"


def identity(n: int) -> ExactMatrix:
    return ExactMatrix._raw(n, n, (ONE if i == j else ZERO for i in range(n) for j in range(n)))


def zeros(rows: int, cols: int | None = None) -> ExactMatrix:
    cols = rows if cols is None else cols
    return ExactMatrix._raw(rows, cols, (ZERO,) * (rows * cols))


def diag(*values) -> ExactMatrix:
    n = len(values)
    return ExactMatrix([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


def block(blocks: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
    """Assemble a matrix from a 2D grid of blocks."""
    out = []
    for brow in blocks:
        h = brow[0].rows
        if any(b.rows != h for b in brow):
            raise ShapeError("block row heights differ")
        for i in range(h):
            out.append([x for b in brow for x in b.row(i)])
    return ExactMatrix(out)


def matrix_product(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    n, m, p = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    out = []
    for i in range(n):
        arow = ae[i * m:(i + 1) * m]
        for j in range(p):
            acc = ZERO
            for k in range(m):
                x = arow[k]
                if x:
                    y = be[k * p + j]
                    if y:
                        acc = acc + x * y
            out.append(acc)
    return ExactMatrix._raw(n, p, out)


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Standard Kronecker product: block (i, j) of the result is ``a[i, j] * b``."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    out = []
    for i in range(a.rows):
        for k in range(b.rows):
            for j in range(a.cols):
                x = a[i, j]
                for l in range(b.cols):
                    out.append(x * b[k, l])
    return ExactMatrix._raw(rows, cols, out)


def _check_square_pair(a: ExactMatrix, b: ExactMatrix, op: str):
    if a.rows != a.cols or b.rows != b.cols or a.shape != b.shape:
        raise ShapeError(f"{op} needs square matrices of equal size, got {a.rows}x{a.cols} and {b.rows}x{b.cols}")


def commutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    _check_square_pair(a, b, "commutator")
    return a @ b - b @ a


def anticommutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    _check_square_pair(a, b, "anticommutator")
    return a @ b + b @ a


def conj_transpose(a: ExactMatrix) -> ExactMatrix:
    return ExactMatrix._raw(a.cols, a.rows,
                            (a[i, j].conjugate() for j in range(a.cols) for i in range(a.rows)))


def rref(rows: Iterable[Sequence]) -> tuple[list[list[ExactScalar]], list[int]]:
    """Reduced row-echelon form with zero rows dropped.

    Returns ``(rows, pivot_columns)``.  The form is unique for a given row
    space, which is what makes it usable as a canonical key.
    """
    m = [[ExactScalar.coerce(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != ONE:
            inv = ONE / piv
            m[r] = [x * inv if x else ZERO for x in m[r]]
        prow = m[r]
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(len(m)):
            if i == r:
                continue
            f = m[i][c]
            if not f:
                continue
            row = m[i]
            for j in nz:
                row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def row_space_equal(a: ExactMatrix, b: ExactMatrix) -> bool:
    if a.cols != b.cols:
        raise ShapeError(f"row spaces live in different dimensions: {a.cols} vs {b.cols} columns")
    return rref(a.tolist())[0] == rref(b.tolist())[0]


def inverse(a: ExactMatrix) -> ExactMatrix:
    """Exact inverse by Gauss-Jordan elimination on ``[a | 1]``."""
    if a.rows != a.cols:
        raise ShapeError(f"cannot invert a {a.rows}x{a.cols} matrix")
    n = a.rows
    aug = [list(a.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise ZeroDivisionError("matrix is singular")
    return ExactMatrix([r[n:] for r in reduced])
