"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`; vectors are tuples of fractions;
matrices are immutable :class:`Matrix` objects.  Subspaces are stored by a
basis in reduced row-echelon form, so two equal subspaces compare equal as
plain data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InputError

__all__ = [
    "Fraction",
    "as_fraction",
    "vector",
    "dot",
    "vadd",
    "vsub",
    "vscale",
    "is_zero_vector",
    "linear_combination",
    "commutator",
    "unit",
    "Matrix",
    "Subspace",
    "Solution",
    "ScalarProduct",
    "rref",
    "rank",
    "solve",
    "kernel",
    "inverse",
    "orthogonal_complement",
    "intersect",
    "congruence_diagonal",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    """Coerce ``int``, ``Fraction`` or a ``"p/q"`` string to a Fraction.

    Floats are refused: every scalar in this package must be exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {x!r}") from exc
    raise InputError(f"not an exact rational: {x!r}")


def vector(values: Iterable) -> tuple:
    return tuple(as_fraction(v) for v in values)


def unit(n: int, i: int) -> tuple:
    """The ``i``-th (0-based) standard basis vector of length ``n``."""
    return tuple(ONE if k == i else ZERO for k in range(n))


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Sequence) -> tuple:
    return tuple(c * a for a in u)


def is_zero_vector(u: Sequence) -> bool:
    return not any(u)


class Matrix:
    """Immutable dense matrix of fractions.

    ``Matrix([[1, 2], [3, 4]])`` converts entries with :func:`as_fraction`.
    A matrix with no rows still knows its column count (``ncols``).
    """

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable] = (), ncols: Optional[int] = None):
        data = tuple(tuple(as_fraction(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for row in data:
            if len(row) != ncols:
                raise InputError("matrix rows must all have the same length")
        self._set(data, ncols)

    def _set(self, data, ncols):
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _raw(cls, data: tuple, ncols: int) -> "Matrix":
        # Trusted constructor: ``data`` is already a tuple of Fraction tuples.
        m = object.__new__(cls)
        m._set(data, ncols)
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(tuple(unit(n, i) for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls._raw(tuple((ZERO,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def diag(cls, entries: Iterable) -> "Matrix":
        d = [as_fraction(x) for x in entries]
        n = len(d)
        return cls._raw(
            tuple(tuple(d[i] if i == j else ZERO for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: Optional[int] = None) -> "Matrix":
        cols = [vector(c) for c in columns]
        if nrows is None:
            nrows = len(cols[0]) if cols else 0
        return cls._raw(tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, index):
        if isinstance(index, tuple):
            i, j = index
            return self.rows[i][j]
        return self.rows[index]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        if not self.nrows:
            return Matrix._raw(tuple(() for _ in range(self.ncols)), 0)
        return Matrix._raw(tuple(zip(*self.rows)), self.nrows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.ncols, self.rows)))
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows)
        return f"Matrix([{body}])"

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise InputError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix._raw(
            tuple(tuple(a + b if b else a for a, b in zip(r, s)) for r, s in
                  zip(self.rows, other.rows)),
            self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix._raw(
            tuple(tuple(a - b if b else a for a, b in zip(r, s)) for r, s in
                  zip(self.rows, other.rows)),
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.rows), self.ncols)

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        c = as_fraction(c)
        if c == 1:
            return self
        if not c:
            return Matrix.zeros(self.nrows, self.ncols)
        return Matrix._raw(tuple(tuple(c * a if a else a for a in r) for r in self.rows),
                           self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise InputError(f"cannot multiply {self.shape} by {other.shape}")
            orows = other.rows
            zero_row = (ZERO,) * other.ncols
            out = []
            for row in self.rows:
                acc = None
                for a, orow in zip(row, orows):
                    if not a:
                        continue
                    if acc is None:
                        acc = [a * b if b else ZERO for b in orow]
                    else:
                        for j, b in enumerate(orow):
                            if b:
                                acc[j] += a * b
                out.append(zero_row if acc is None else tuple(acc))
            return Matrix._raw(tuple(out), other.ncols)
        if isinstance(other, (tuple, list)):
            return self.apply(other)
        return NotImplemented

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product."""
        if len(v) != self.ncols:
            raise InputError(f"cannot apply {self.shape} matrix to a vector of length {len(v)}")
        return tuple(dot(row, v) for row in self.rows)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows) for j in range(i + 1, self.ncols)
        )

    def flat(self) -> tuple:
        """Entries in row-major order."""
        return tuple(x for r in self.rows for x in r)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise InputError("hstack needs equal row counts")
        return Matrix._raw(tuple(a + b for a, b in zip(self.rows, other.rows)),
                           self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise InputError("vstack needs equal column counts")
        return Matrix._raw(self.rows + other.rows, self.ncols)

    def to_strings(self) -> list:
        return [[str(x) for x in row] for row in self.rows]


def linear_combination(coeffs: Sequence, mats: Sequence[Matrix], shape: tuple) -> Matrix:
    """``sum c_i M_i`` skipping zero coefficients and zero entries."""
    nrows, ncols = shape
    acc = None
    for c, m in zip(coeffs, mats):
        if not c:
            continue
        if acc is None:
            acc = [[c * x if x else ZERO for x in r] for r in m.rows]
            continue
        for ar, r in zip(acc, m.rows):
            for j, x in enumerate(r):
                if x:
                    ar[j] += c * x
    if acc is None:
        return Matrix.zeros(nrows, ncols)
    return Matrix._raw(tuple(tuple(r) for r in acc), ncols)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def anticommutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b + b @ a


# -- elimination ------------------------------------------------------------

def _reduce_rows(rows: Iterable[dict], stop_at: Optional[int] = None):
    """Incremental Gauss-Jordan on sparse rows.

    ``rows`` are dicts ``{column: nonzero Fraction}``.  Returns the pivot rows
    sorted by pivot column, already in reduced row-echelon form.  When
    ``stop_at`` is given and a row acquires its pivot in that column, the
    system is inconsistent and ``None`` is returned.
    """
    pivots: dict = {}  # pivot column -> row dict with a leading 1
    for raw in rows:
        row = {c: v for c, v in raw.items() if v}
        for col in sorted(set(row) & pivots.keys()):
            c = row.get(col)
            if not c:
                continue
            for k, v in pivots[col].items():
                nv = row.get(k, ZERO) - c * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        if not row:
            continue
        lead = min(row)
        if stop_at is not None and lead == stop_at:
            return None
        inv = 1 / row[lead]
        if inv != 1:
            row = {k: v * inv for k, v in row.items()}
        for prow in pivots.values():
            c = prow.get(lead)
            if c:
                for k, v in row.items():
                    nv = prow.get(k, ZERO) - c * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[lead] = row
    return [pivots[c] for c in sorted(pivots)]


def _sparse_rows(a: Matrix):
    return ({j: x for j, x in enumerate(r) if x} for r in a.rows)


def _dense(row: dict, n: int) -> tuple:
    return tuple(row.get(j, ZERO) for j in range(n))


def rref(a: Matrix) -> tuple:
    """Reduced row-echelon form with zero rows dropped, and the pivot columns."""
    reduced = _reduce_rows(_sparse_rows(a))
    pivots = tuple(min(r) for r in reduced)
    return Matrix._raw(tuple(_dense(r, a.ncols) for r in reduced), a.ncols), pivots


def rank(a: Matrix) -> int:
    return len(_reduce_rows(_sparse_rows(a)))


@dataclass(frozen=True)
class Solution:
    particular: tuple
    kernel: "Subspace"


def solve(a: Matrix, b: Sequence) -> Optional[Solution]:
    """Solve ``a x = b`` exactly.

    Returns ``None`` when the system is inconsistent.
    """
    b = vector(b)
    if len(b) != a.nrows:
        raise InputError(f"right-hand side has length {len(b)}, expected {a.nrows}")
    n = a.ncols
    rows = []
    for r, rhs in zip(a.rows, b):
        d = {j: x for j, x in enumerate(r) if x}
        if rhs:
            d[n] = rhs
        rows.append(d)
    reduced = _reduce_rows(rows, stop_at=n)
    if reduced is None:
        return None
    x = [ZERO] * n
    for row in reduced:
        x[min(row)] = row.get(n, ZERO)
    return Solution(tuple(x), kernel(a))


def _kernel_vectors(reduced: list, n: int) -> list:
    pivot_cols = [min(r) for r in reduced]
    free = [j for j in range(n) if j not in set(pivot_cols)]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for pc, row in zip(pivot_cols, reduced):
            c = row.get(f)
            if c:
                v[pc] = -c
        basis.append(tuple(v))
    return basis


def kernel(a: Matrix) -> "Subspace":
    """Null space ``{x : a x = 0}``."""
    reduced = _reduce_rows(_sparse_rows(a))
    return Subspace.span(_kernel_vectors(reduced, a.ncols), a.ncols)


def inverse(a: Matrix) -> Matrix:
    if not a.is_square():
        raise InputError("only square matrices are invertible")
    n = a.nrows
    aug = a.hstack(Matrix.identity(n))
    reduced = _reduce_rows(_sparse_rows(aug))
    if len(reduced) < n or min(reduced[-1]) >= n:
        raise InputError("matrix is singular")
    return Matrix._raw(tuple(tuple(r.get(n + j, ZERO) for j in range(n)) for r in reduced), n)


# -- subspaces --------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n, stored as an RREF basis (rows)."""

    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise InputError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
            rows.append({j: as_fraction(x) for j, x in enumerate(v) if x})
        reduced = _reduce_rows(rows)
        return cls(ambient_dim,
                   Matrix._raw(tuple(_dense(r, ambient_dim) for r in reduced), ambient_dim))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix._raw((), n))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def vectors(self) -> list:
        return list(self.basis.rows)

    def contains(self, v: Sequence) -> bool:
        return Subspace.span(self.vectors() + [tuple(v)], self.ambient_dim).dim == self.dim

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __add__(self, other: "Subspace") -> "Subspace":
        _same_ambient(self, other)
        return Subspace.span(self.vectors() + other.vectors(), self.ambient_dim)

    def issubspace(self, other: "Subspace") -> bool:
        return (self + other).dim == other.dim

    def annihilator(self) -> Matrix:
        """Rows spanning ``{w : <w, u>_euclid = 0 for u in self}``."""
        return kernel(self.basis).basis

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, basis={self.basis!r})"


def _same_ambient(u: Subspace, w: Subspace):
    if u.ambient_dim != w.ambient_dim:
        raise InputError(f"ambient dimensions differ: {u.ambient_dim} vs {w.ambient_dim}")


def intersect(u: Subspace, w: Subspace) -> Subspace:
    _same_ambient(u, w)
    n = u.ambient_dim
    constraints = u.annihilator().vstack(w.annihilator())
    return kernel(constraints) if constraints.nrows else Subspace.full(n)


# -- scalar products --------------------------------------------------------

def congruence_diagonal(gram: Matrix) -> list:
    """Diagonal entries of a rational congruence diagonalization ``P^T G P``.

    Zero entries appear exactly when ``gram`` is degenerate.
    """
    if not gram.is_symmetric():
        raise InputError("Gram matrix must be symmetric")
    m = [list(r) for r in gram.rows]
    n = len(m)

    def swap(i, j):
        m[i], m[j] = m[j], m[i]
        for r in m:
            r[i], r[j] = r[j], r[i]

    def add_to(i, j):
        # basis vector i += basis vector j
        for k in range(n):
            m[i][k] += m[j][k]
        for r in m:
            r[i] += r[j]

    diagonal = []
    for i in range(n):
        if not m[i][i]:
            j = next((j for j in range(i + 1, n) if m[j][j]), None)
            if j is not None:
                swap(i, j)
            else:
                j = next((j for j in range(i + 1, n) if m[i][j]), None)
                if j is not None:
                    add_to(i, j)
        p = m[i][i]
        diagonal.append(p)
        if not p:
            continue
        for j in range(i + 1, n):
            f = m[j][i] / p
            if f:
                for k in range(i, n):
                    m[j][k] -= f * m[i][k]
                for r in m:
                    r[j] -= f * r[i]
    return diagonal


@dataclass(frozen=True)
class ScalarProduct:
    """Nondegenerate symmetric bilinear form given by its Gram matrix.

    ``signature`` is ``(k, l)``: k positive and l negative directions.
    """

    gram: Matrix
    signature: tuple = field(init=False)
    inverse: Matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = self.gram
        if not isinstance(g, Matrix):
            g = Matrix(g)
            object.__setattr__(self, "gram", g)
        if not g.is_square():
            raise InputError("Gram matrix must be square")
        d = congruence_diagonal(g)
        if any(x == 0 for x in d):
            raise InputError("Gram matrix is degenerate")
        k = sum(1 for x in d if x > 0)
        object.__setattr__(self, "signature", (k, len(d) - k))
        object.__setattr__(self, "inverse", inverse(g))

    @property
    def dim(self) -> int:
        return self.gram.nrows

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        return dot(u, self.gram.apply(v))

    def restricted(self, u: Subspace) -> Matrix:
        """Gram matrix of the form on the stored basis of ``u``."""
        b = u.basis
        return b @ self.gram @ b.T if b.nrows else Matrix._raw((), 0)

    def is_isometry(self, a: Matrix) -> bool:
        return a.shape == self.gram.shape and a.T @ self.gram @ a == self.gram

    def is_skew(self, a: Matrix) -> bool:
        ga = self.gram @ a
        return (ga + ga.T).is_zero()

    @classmethod
    def split(cls, k: int, l: Optional[int] = None) -> "ScalarProduct":
        """Split basis preset ``split(k, l)``.

        With ``m = min(k, l)`` the basis is ``e_1..e_m, f_1..f_m`` with
        ``<e_i, f_j> = delta_ij`` and ``e``, ``f`` null, followed by
        ``|k - l|`` orthonormal vectors of the surplus sign.
        """
        if l is None:
            l = k
        if k < 0 or l < 0:
            raise InputError("signature entries must be non-negative")
        m = min(k, l)
        r = abs(k - l)
        sign = 1 if k > l else -1
        n = 2 * m + r
        rows = [[0] * n for _ in range(n)]
        for i in range(m):
            rows[i][m + i] = rows[m + i][i] = 1
        for i in range(r):
            rows[2 * m + i][2 * m + i] = sign
        return cls(Matrix(rows))

    @classmethod
    def diagonal(cls, k: int, l: int) -> "ScalarProduct":
        """``diag(1, ..., 1, -1, ..., -1)`` with k plus and l minus signs."""
        return cls(Matrix.diag([1] * k + [-1] * l))


def orthogonal_complement(u: Subspace, g: ScalarProduct) -> Subspace:
    """``{v : g(v, w) = 0 for all w in u}``."""
    if u.ambient_dim != g.dim:
        raise InputError(f"subspace lives in dimension {u.ambient_dim}, form in {g.dim}")
    if u.dim == 0:
        return Subspace.full(g.dim)
    return kernel(u.basis @ g.gram)
