"""Lattices ``{g_Y : Y in delta Z^n}`` and the centralizer of their left action."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConsistencyError, InputError
from .exactlin import (
    Fraction,
    Matrix,
    ScalarProduct,
    inverse,
    rank,
    solve,
    unit,
    vadd,
    vector,
)
from .flatgroup import (
    AffineIsometry,
    FlatGroupModel,
    affine_rep,
    algebra_report,
    group_mul,
)
from .multilinear import ThreeVector, basis_contractions, contract


@dataclass(frozen=True)
class LatticeBasis:
    """The lattice spanned over Z by the rows of ``basis``.

    ``scale`` records ``delta`` when the basis is ``delta * Id``.
    """

    basis: Matrix
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.basis.is_square() or rank(self.basis) != self.basis.nrows:
            raise InputError("lattice basis must be square and of full rank")

    @classmethod
    def scaled(cls, n: int, scale) -> "LatticeBasis":
        scale = Fraction(scale)
        if scale <= 0:
            raise InputError("lattice scale must be positive")
        return cls(Matrix.identity(n) * scale, scale)

    @property
    def generators(self) -> list:
        return list(self.basis.rows)

    def coordinates(self, v: Sequence) -> tuple:
        return inverse(self.basis.T).apply(vector(v))

    def contains(self, v: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))


def bracket_denominator(eta: ThreeVector, g: ScalarProduct) -> int:
    """Least common multiple of the denominators of all ``eta_{e_i} e_j``."""
    dens = [x.denominator for m in basis_contractions(eta, g) for row in m.rows for x in row]
    return math.lcm(1, *dens)


def find_lattice(eta: ThreeVector, g: ScalarProduct) -> LatticeBasis:
    """``delta Z^n`` with ``delta`` clearing the denominators of ``eta_{e_i} e_j``.

    For ``X = delta a``, ``Y = delta b`` the product is
    ``delta (a + b + delta eta_a b)``, integral once ``delta eta_a b`` is.
    """
    return LatticeBasis.scaled(g.dim, bracket_denominator(eta, g))


def lattice_closed(model: FlatGroupModel, lattice: LatticeBasis) -> bool:
    """Closure of the generators under the group law and inversion.

    Bilinearity of ``eta`` makes this sufficient for the whole lattice.
    """
    gens = lattice.generators
    for x in gens:
        if not lattice.contains(tuple(-a for a in x)):
            return False
        for y in gens:
            if not lattice.contains(group_mul(model, x, y)):
                return False
    return True


@dataclass(frozen=True)
class CentralizerSolution:
    """Affine isometries commuting with the left action of the lattice.

    ``particular`` and ``directions`` span the raw solution space of the
    linear system in ``(A, v)``; :meth:`at` returns the element with a given
    translational part.
    """

    model: FlatGroupModel
    particular: AffineIsometry
    directions: tuple

    @property
    def dimension(self) -> int:
        return len(self.directions)

    def at(self, v: Sequence) -> AffineIsometry:
        v = vector(v)
        # translational parts of the directions are the standard basis (checked)
        lin = self.particular.linear
        for vi, d in zip(v, self.directions):
            if vi:
                lin = lin + d.linear * vi
        return AffineIsometry(lin, vadd(self.particular.translation, v))


def _commutation_system(model: FlatGroupModel, gens: list):
    """Rows of ``[eta_Y, A] = 0`` and ``A Y - eta_Y v = Y`` over generators ``Y``.

    Unknowns: ``A`` row-major (``n^2``), then ``v`` (``n``).
    """
    n = model.dim
    nv = n * n + n
    rows, rhs = [], []
    for y in gens:
        ey = contract(model.eta, model.g, y)
        # ([eta_Y, A])_{rc} = sum_k ey[r][k] A[k][c] - A[r][k] ey[k][c]
        for r in range(n):
            for c in range(n):
                row = [0] * nv
                for k in range(n):
                    if ey[r, k]:
                        row[k * n + c] += ey[r, k]
                    if ey[k, c]:
                        row[r * n + k] -= ey[k, c]
                if any(row):
                    rows.append(row)
                    rhs.append(0)
        for r in range(n):
            row = [0] * nv
            for k in range(n):
                if y[k]:
                    row[r * n + k] += y[k]
                if ey[r, k]:
                    row[n * n + k] -= ey[r, k]
            rows.append(row)
            rhs.append(y[r])
    return Matrix(rows, ncols=nv), rhs


def _unpack(sol: Sequence, n: int) -> AffineIsometry:
    return AffineIsometry(
        Matrix._raw(tuple(tuple(sol[r * n: (r + 1) * n]) for r in range(n)), n),
        tuple(sol[n * n:]),
    )


def centralizer_space(model: FlatGroupModel, lattice: LatticeBasis) -> CentralizerSolution:
    """Solve ``[eta_Y, A] X + eta_Y v - A Y + Y = 0`` for all ``X`` and generators ``Y``.

    The solution family must be exactly ``{(Id - eta_v, v)}``: right
    translations by ``g_v``.
    """
    if model.eta is None:
        raise InputError("centralizer needs a model built from a 3-vector")
    if not lattice_closed(model, lattice):
        raise InputError("lattice is not closed under the group law")
    n = model.dim
    a, b = _commutation_system(model, lattice.generators)
    sol = solve(a, b)
    if sol is None:
        raise ConsistencyError("commutation system has no solution")
    particular = _unpack(sol.particular, n)
    raw_dirs = [_unpack(v, n) for v in sol.kernel.vectors()]
    if len(raw_dirs) != n:
        raise ConsistencyError(f"centralizer has dimension {len(raw_dirs)}, expected {n}")
    # re-express the directions so that direction i has translation e_i
    t = Matrix([d.translation for d in raw_dirs])
    if rank(t) != n:
        raise ConsistencyError("centralizer is not parameterized by its translations")
    t_inv = inverse(t)
    directions = []
    for i in range(n):
        lin = Matrix.zeros(n, n)
        for coeff, d in zip(t_inv.rows[i], raw_dirs):
            if coeff:
                lin = lin + d.linear * coeff
        directions.append(AffineIsometry(lin, unit(n, i)))
    # shift the particular solution to translation 0
    shift = particular.linear
    for vi, d in zip(particular.translation, directions):
        if vi:
            shift = shift - d.linear * vi
    result = CentralizerSolution(
        model, AffineIsometry(shift, (Fraction(0),) * n), tuple(directions)
    )
    ident = Matrix.identity(n)
    for i in range(n):
        v = unit(n, i)
        elem = result.at(v)
        if elem.linear != ident - contract(model.eta, model.g, v):
            raise ConsistencyError(f"centralizer element at e{i + 1} is not (Id - eta_v, v)")
        if not elem.is_isometry(model.g):
            raise ConsistencyError("centralizer element is not an isometry")
    if result.particular.linear != ident:
        raise ConsistencyError("centralizer element at v = 0 is not the identity")
    return result


def right_translation(model: FlatGroupModel, v: Sequence) -> AffineIsometry:
    """The affine map ``X -> X * v`` of right multiplication by ``g_v``."""
    v = vector(v)
    n = model.dim
    return AffineIsometry(Matrix.identity(n) - contract(model.eta, model.g, v), v)


def commutes_with_lattice(model: FlatGroupModel, lattice: LatticeBasis, iso: AffineIsometry) -> bool:
    for y in lattice.generators:
        left = affine_rep(model, y)
        if (iso @ left) != (left @ iso):
            return False
    return True


def right_translation_agrees(model: FlatGroupModel, iso: AffineIsometry) -> bool:
    """``iso(X) == X * v`` on the basis and at the origin."""
    n = model.dim
    v = iso.translation
    points = [unit(n, i) for i in range(n)] + [(Fraction(0),) * n]
    return all(iso(x) == group_mul(model, x, v) for x in points)


def quotient_report(model: FlatGroupModel, lattice: LatticeBasis) -> dict:
    rep = algebra_report(model)
    return {
        "scale": str(lattice.scale),
        "closed": lattice_closed(model, lattice),
        "compact": rank(lattice.basis) == model.dim,
        "flat": rep.flat,
        "homogeneous": rep.biinvariant,
    }


__all__ = [
    "LatticeBasis",
    "CentralizerSolution",
    "bracket_denominator",
    "find_lattice",
    "lattice_closed",
    "centralizer_space",
    "right_translation",
    "commutes_with_lattice",
    "right_translation_agrees",
    "quotient_report",
]
