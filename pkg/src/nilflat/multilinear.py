"""Three-vectors on a pseudo-Euclidean space.

A :class:`ThreeVector` is stored by its coefficients on the wedge products
``e_i ^ e_j ^ e_k`` (1-based, ``i < j < k``) of the standard basis.  Through
the scalar product it is read as an alternating trilinear form

    eta(X, Y, Z) = sum_c c * det [<e_a, X>, <e_a, Y>, <e_a, Z>]_{a = i, j, k}

(no factorial normalization) and as the family of skew endomorphisms
``eta_X`` defined by ``<eta_X Y, Z> = eta(X, Y, Z)``.  With the split basis of
R^{3,3} and ``eta = f1 ^ f2 ^ f3`` this gives ``eta_{e1} e2 = f3``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import ConsistencyError, InputError
from .exactlin import (
    ONE,
    ZERO,
    Fraction,
    Matrix,
    ScalarProduct,
    Subspace,
    as_fraction,
    intersect,
    inverse,
    unit,
)

_PERMUTATIONS = (
    ((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
    ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1),
)


def _sort_sign(triple):
    """Sort three distinct indices; return (sorted triple, permutation sign)."""
    a, b, c = triple
    sign = 1
    if a > b:
        a, b, sign = b, a, -sign
    if b > c:
        b, c, sign = c, b, -sign
    if a > b:
        a, b, sign = b, a, -sign
    return (a, b, c), sign


@dataclass(frozen=True)
class ThreeVector:
    """Element of Lambda^3 Q^n with sparse coefficients.

    ``terms`` may be given as a mapping or as ``((i, j, k), c)`` pairs with
    strictly increasing 1-based indices; zero coefficients are dropped and
    the stored form is a sorted tuple.
    """

    dim: int
    terms: tuple = ()

    def __post_init__(self):
        raw = self.terms.items() if hasattr(self.terms, "items") else self.terms
        clean = {}
        for triple, c in raw:
            triple = tuple(int(t) for t in triple)
            if len(triple) != 3:
                raise InputError(f"index triple expected, got {triple}")
            i, j, k = triple
            if not (1 <= i < j < k <= self.dim):
                raise InputError(
                    f"indices {triple} must satisfy 1 <= i < j < k <= {self.dim}"
                )
            if triple in clean:
                raise InputError(f"duplicate index triple {triple}")
            c = as_fraction(c)
            if c:
                clean[triple] = c
        object.__setattr__(self, "terms", tuple(sorted(clean.items())))

    @classmethod
    def zero(cls, dim: int) -> "ThreeVector":
        return cls(dim)

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable) -> "ThreeVector":
        """Accumulate ``(i, j, k, c)`` entries in any index order (with sign)."""
        acc: dict = {}
        for i, j, k, c in terms:
            if len({i, j, k}) < 3:
                continue
            key, sign = _sort_sign((i, j, k))
            acc[key] = acc.get(key, ZERO) + sign * as_fraction(c)
        return cls(dim, acc)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        if len({i, j, k}) < 3:
            return ZERO
        key, sign = _sort_sign((i, j, k))
        return sign * self.as_dict().get(key, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _combine(self, other: "ThreeVector", s: int) -> "ThreeVector":
        if self.dim != other.dim:
            raise InputError("three-vectors live in different dimensions")
        acc = self.as_dict()
        for key, c in other.terms:
            acc[key] = acc.get(key, ZERO) + s * c
        return ThreeVector(self.dim, acc)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return ThreeVector(self.dim, {k: -c for k, c in self.terms})

    def __mul__(self, scalar):
        s = as_fraction(scalar)
        return ThreeVector(self.dim, {k: s * c for k, c in self.terms})

    __rmul__ = __mul__

    def indices_used(self) -> set:
        return {i for key, _ in self.terms for i in key}


def wedge(u: Sequence, v: Sequence, w: Sequence) -> ThreeVector:
    """``u ^ v ^ w`` for coordinate vectors of equal length."""
    n = len(u)
    return _expand(n, [(ONE, (u, v, w))])


def _expand(n: int, products: Iterable) -> ThreeVector:
    """Sum of ``c * a ^ b ^ d`` over ``(c, (a, b, d))``, expanded sparsely."""
    acc: dict = {}
    for c, (a, b, d) in products:
        sa = [(i, x) for i, x in enumerate(a) if x]
        sb = [(i, x) for i, x in enumerate(b) if x]
        sd = [(i, x) for i, x in enumerate(d) if x]
        for (i, x), (j, y), (k, z) in itertools.product(sa, sb, sd):
            if i == j or j == k or i == k:
                continue
            key, sign = _sort_sign((i + 1, j + 1, k + 1))
            acc[key] = acc.get(key, ZERO) + sign * c * x * y * z
    return ThreeVector(n, acc)


def push_forward(a: Matrix, eta: ThreeVector) -> ThreeVector:
    """Induced action of a linear map: ``e_i ^ e_j ^ e_k -> a e_i ^ a e_j ^ a e_k``."""
    if a.shape != (eta.dim, eta.dim):
        raise InputError("push_forward needs a square matrix of the right size")
    cols = a.columns()
    return _expand(
        eta.dim, ((c, (cols[i - 1], cols[j - 1], cols[k - 1])) for (i, j, k), c in eta.terms)
    )


def coefficients_in_basis(eta: ThreeVector, basis_columns: Sequence[Sequence]) -> ThreeVector:
    """Coefficients of ``eta`` on the wedges of a new basis ``b_1..b_n``."""
    change = inverse(Matrix.from_columns(basis_columns, eta.dim))
    return push_forward(change, eta)


def lies_in(eta: ThreeVector, u: Subspace) -> bool:
    """Whether ``eta`` belongs to Lambda^3 u."""
    n = eta.dim
    basis = list(u.vectors())
    completion = Subspace.span(basis, n)
    for i in range(n):
        e = unit(n, i)
        if not completion.contains(e):
            basis.append(e)
            completion = Subspace.span(basis, n)
    adapted = coefficients_in_basis(eta, basis)
    return all(k <= u.dim for (_, _, k), _ in adapted.terms)


# -- evaluation and contraction ---------------------------------------------

def _check_dims(eta: ThreeVector, g: ScalarProduct, *vectors):
    if eta.dim != g.dim:
        raise InputError(f"3-vector has dimension {eta.dim}, scalar product {g.dim}")
    for v in vectors:
        if len(v) != g.dim:
            raise InputError(f"vector of length {len(v)} in dimension {g.dim}")


def evaluate(eta: ThreeVector, g: ScalarProduct, x, y, z) -> Fraction:
    """The trilinear form ``eta(x, y, z)``."""
    _check_dims(eta, g, x, y, z)
    gx, gy, gz = (g.gram.apply(v) for v in (x, y, z))
    total = ZERO
    for (i, j, k), c in eta.terms:
        i, j, k = i - 1, j - 1, k - 1
        det = (
            gx[i] * (gy[j] * gz[k] - gy[k] * gz[j])
            - gy[i] * (gx[j] * gz[k] - gx[k] * gz[j])
            + gz[i] * (gx[j] * gy[k] - gx[k] * gy[j])
        )
        total += c * det
    return total


def contract(eta: ThreeVector, g: ScalarProduct, x) -> Matrix:
    """The g-skew endomorphism ``eta_x``."""
    _check_dims(eta, g, x)
    n = g.dim
    u = g.gram.apply(x)
    # eta_x = N G with N[r][q] = sum_p A^{pqr} u_p, A the alternating tensor
    acc = [[ZERO] * n for _ in range(n)]
    for (i, j, k), c in eta.terms:
        idx = (i - 1, j - 1, k - 1)
        for perm, s in _PERMUTATIONS:
            p, q, r = idx[perm[0]], idx[perm[1]], idx[perm[2]]
            if u[p]:
                acc[r][q] += s * c * u[p]
    n_mat = Matrix._raw(tuple(tuple(r) for r in acc), n)
    return n_mat @ g.gram


@lru_cache(maxsize=512)
def basis_contractions(eta: ThreeVector, g: ScalarProduct) -> tuple:
    """``(eta_{e_1}, ..., eta_{e_n})``."""
    return tuple(contract(eta, g, unit(g.dim, a)) for a in range(g.dim))


def support(eta: ThreeVector, g: ScalarProduct) -> Subspace:
    """Span of all ``eta_X Y``."""
    _check_dims(eta, g)
    return Subspace.span(
        (col for m in basis_contractions(eta, g) for col in m.columns()), g.dim
    )


def is_isotropic(u: Subspace, g: ScalarProduct) -> bool:
    if u.ambient_dim != g.dim:
        raise InputError("subspace and scalar product dimensions differ")
    return g.restricted(u).is_zero()


def composition_witness(eta: ThreeVector, g: ScalarProduct) -> Optional[tuple]:
    """First 1-based pair ``(i, j)``, ``i <= j``, with ``eta_i eta_j != 0``."""
    ms = basis_contractions(eta, g)
    for i in range(len(ms)):
        for j in range(i, len(ms)):
            if not (ms[i] @ ms[j]).is_zero():
                return (i + 1, j + 1)
    return None


def anticommutator_witness(eta: ThreeVector, g: ScalarProduct, structure) -> Optional[int]:
    """First 1-based index ``i`` with ``{eta_{e_i}, J} != 0``."""
    j = structure.matrix
    for i, m in enumerate(basis_contractions(eta, g)):
        if not (m @ j + j @ m).is_zero():
            return i + 1
    return None


# -- pure-type projection -----------------------------------------------------

def slot_operator(eta: ThreeVector, j: Matrix) -> ThreeVector:
    """``C(eta)``: apply ``j`` to two of the three factors, summed over the pairs.

    As a trilinear form this is
    ``eta(JX, JY, Z) + eta(JX, Y, JZ) + eta(X, JY, JZ)`` for g-skew ``J``.
    """
    cols = j.columns()
    n = eta.dim
    e = [unit(n, a) for a in range(n)]

    def products():
        for (a, b, c), coeff in eta.terms:
            a, b, c = a - 1, b - 1, c - 1
            yield coeff, (cols[a], cols[b], e[c])
            yield coeff, (cols[a], e[b], cols[c])
            yield coeff, (e[a], cols[b], cols[c])

    return _expand(n, products())


def pure_type_project(eta: ThreeVector, g: ScalarProduct, structure) -> tuple:
    """Split ``eta = eta_minus + eta_plus`` with ``eta_minus`` of type (3,0)+(0,3).

    The projector onto the anticommuting part is ``(Id + eps * C) / 4``.
    """
    _check_dims(eta, g)
    if structure.matrix.shape != (g.dim, g.dim):
        raise InputError("structure and scalar product dimensions differ")
    eps = structure.epsilon
    minus = (eta + eps * slot_operator(eta, structure.matrix)) * Fraction(1, 4)
    return minus, eta - minus


# -- cone classification ------------------------------------------------------

@dataclass(frozen=True)
class ConeReport:
    support: Subspace
    support_dim: int
    isotropic: bool
    composition_zero: bool
    in_cone: bool
    strict: bool
    composition_witness: Optional[tuple] = None
    anticommutes: Optional[bool] = None
    anticommutator_witness: Optional[int] = None
    type_pq: Optional[tuple] = None
    pure_plus: Optional[bool] = None
    pure_minus: Optional[bool] = None
    regular: Optional[bool] = None
    j_invariant_support: Optional[bool] = None

    def as_dict(self) -> dict:
        return {
            "support": [[str(x) for x in v] for v in self.support.vectors()],
            "support_dim": self.support_dim,
            "isotropic": self.isotropic,
            "composition_zero": self.composition_zero,
            "composition_witness": list(self.composition_witness)
            if self.composition_witness else None,
            "in_cone": self.in_cone,
            "strict": self.strict,
            "anticommutes": self.anticommutes,
            "anticommutator_witness": self.anticommutator_witness,
            "type_pq": list(self.type_pq) if self.type_pq is not None else None,
            "pure_plus": self.pure_plus,
            "pure_minus": self.pure_minus,
            "regular": self.regular,
            "j_invariant_support": self.j_invariant_support,
        }


def image_of(a: Matrix, u: Subspace) -> Subspace:
    return Subspace.span((a.apply(v) for v in u.vectors()), u.ambient_dim)


def classify_cone(eta: ThreeVector, g: ScalarProduct, structure=None) -> ConeReport:
    """Support, isotropy and (with a structure) type data of ``eta``.

    Isotropy of the support and vanishing of all compositions
    ``eta_X eta_Y`` are computed independently and must agree.
    """
    sigma = support(eta, g)
    isotropic = is_isotropic(sigma, g)
    witness = composition_witness(eta, g)
    composition_zero = witness is None
    if isotropic != composition_zero:
        raise ConsistencyError(
            f"isotropic support ({isotropic}) disagrees with vanishing compositions "
            f"({composition_zero}, witness {witness})"
        )
    fields = dict(
        support=sigma,
        support_dim=sigma.dim,
        isotropic=isotropic,
        composition_zero=composition_zero,
        in_cone=isotropic,
        strict=not eta.is_zero(),
        composition_witness=witness,
    )
    if structure is not None:
        aw = anticommutator_witness(eta, g, structure)
        fields.update(anticommutes=aw is None, anticommutator_witness=aw)
        fields["j_invariant_support"] = image_of(structure.matrix, sigma) == sigma
        if structure.epsilon == 1:
            p = intersect(sigma, structure.plus).dim
            q = intersect(sigma, structure.minus).dim
            fields.update(
                type_pq=(p, q),
                pure_plus=sigma.issubspace(structure.plus),
                pure_minus=sigma.issubspace(structure.minus),
                regular=p + q == g.dim // 2,
            )
        else:
            fields["regular"] = sigma.dim == g.dim // 2
    return ConeReport(**fields)
