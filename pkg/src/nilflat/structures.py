"""Skew (para-)complex structures and the flat nearly (para-)Kaehler field.

Given ``eta`` with isotropic support whose contractions anticommute with a
constant skew structure ``J0`` (``J0^2 = eps Id``), the endomorphism field

    J(x) = (Id + 2 sum_i x^i eta_{e_i}) J0

is again a skew structure at every point, and ``(V, g, J)`` is nearly
Kaehler (``eps = -1``) or nearly para-Kaehler (``eps = +1``).  Every identity
below is checked on the coefficient matrices of polynomials in ``x``; the
compositions ``eta_X eta_Y`` vanish, so nothing is ever truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConsistencyError, InputError, NotInConeError, StructureError
from .exactlin import (
    Fraction,
    Matrix,
    ScalarProduct,
    Subspace,
    intersect,
    kernel,
    linear_combination,
    orthogonal_complement,
    rank,
    solve,
    unit,
    vadd,
    vector,
    vscale,
)
from .multilinear import (
    ThreeVector,
    anticommutator_witness,
    basis_contractions,
    classify_cone,
    image_of,
    is_isotropic,
    lies_in,
    support,
)


@dataclass(frozen=True)
class CompatibleStructure:
    """``J`` with ``J^2 = epsilon Id`` and ``G J + J^T G = 0``.

    For ``epsilon = +1`` the eigenspaces ``plus``/``minus`` are stored.
    """

    matrix: Matrix
    epsilon: int
    plus: Optional[Subspace] = None
    minus: Optional[Subspace] = None

    @property
    def dim(self) -> int:
        return self.matrix.nrows


def make_structure(j, g: ScalarProduct, epsilon: int) -> CompatibleStructure:
    """Validate ``j`` as a skew (para-)complex structure for ``g``."""
    if epsilon not in (1, -1):
        raise InputError(f"epsilon must be +1 or -1, got {epsilon!r}")
    j = j if isinstance(j, Matrix) else Matrix(j)
    n = g.dim
    if j.shape != (n, n):
        raise StructureError(f"structure must be {n}x{n}", witness="shape")
    if j @ j != epsilon * Matrix.identity(n):
        raise StructureError(f"J^2 != {epsilon:+d} Id", witness="square")
    if not g.is_skew(j):
        raise StructureError("J is not skew for the scalar product", witness="skew")
    if epsilon == -1:
        return CompatibleStructure(j, -1)
    ident = Matrix.identity(n)
    plus, minus = kernel(j - ident), kernel(j + ident)
    if plus.dim != minus.dim:
        raise StructureError(
            f"eigenspaces have dimensions {plus.dim} and {minus.dim}", witness="eigenspaces"
        )
    return CompatibleStructure(j, 1, plus, minus)


# -- presets -----------------------------------------------------------------

def split_para(m: int) -> Matrix:
    """``tau e_i = -e_i``, ``tau f_i = f_i`` on the split basis of R^{m,m}."""
    return Matrix.diag([-1] * m + [1] * m)


def standard_para_c(m: int) -> Matrix:
    """``tau e_i = f_i``, ``tau f_i = e_i`` on ``diag(1^m, (-1)^m)``."""
    n = 2 * m
    rows = [[0] * n for _ in range(n)]
    for i in range(m):
        rows[i][m + i] = rows[m + i][i] = 1
    return Matrix(rows)


def complex_block(n: int) -> Matrix:
    """Rotation blocks ``e_{2a-1} -> e_{2a} -> -e_{2a-1}`` along the diagonal."""
    if n % 2:
        raise InputError("complex-block needs an even dimension")
    rows = [[0] * n for _ in range(n)]
    for a in range(0, n, 2):
        rows[a + 1][a] = 1
        rows[a][a + 1] = -1
    return Matrix(rows)


# -- polynomial endomorphism fields -----------------------------------------

class PolyEndo:
    """Matrix-valued polynomial in the coordinates ``x^1..x^n``.

    Monomials are sorted tuples of 0-based variable indices; ``()`` is the
    constant term.  Zero coefficients are never stored.
    """

    __slots__ = ("size", "terms")

    def __init__(self, size: int, terms: Optional[dict] = None):
        self.size = size
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def constant(cls, c: Matrix) -> "PolyEndo":
        return cls(c.nrows, {(): c})

    @classmethod
    def affine(cls, c: Matrix, linear: Sequence[Matrix]) -> "PolyEndo":
        terms = {(): c}
        terms.update({(i,): b for i, b in enumerate(linear)})
        return cls(c.nrows, terms)

    def __add__(self, other: "PolyEndo") -> "PolyEndo":
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return PolyEndo(self.size, terms)

    def __neg__(self) -> "PolyEndo":
        return PolyEndo(self.size, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "PolyEndo") -> "PolyEndo":
        return self + (-other)

    def __mul__(self, scalar) -> "PolyEndo":
        return PolyEndo(self.size, {m: c * scalar for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other) -> "PolyEndo":
        if isinstance(other, Matrix):
            other = PolyEndo.constant(other)
        terms: dict = {}
        for m1, a in self.terms.items():
            for m2, b in other.terms.items():
                m = tuple(sorted(m1 + m2))
                p = a @ b
                terms[m] = terms[m] + p if m in terms else p
        return PolyEndo(self.size, terms)

    def __rmatmul__(self, other: Matrix) -> "PolyEndo":
        return PolyEndo.constant(other) @ self

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Matrix):
            other = PolyEndo.constant(other)
        if not isinstance(other, PolyEndo):
            return NotImplemented
        return (self - other).is_zero()

    def transpose(self) -> "PolyEndo":
        return PolyEndo(self.size, {m: c.T for m, c in self.terms.items()})

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def at(self, x: Sequence) -> Matrix:
        x = vector(x)
        weights, mats = [], []
        for m, c in self.terms.items():
            w = Fraction(1)
            for i in m:
                w *= x[i]
            weights.append(w)
            mats.append(c)
        return linear_combination(weights, mats, (self.size, self.size))


# -- the J-field -------------------------------------------------------------

@dataclass(frozen=True)
class JField:
    eta: ThreeVector
    j0: CompatibleStructure
    g: ScalarProduct
    derivatives: tuple  # B_i = 2 eta_{e_i} J0, the constant D_{e_i} J

    @property
    def epsilon(self) -> int:
        return self.j0.epsilon

    @property
    def dim(self) -> int:
        return self.g.dim

    def poly(self) -> PolyEndo:
        return PolyEndo.affine(self.j0.matrix, self.derivatives)


def make_field(eta: ThreeVector, j0: CompatibleStructure, g: ScalarProduct) -> JField:
    """Build ``J(x) = (Id + 2 sum x^i eta_{e_i}) J0`` and verify it symbolically."""
    if eta.dim != g.dim or j0.dim != g.dim:
        raise InputError("eta, structure and scalar product must share a dimension")
    report = classify_cone(eta, g)
    if not report.in_cone:
        raise NotInConeError(
            "support of eta is not isotropic", witness=report.composition_witness
        )
    aw = anticommutator_witness(eta, g, j0)
    if aw is not None:
        raise StructureError(f"{{eta_e{aw}, J0}} != 0", witness=aw)
    ms = basis_contractions(eta, g)
    field = JField(eta, j0, g, tuple(2 * (m @ j0.matrix) for m in ms))
    n = g.dim
    jx = field.poly()
    if jx @ jx != PolyEndo.constant(j0.epsilon * Matrix.identity(n)):
        raise ConsistencyError("J(x)^2 != eps Id as a polynomial identity")
    gj = PolyEndo.constant(g.gram) @ jx
    if not (gj + gj.transpose()).is_zero():
        raise ConsistencyError("J(x) is not g-skew as a polynomial identity")
    return field


def eval_j(field: JField, x: Sequence) -> Matrix:
    return field.poly().at(x)


def derivative_along(field: JField, v: Sequence) -> Matrix:
    """``D_v J``; constant in ``x`` because ``J`` is affine."""
    return linear_combination(vector(v), field.derivatives, (field.dim, field.dim))


def _eta_along(field: JField, v: Sequence) -> Matrix:
    return linear_combination(vector(v), basis_contractions(field.eta, field.g),
                              (field.dim, field.dim))


def covariant_derivative_j(field: JField, v: Sequence) -> Matrix:
    """``D_v J``, checked against ``-2 J(x) eta_v`` as a polynomial identity."""
    dj = derivative_along(field, v)
    if field.poly() @ _eta_along(field, v) * -2 != dj:
        raise ConsistencyError("D_v J != -2 J eta_v")
    return dj


@dataclass(frozen=True)
class NPKReport:
    nearly: bool
    nabla_j_zero: bool
    nabla_g_zero: bool
    torsion_minus_2eta: bool
    torsion_skew: bool
    eta_recovered: bool
    j_squared: bool
    j_skew: bool
    flat_identity: bool
    eta_parallel: bool
    strict: bool

    def all_true(self) -> bool:
        """Every identity holds (``strict`` is a classification, not a check)."""
        return all(v for k, v in self.as_dict().items() if k != "strict")

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def npk_report(field: JField, g: Optional[ScalarProduct] = None) -> NPKReport:
    """Verify the nearly (para-)Kaehler identities of ``field`` exactly."""
    g = field.g if g is None else g
    if g != field.g:
        raise InputError("field was built for a different scalar product")
    n = g.dim
    eps = field.epsilon
    ident = Matrix.identity(n)
    etas = basis_contractions(field.eta, g)
    bs = field.derivatives
    jx = field.poly()
    e = [unit(n, a) for a in range(n)]

    nearly = all(
        not any(vadd(bs[a].apply(e[b]), bs[b].apply(e[a])))
        for a in range(n) for b in range(a, n)
    )
    # nabla = D - eta on endomorphism fields: nabla_X J = D_X J - [eta_X, J]
    nabla_j = all(
        (PolyEndo.constant(bs[a]) - (etas[a] @ jx - jx @ etas[a])).is_zero() for a in range(n)
    )
    nabla_g = all(g.is_skew(m) for m in etas)
    # constant fields commute, so T(X, Y) = -eta_X Y + eta_Y X
    torsion = [[vadd(vscale(-1, etas[a].apply(e[b])), etas[b].apply(e[a]))
                for b in range(n)] for a in range(n)]
    torsion_ok = all(
        torsion[a][b] == vscale(-2, etas[a].apply(e[b])) for a in range(n) for b in range(n)
    )
    t3 = [[[g.pair(torsion[a][b], e[c]) for c in range(n)] for b in range(n)] for a in range(n)]
    torsion_skew = all(
        t3[a][b][c] == -t3[b][a][c] == -t3[a][c][b] == t3[b][c][a]
        for a in range(n) for b in range(n) for c in range(n)
    )
    half = Fraction(-eps, 2)
    recovered = all((jx @ bs[a]) * half == etas[a] for a in range(n))
    j_squared = jx @ jx == PolyEndo.constant(eps * ident)
    gj = PolyEndo.constant(g.gram) @ jx
    j_skew = (gj + gj.transpose()).is_zero()
    # g((D_X J) Y, (D_Z J) W) = 0 for all X, Y, Z, W: the span of values is isotropic
    values = Subspace.span((bs[a].apply(e[b]) for a in range(n) for b in range(n)), n)
    flat_identity = is_isotropic(values, g)
    eta_parallel = all(
        (etas[a] @ etas[b] - etas[b] @ etas[a]).is_zero() for a in range(n) for b in range(a + 1, n)
    )
    return NPKReport(
        nearly=nearly,
        nabla_j_zero=nabla_j,
        nabla_g_zero=nabla_g,
        torsion_minus_2eta=torsion_ok,
        torsion_skew=torsion_skew,
        eta_recovered=recovered,
        j_squared=j_squared,
        j_skew=j_skew,
        flat_identity=flat_identity,
        eta_parallel=eta_parallel,
        strict=not field.eta.is_zero(),
    )


def nijenhuis(field: JField, x: Sequence, u: Sequence, v: Sequence) -> tuple:
    """``N_J(u, v)`` at the point ``x`` for constant vector fields ``u``, ``v``."""
    j = eval_j(field, x)
    u, v = vector(u), vector(v)
    ju, jv = j.apply(u), j.apply(v)
    terms = (
        derivative_along(field, ju).apply(v),
        vscale(-1, derivative_along(field, jv).apply(u)),
        j.apply(derivative_along(field, v).apply(u)),
        vscale(-1, j.apply(derivative_along(field, u).apply(v))),
    )
    out = terms[0]
    for t in terms[1:]:
        out = vadd(out, t)
    return out


# -- type and de Rham splitting -----------------------------------------------

@dataclass(frozen=True)
class RegularType:
    type_pq: tuple
    regular: bool
    s: int


def classify_regular(eta: ThreeVector, g: ScalarProduct, structure: CompatibleStructure) -> RegularType:
    """Type ``(p, q)`` of ``eta`` for a para-complex structure."""
    if structure.epsilon != 1:
        raise InputError("the type (p, q) is only defined for eps = +1")
    sigma = support(eta, g)
    p = intersect(sigma, structure.plus).dim
    q = intersect(sigma, structure.minus).dim
    if p + q != sigma.dim:
        raise StructureError(
            f"support is not J-invariant: dim {sigma.dim} but p + q = {p + q}",
            witness=(p, q, sigma.dim),
        )
    return RegularType((p, q), p + q == g.dim // 2, sigma.dim)


@dataclass(frozen=True)
class DeRhamSplit:
    v0: Subspace
    l: Subspace
    lprime: Subspace


def _dual_vector(g: ScalarProduct, targets: list, extra: Optional[Matrix] = None) -> tuple:
    """Some ``w`` with ``g(w, t) = value`` for ``(t, value)`` in ``targets``
    and ``extra @ w = 0``."""
    n = g.dim
    rows = [g.gram.apply(t) for t, _ in targets]
    rhs = [val for _, val in targets]
    if extra is not None:
        rows += list(extra.rows)
        rhs += [0] * extra.nrows
    sol = solve(Matrix(rows, ncols=n), rhs)
    if sol is None:
        raise ConsistencyError("no dual vector exists for an isotropic J-invariant support")
    return sol.particular


def _jpair_basis(sigma: Subspace, j: Matrix) -> list:
    # u_1, J u_1, u_2, J u_2, ... spanning the J-invariant subspace sigma
    chosen: list = []
    current = Subspace.zero(sigma.ambient_dim)
    for v in sigma.vectors():
        if not current.contains(v):
            chosen.append(v)
            current = Subspace.span([w for u in chosen for w in (u, j.apply(u))],
                                    sigma.ambient_dim)
    return chosen


def derham_split(eta: ThreeVector, g: ScalarProduct, structure: CompatibleStructure) -> DeRhamSplit:
    """Split ``V = V0 + (L + L')`` with ``L`` the support and ``L'`` a
    J-invariant isotropic complement dual to it."""
    n = g.dim
    j = structure.matrix
    sigma = support(eta, g)
    if not is_isotropic(sigma, g):
        raise NotInConeError("support of eta is not isotropic")
    if image_of(j, sigma) != sigma:
        raise StructureError("support of eta is not J-invariant")
    ident = Matrix.identity(n)
    duals: list = []
    if structure.epsilon == 1:
        eig = [(u, 1) for u in intersect(sigma, structure.plus).vectors()]
        eig += [(u, -1) for u in intersect(sigma, structure.minus).vectors()]
        for a, (_, lam) in enumerate(eig):
            targets = [(u, 1 if b == a else 0) for b, (u, _) in enumerate(eig)]
            targets += [(w, 0) for w in duals]
            # w must lie in the opposite eigenspace: (J + lam Id) w = 0
            duals.append(_dual_vector(g, targets, j + ident * lam))
    else:
        us = _jpair_basis(sigma, j)
        for a, ua in enumerate(us):
            targets = [(u, 1 if b == a else 0) for b, u in enumerate(us)]
            targets += [(j.apply(u), 0) for u in us]
            targets += [(w, 0) for w in duals]
            w = _dual_vector(g, targets)
            w = vadd(w, vscale(-g.pair(w, w) / 2, ua))
            duals += [w, j.apply(w)]
    lprime = Subspace.span(duals, n)
    total = sigma + lprime
    v0 = orthogonal_complement(total, g)
    checks = {
        "L' isotropic": is_isotropic(lprime, g),
        "L' J-invariant": image_of(j, lprime) == lprime,
        "L and L' transversal": intersect(sigma, lprime).dim == 0,
        "L + L' nondegenerate": rank(g.restricted(total)) == total.dim,
        "V0 nondegenerate": rank(g.restricted(v0)) == v0.dim,
        "V0 J-invariant": image_of(j, v0) == v0,
        "dim V0 = n - 2 dim L": v0.dim == n - 2 * sigma.dim,
        "eta in Lambda^3 L": lies_in(eta, sigma),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise ConsistencyError(f"de Rham split postconditions failed: {failed}")
    return DeRhamSplit(v0, sigma, lprime)
