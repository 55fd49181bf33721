"""The flat 2-step nilpotent Lie group of a 3-vector with isotropic support.

Group elements are identified with vectors of V through the orbit map
``g_X -> g_X(0) = X``.  The group law is ``X * Y = X + Y + eta_X Y``, the Lie
bracket ``[X, Y] = 2 eta_X Y``, and ``g_X`` acts on V by the affine isometry
``Y -> (Id + eta_X) Y + X``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ConsistencyError, InputError, NotInConeError
from .exactlin import (
    Fraction,
    Matrix,
    ScalarProduct,
    Subspace,
    kernel,
    linear_combination,
    orthogonal_complement,
    unit,
    vadd,
    vector,
)
from .multilinear import (
    ThreeVector,
    basis_contractions,
    classify_cone,
    contract,
    image_of,
    push_forward,
    support,
)


@dataclass(frozen=True)
class AffineIsometry:
    """The affine map ``x -> linear @ x + translation``."""

    linear: Matrix
    translation: tuple

    def __call__(self, x: Sequence) -> tuple:
        return vadd(self.linear.apply(vector(x)), self.translation)

    def __matmul__(self, other: "AffineIsometry") -> "AffineIsometry":
        """Composition: ``(self @ other)(x) = self(other(x))``."""
        return AffineIsometry(self.linear @ other.linear, self(other.translation))

    def homogeneous(self) -> Matrix:
        n = self.linear.nrows
        rows = [r + (t,) for r, t in zip(self.linear.rows, self.translation)]
        rows.append((0,) * n + (1,))
        return Matrix(rows)

    def is_isometry(self, g: ScalarProduct) -> bool:
        return g.is_isometry(self.linear)


@dataclass(frozen=True, eq=False)
class FlatGroupModel:
    """Lie algebra ``(V, [.,.])`` with scalar product ``g``.

    ``structure_constants[i][j][k]`` is the coefficient of ``e_k`` in
    ``[e_i, e_j]`` (0-based).  ``connection[i]`` is the Levi-Civita operator
    ``D_{e_i}`` on left-invariant fields, ``eta_{e_i}`` for models built from
    a 3-vector.
    """

    g: ScalarProduct
    structure_constants: tuple
    connection: tuple
    eta: Optional[ThreeVector] = None
    _report: Optional["AlgebraReport"] = field(default=None, init=False, repr=False)

    @property
    def dim(self) -> int:
        return self.g.dim

    def ad(self, i: int) -> Matrix:
        """``ad_{e_i}`` (0-based) as a matrix."""
        c = self.structure_constants[i]
        return Matrix._raw(tuple(tuple(c[j][k] for j in range(self.dim))
                                 for k in range(self.dim)), self.dim)

    @classmethod
    def from_structure_constants(cls, constants, g: ScalarProduct) -> "FlatGroupModel":
        """Unvalidated model of an arbitrary bracket table with a bi-invariant
        candidate metric; the connection is ``D_X = ad_X / 2``."""
        n = g.dim
        c = tuple(tuple(vector(constants[i][j]) for j in range(n)) for i in range(n))
        model = cls(g, c, ())
        half = Fraction(1, 2)
        object.__setattr__(model, "connection", tuple(model.ad(i) * half for i in range(n)))
        return model


def _combo(ms: Sequence[Matrix], x: Sequence, n: int) -> Matrix:
    return linear_combination(x, ms, (n, n))


def build_model(eta: ThreeVector, g: ScalarProduct) -> FlatGroupModel:
    """Lie algebra of the group defined by ``eta``; rejects ``eta`` outside the cone."""
    report = classify_cone(eta, g)
    if not report.in_cone:
        raise NotInConeError(
            f"support of eta is not isotropic; eta_e{report.composition_witness[0]} "
            f"eta_e{report.composition_witness[1]} != 0",
            witness=report.composition_witness,
        )
    n = g.dim
    etas = basis_contractions(eta, g)
    consts = tuple(
        tuple(tuple(2 * x for x in etas[i].column(j)) for j in range(n)) for i in range(n)
    )
    model = FlatGroupModel(g, consts, etas, eta)
    rep = algebra_report(model)
    if not (rep.jacobi and rep.biinvariant and rep.flat and rep.antisymmetric):
        raise ConsistencyError(f"model of a cone element fails its invariants: {rep}")
    if rep.nilpotency_class is None or rep.nilpotency_class > 2:
        raise ConsistencyError(f"nilpotency class {rep.nilpotency_class} exceeds 2")
    return model


def lie_bracket(model: FlatGroupModel, x: Sequence, y: Sequence) -> tuple:
    x, y = vector(x), vector(y)
    n = model.dim
    out = [Fraction(0)] * n
    c = model.structure_constants
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            if yj:
                w = xi * yj
                for k, ck in enumerate(c[i][j]):
                    if ck:
                        out[k] += w * ck
    return tuple(out)


def _eta(model: FlatGroupModel, x: Sequence) -> Matrix:
    if model.eta is None:
        raise InputError("group operations need a model built from a 3-vector")
    return contract(model.eta, model.g, vector(x))


def group_mul(model: FlatGroupModel, x: Sequence, y: Sequence) -> tuple:
    """``g_x g_y = g_{x + y + eta_x y}``."""
    x, y = vector(x), vector(y)
    return vadd(vadd(x, y), _eta(model, x).apply(y))


def group_inverse(model: FlatGroupModel, x: Sequence) -> tuple:
    return tuple(-a for a in vector(x))


def affine_rep(model: FlatGroupModel, x: Sequence) -> AffineIsometry:
    """``g_x = exp [[eta_x, x], [0, 0]] = (Id + eta_x, x)``."""
    x = vector(x)
    n = model.dim
    ex = _eta(model, x)
    block = AffineIsometry(ex, x).homogeneous() - Matrix.diag([0] * n + [1])
    if not (block @ block).is_zero():
        raise ConsistencyError("the generator of g_x is not nilpotent of order 2")
    rep = AffineIsometry(Matrix.identity(n) + ex, x)
    if not rep.is_isometry(model.g):
        raise ConsistencyError("Id + eta_x is not an isometry")
    return rep


def levi_civita(model: FlatGroupModel, x: Sequence) -> Matrix:
    """``D_x`` on left-invariant fields, checked against ``ad_x / 2``."""
    x = vector(x)
    n = model.dim
    d = _combo(model.connection, x, n)
    half_ad = _combo([model.ad(i) for i in range(n)], x, n) * Fraction(1, 2)
    if d != half_ad:
        raise ConsistencyError("D_x != ad_x / 2")
    return d


def _curvature_pair(model: FlatGroupModel, x, y, ads=None) -> tuple:
    n = model.dim
    if ads is None:
        ads = [model.ad(i) for i in range(n)]
    dx = _combo(model.connection, x, n)
    dy = _combo(model.connection, y, n)
    b = lie_bracket(model, x, y)
    direct = dx @ dy - dy @ dx - _combo(model.connection, b, n)
    via_ad = _combo(ads, b, n) * Fraction(-1, 4)
    return direct, via_ad


def curvature(model: FlatGroupModel, x: Sequence, y: Sequence) -> Matrix:
    """``R(x, y) = [D_x, D_y] - D_[x,y]``, checked against ``-ad_[x,y] / 4``."""
    direct, via_ad = _curvature_pair(model, vector(x), vector(y))
    if direct != via_ad:
        raise ConsistencyError("R(x, y) != -ad_[x,y] / 4")
    return direct


@dataclass(frozen=True)
class AlgebraReport:
    antisymmetric: bool
    jacobi: bool
    nilpotency_class: Optional[int]
    biinvariant: bool
    flat: bool
    witness: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            "antisymmetric": self.antisymmetric,
            "jacobi": self.jacobi,
            "nilpotency_class": self.nilpotency_class,
            "biinvariant": self.biinvariant,
            "flat": self.flat,
            "witness": self.witness,
        }


def _nilpotency_class(model: FlatGroupModel) -> Optional[int]:
    """Length of the lower central series; ``None`` when not nilpotent."""
    n = model.dim
    e = [unit(n, i) for i in range(n)]
    term = Subspace.full(n)
    for step in range(1, n + 1):
        nxt = Subspace.span(
            (lie_bracket(model, a, v) for a in e for v in term.vectors()), n
        )
        if nxt.dim == 0:
            return step
        if nxt == term:
            return None
        term = nxt
    return None


def algebra_report(model: FlatGroupModel) -> AlgebraReport:
    """Jacobi identity, nilpotency class, bi-invariance and flatness of a model.

    The result is cached on the (immutable) model.
    """
    if model._report is not None:
        return model._report
    n = model.dim
    c = model.structure_constants
    witness: dict = {}
    antisym = True
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        if any(a + b for a, b in zip(c[i][j], c[j][i])):
            antisym = False
            witness.setdefault("antisymmetry", [i + 1, j + 1])
            break
    ads = [model.ad(i) for i in range(n)]
    # double[i][j] = ad_{[e_i, e_j]}; Jacobi <=> ad_{[x,y]} = [ad_x, ad_y]
    jacobi = True
    for i, j in itertools.combinations(range(n), 2):
        lhs = _combo(ads, c[i][j], n)
        if lhs != ads[i] @ ads[j] - ads[j] @ ads[i]:
            jacobi = False
            witness.setdefault("jacobi", [i + 1, j + 1])
            break
    nil = _nilpotency_class(model) if jacobi and antisym else None
    biinv = True
    for i, m in enumerate(ads):
        if not model.g.is_skew(m):
            biinv = False
            witness.setdefault("biinvariance", i + 1)
            break
    flat = True
    e = [unit(n, i) for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        direct, via_ad = _curvature_pair(model, e[i], e[j], ads)
        if not direct.is_zero():
            flat = False
            witness.setdefault("curvature", [i + 1, j + 1])
            break
        if jacobi and biinv and direct != via_ad:
            raise ConsistencyError("R(e_i, e_j) != -ad_[e_i,e_j] / 4")
    if jacobi and antisym and biinv and flat != (nil is not None and nil <= 2):
        raise ConsistencyError(f"flat={flat} but nilpotency class is {nil}")
    rep = AlgebraReport(antisym, jacobi, nil, biinv, flat, witness or None)
    object.__setattr__(model, "_report", rep)
    return rep


def translation_ideal(model: FlatGroupModel) -> Subspace:
    """Kernel of ``X -> eta_X``; equals the orthogonal complement of the support."""
    if model.eta is None:
        raise InputError("translation ideal needs a model built from a 3-vector")
    n = model.dim
    # column a of the n^2 x n matrix is eta_{e_a} flattened
    flat = [m.flat() for m in model.connection]
    a = Matrix._raw(tuple(tuple(f[r] for f in flat) for r in range(n * n)), n)
    ideal = kernel(a)
    if ideal != orthogonal_complement(support(model.eta, model.g), model.g):
        raise ConsistencyError("ker(X -> eta_X) differs from the complement of the support")
    if ideal.dim < max(model.g.signature):
        raise ConsistencyError("translation ideal smaller than max(k, l)")
    return ideal


def conjugate_action(a: Matrix, eta: ThreeVector, g: ScalarProduct) -> ThreeVector:
    """``a . eta`` for ``a`` in O(V), so that ``(a.eta)_X = a eta_{a^-1 X} a^-1``."""
    a = a if isinstance(a, Matrix) else Matrix(a)
    if not g.is_isometry(a):
        raise InputError("conjugating matrix is not an isometry of the scalar product")
    new = push_forward(a, eta)
    n = g.dim
    a_inv = g.inverse @ a.T @ g.gram
    old = basis_contractions(eta, g)
    for i, m in enumerate(basis_contractions(new, g)):
        expected = a @ _combo(old, a_inv.column(i), n) @ a_inv
        if m != expected:
            raise ConsistencyError(f"conjugation identity fails on e{i + 1}")
    if support(new, g) != image_of(a, support(eta, g)):
        raise ConsistencyError("support does not transform with the isometry")
    return new
