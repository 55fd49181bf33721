import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import e, small_ints, vectors
from nilflat.errors import InputError, NotInConeError
from nilflat.exactlin import Matrix, ScalarProduct, Subspace, orthogonal_complement, unit
from nilflat.flatgroup import (
    FlatGroupModel,
    affine_rep,
    algebra_report,
    build_model,
    conjugate_action,
    curvature,
    group_inverse,
    group_mul,
    levi_civita,
    lie_bracket,
    translation_ideal,
)
from nilflat.generators import random_cone_element, random_isometry
from nilflat.multilinear import ThreeVector, contract, push_forward, support

SIGNATURES = [(3, 3), (4, 4), (4, 6), (5, 5)]


def cone_model(seed, sig):
    g = ScalarProduct.split(*sig)
    return build_model(random_cone_element(random.Random(seed), g), g)


@pytest.fixture
def golden(g33, golden_eta):
    return build_model(golden_eta, g33)


def test_golden_brackets(golden):
    f1, f2, f3 = e(4), e(5), e(6)
    two = lambda v: tuple(2 * x for x in v)
    assert lie_bracket(golden, e(1), e(2)) == two(f3)
    assert lie_bracket(golden, e(2), e(3)) == two(f1)
    assert lie_bracket(golden, e(3), e(1)) == two(f2)
    for i in range(1, 7):
        for j in range(4, 7):
            assert not any(lie_bracket(golden, e(i), e(j)))


def test_golden_report(golden):
    rep = algebra_report(golden)
    assert rep.jacobi and rep.biinvariant and rep.flat and rep.antisymmetric
    assert rep.nilpotency_class == 2
    ideal = translation_ideal(golden)
    assert ideal == Subspace.span([e(4), e(5), e(6)], 6)


def test_zero_eta_gives_abelian_group(g33):
    m = build_model(ThreeVector.zero(6), g33)
    assert algebra_report(m).nilpotency_class == 1
    assert translation_ideal(m).dim == 6


def test_non_cone_rejected_with_witness(g33):
    with pytest.raises(NotInConeError) as info:
        build_model(ThreeVector(6, {(1, 2, 4): 1}), g33)
    assert info.value.witness == (1, 4)


@given(st.integers(0, 10**6), st.sampled_from(SIGNATURES), st.data())
def test_group_axioms(seed, sig, data):
    m = cone_model(seed, sig)
    n = m.dim
    x, y, z = (data.draw(vectors(n, small_ints)) for _ in range(3))
    assert group_mul(m, group_mul(m, x, y), z) == group_mul(m, x, group_mul(m, y, z))
    zero = (Fraction(0),) * n
    assert group_mul(m, x, group_inverse(m, x)) == zero
    assert group_mul(m, zero, y) == tuple(Fraction(c) for c in y)
    # group commutator equals the Lie bracket in a 2-step group
    xy = group_mul(m, x, y)
    comm = group_mul(m, group_mul(m, xy, group_inverse(m, x)), group_inverse(m, y))
    assert comm == lie_bracket(m, x, y)


@given(st.integers(0, 10**6), st.sampled_from(SIGNATURES[:2]), st.data())
def test_affine_rep_homomorphism_against_matrix_products(seed, sig, data):
    m = cone_model(seed, sig)
    n = m.dim
    x, y = (data.draw(vectors(n, small_ints)) for _ in range(2))
    ax, ay = affine_rep(m, x), affine_rep(m, y)
    axy = affine_rep(m, group_mul(m, x, y))
    assert oracles.affine(ax.linear, ax.translation) * oracles.affine(ay.linear, ay.translation) \
        == oracles.affine(axy.linear, axy.translation)
    assert ax @ ay == axy
    # the orbit map sends g_x to x
    assert ax((0,) * n) == tuple(Fraction(c) for c in x)
    # g_x = exp of a nilpotent block
    block = sp.zeros(n + 1, n + 1)
    block[:n, :n] = oracles.smat(contract(m.eta, m.g, x))
    block[:n, n] = oracles.svec(x)
    assert block.exp() == oracles.affine(ax.linear, ax.translation)


@given(st.integers(0, 10**6), st.sampled_from(SIGNATURES))
def test_cone_models_are_flat_two_step(seed, sig):
    m = cone_model(seed, sig)
    rep = algebra_report(m)
    assert rep.jacobi and rep.biinvariant and rep.flat
    assert rep.nilpotency_class in (1, 2)
    ideal = translation_ideal(m)
    assert ideal == orthogonal_complement(support(m.eta, m.g), m.g)
    assert ideal.dim >= max(sig)


def test_connection_and_curvature_golden(golden):
    d1 = levi_civita(golden, e(1))
    assert d1.apply(e(2)) == e(6)
    assert curvature(golden, e(1), e(2)).is_zero()


def _so3():
    # [e1, e2] = e3 and cyclic; the identity metric is bi-invariant
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        c[i][j][k] = 1
        c[j][i][k] = -1
    return FlatGroupModel.from_structure_constants(c, ScalarProduct(Matrix.identity(3)))


def test_non_nilpotent_table_flagged():
    m = _so3()
    rep = algebra_report(m)
    assert rep.jacobi and rep.biinvariant
    assert rep.nilpotency_class is None
    assert not rep.flat and rep.witness["curvature"] == [1, 2]
    # R = -ad_[x,y] / 4 even when non-zero
    assert curvature(m, unit(3, 0), unit(3, 1)) == m.ad(2) * Fraction(-1, 4)


def test_broken_tables_flagged():
    n = 4
    g = ScalarProduct.split(2)
    # Heisenberg-type table whose metric is not ad-invariant
    c = [[[0] * n for _ in range(n)] for _ in range(n)]
    c[0][1][2], c[1][0][2] = 1, -1
    rep = algebra_report(FlatGroupModel.from_structure_constants(c, g))
    assert rep.jacobi and not rep.biinvariant
    # not antisymmetric
    c2 = [[[0] * n for _ in range(n)] for _ in range(n)]
    c2[0][1][3] = 1
    rep2 = algebra_report(FlatGroupModel.from_structure_constants(c2, g))
    assert not rep2.antisymmetric and rep2.witness["antisymmetry"] == [1, 2]
    # Jacobi fails: [e1,e2]=e3, [e2,e3]=e4, [e1,e3]=e1
    c3 = [[[0] * n for _ in range(n)] for _ in range(n)]
    for (i, j, k) in [(0, 1, 2), (1, 2, 3), (0, 2, 0)]:
        c3[i][j][k], c3[j][i][k] = 1, -1
    assert not algebra_report(FlatGroupModel.from_structure_constants(c3, g)).jacobi


def test_group_ops_need_eta():
    with pytest.raises(InputError):
        group_mul(_so3(), (1, 0, 0), (0, 1, 0))


@given(st.integers(0, 10**6))
def test_conjugation_equivariance(seed):
    rng = random.Random(seed)
    g = ScalarProduct.split(4)
    eta = random_cone_element(rng, g, conjugate=False)
    a = random_isometry(rng, g)
    moved = conjugate_action(a, eta, g)
    assert moved == push_forward(a, eta)
    m, m2 = build_model(eta, g), build_model(moved, g)
    x, y = (tuple(rng.randint(-2, 2) for _ in range(8)) for _ in range(2))
    assert lie_bracket(m2, a.apply(x), a.apply(y)) == a.apply(lie_bracket(m, x, y))


def test_conjugation_rejects_non_isometry(g33, golden_eta):
    with pytest.raises(InputError):
        conjugate_action(Matrix.identity(6) * 2, golden_eta, g33)


def test_affine_rep_is_isometry_with_translation(golden):
    x = (1, 2, 0, -1, 0, 3)
    rep = affine_rep(golden, x)
    assert golden.g.is_isometry(rep.linear)
    y = (0, 1, 1, 0, 0, 0)
    assert rep(y) == group_mul(golden, x, y)
