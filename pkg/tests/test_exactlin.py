from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import rationals, small_ints
from oracles import signature as sig_oracle
from oracles import smat
from nilflat.errors import InputError
from nilflat.exactlin import (
    Matrix,
    ScalarProduct,
    Subspace,
    as_fraction,
    congruence_diagonal,
    intersect,
    inverse,
    kernel,
    orthogonal_complement,
    rank,
    rref,
    solve,
)


def matrices(rows, cols, elements=small_ints):
    return st.lists(st.lists(elements, min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows).map(lambda r: Matrix(r, ncols=cols))


shapes = st.tuples(st.integers(1, 5), st.integers(1, 6))


@st.composite
def any_matrix(draw, elements=small_ints):
    r, c = draw(shapes)
    return draw(matrices(r, c, elements))


def test_as_fraction_accepts_exact_inputs():
    assert as_fraction("1/2") == Fraction(1, 2)
    assert as_fraction(" -3 ") == -3
    assert as_fraction(Fraction(2, 4)) == Fraction(1, 2)


@pytest.mark.parametrize("bad", [0.5, True, "1/0", "x", None, [1]])
def test_as_fraction_rejects(bad):
    with pytest.raises(InputError):
        as_fraction(bad)


def test_matrix_arithmetic_small():
    a = Matrix([[1, 2], [3, 4]])
    b = Matrix([[0, 1], [1, 0]])
    assert a @ b == Matrix([[2, 1], [4, 3]])
    assert a + b - b == a
    assert (a * Fraction(1, 2))[1, 1] == 2
    assert a.T == Matrix([[1, 3], [2, 4]])
    assert a @ [1, 1] == (3, 7)
    with pytest.raises(InputError):
        a @ Matrix([[1, 2, 3]])


def test_ragged_rows_rejected():
    with pytest.raises(InputError):
        Matrix([[1, 2], [3]])


@given(any_matrix())
def test_rank_and_rref_against_sympy(a):
    r, pivots = rref(a)
    ref, ref_pivots = smat(a).rref()
    nonzero = [list(ref.row(i)) for i in range(ref.rows) if any(ref.row(i))]
    assert r.nrows == len(nonzero)
    if nonzero:
        assert smat(r).tolist() == nonzero
    assert tuple(pivots) == tuple(ref_pivots)
    assert rank(a) == smat(a).rank()


@given(any_matrix())
def test_kernel_is_annihilated_and_complete(a):
    k = kernel(a)
    assert k.dim == a.ncols - rank(a)
    for v in k.vectors():
        assert all(x == 0 for x in a.apply(v))


@given(st.integers(1, 5).flatmap(lambda n: matrices(n, n)))
def test_inverse_against_sympy(a):
    assume(smat(a).det() != 0)
    inv = inverse(a)
    assert smat(inv) == smat(a).inv()
    assert a @ inv == Matrix.identity(a.nrows)


def test_inverse_of_singular_raises():
    with pytest.raises(InputError):
        inverse(Matrix([[1, 2], [2, 4]]))


@given(any_matrix(), st.data())
def test_solve_consistent_systems(a, data):
    x = data.draw(st.lists(rationals, min_size=a.ncols, max_size=a.ncols))
    b = a.apply(x)
    sol = solve(a, b)
    assert sol is not None
    assert a.apply(sol.particular) == b
    for v in sol.kernel.vectors():
        assert all(c == 0 for c in a.apply(v))


def test_solve_inconsistent_returns_none():
    assert solve(Matrix([[1, 1], [2, 2]]), [1, 3]) is None


def test_solve_length_mismatch():
    with pytest.raises(InputError):
        solve(Matrix([[1, 1]]), [1, 2])


@given(st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.lists(st.lists(small_ints, min_size=n, max_size=n), max_size=4),
                        st.lists(st.lists(small_ints, min_size=n, max_size=n), max_size=4),
                        st.just(n))))
def test_subspace_dimension_formula(args):
    us, ws, n = args
    u, w = Subspace.span(us, n), Subspace.span(ws, n)
    both = intersect(u, w)
    assert both.dim == u.dim + w.dim - (u + w).dim
    assert both.issubspace(u) and both.issubspace(w)
    for v in both.vectors():
        assert v in u and v in w


def test_subspace_equality_is_basis_independent():
    a = Subspace.span([[1, 1, 0], [0, 1, 1]], 3)
    b = Subspace.span([[1, 2, 1], [1, 0, -1]], 3)
    assert a == b
    assert Subspace.zero(3).dim == 0 and Subspace.full(3).dim == 3


@st.composite
def symmetric(draw):
    n = draw(st.integers(1, 5))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = draw(small_ints)
    return Matrix(rows)


@given(symmetric())
def test_signature_against_characteristic_polynomial(gram):
    assume(smat(gram).det() != 0)
    g = ScalarProduct(gram)
    assert g.signature == sig_oracle(gram)
    d = congruence_diagonal(gram)
    assert sum(1 for x in d if x > 0) == g.signature[0]


def test_degenerate_and_nonsymmetric_rejected():
    with pytest.raises(InputError):
        ScalarProduct(Matrix([[1, 0], [0, 0]]))
    with pytest.raises(InputError):
        ScalarProduct(Matrix([[1, 1], [0, 1]]))


@pytest.mark.parametrize("k,l", [(3, 3), (4, 6), (5, 2), (0, 3), (2, 0)])
def test_split_presets(k, l):
    g = ScalarProduct.split(k, l)
    assert g.signature == (k, l)
    assert g.signature == sig_oracle(g.gram)
    m = min(k, l)
    for i in range(m):
        assert g.pair(_u(g.dim, i), _u(g.dim, m + i)) == 1
        assert g.pair(_u(g.dim, i), _u(g.dim, i)) == 0


def _u(n, i):
    return tuple(int(j == i) for j in range(n))


@given(st.integers(0, 3), st.data())
def test_orthogonal_complement(k, data):
    g = ScalarProduct.split(3, 3)
    vs = data.draw(st.lists(st.lists(small_ints, min_size=6, max_size=6), max_size=k))
    u = Subspace.span(vs, 6)
    perp = orthogonal_complement(u, g)
    assert perp.dim == 6 - u.dim
    for a in u.vectors():
        for b in perp.vectors():
            assert g.pair(a, b) == 0
    assert orthogonal_complement(perp, g) == u


def test_isometry_and_skew_predicates():
    g = ScalarProduct.split(1, 1)
    assert g.is_isometry(Matrix([[2, 0], [0, Fraction(1, 2)]]))
    assert not g.is_isometry(Matrix([[2, 0], [0, 2]]))
    assert g.is_skew(Matrix([[1, 0], [0, -1]]))
    assert sp.Matrix([[0, 1], [1, 0]]) == smat(g.gram)
