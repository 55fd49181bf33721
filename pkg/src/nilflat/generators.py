"""Seeded samplers for cone elements and rational isometries.

All randomness goes through a ``random.Random`` instance so a seed fixes
every output.  Isometries are products of elementary generators that are
exactly orthogonal over Q: blocks ``(A, A^{-T})`` on split pairs and
isotropic shears ``e -> e + S f`` with ``S`` skew.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .errors import InputError
from .exactlin import Fraction, Matrix, ScalarProduct, inverse
from .multilinear import ThreeVector, pure_type_project, push_forward
from .structures import CompatibleStructure, complex_block, make_structure, split_para

_NUMERATORS = (-3, -2, -1, 1, 2, 3)
_DENOMINATORS = (1, 1, 1, 2, 3)


def random_rational(rng: random.Random, integral: bool = False) -> Fraction:
    den = 1 if integral else rng.choice(_DENOMINATORS)
    return Fraction(rng.choice(_NUMERATORS), den)


def _embed(n: int, blocks: dict) -> Matrix:
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for (i, j), v in blocks.items():
        rows[i][j] = v
    return Matrix(rows)


def random_unimodular(rng: random.Random, m: int, steps: int = 4) -> Matrix:
    """Product of a few integral elementary shears and a permutation."""
    a = Matrix.identity(m)
    if m == 0:
        return a
    perm = list(range(m))
    rng.shuffle(perm)
    a = Matrix([[int(perm[i] == j) for j in range(m)] for i in range(m)])
    for _ in range(steps if m > 1 else 0):
        i, j = rng.sample(range(m), 2)
        a = _embed(m, {(i, j): Fraction(rng.choice((-1, 1)))}) @ a
    return a


def random_complex_unimodular(rng: random.Random, m: int, steps: int = 3) -> Matrix:
    """Real form of an integral complex-linear shear product on ``m = 2r`` coordinates
    (commutes with the rotation blocks of :func:`complex_block`)."""
    a = Matrix.identity(m)
    r = m // 2
    for _ in range(steps if r > 1 else 0):
        i, j = rng.sample(range(r), 2)
        x, y = rng.choice((-1, 0, 1)), rng.choice((-1, 1))
        blocks = {
            (2 * i, 2 * j): Fraction(x), (2 * i, 2 * j + 1): Fraction(-y),
            (2 * i + 1, 2 * j): Fraction(y), (2 * i + 1, 2 * j + 1): Fraction(x),
        }
        a = _embed(m, blocks) @ a
    return a


def _split_block(a: Matrix, n: int, m: int) -> Matrix:
    """``diag(a, a^{-T}, Id)`` on ``e_1..e_m, f_1..f_m, rest``."""
    inv_t = inverse(a).T
    blocks = {}
    for i in range(m):
        for j in range(m):
            blocks[(i, j)] = a[i, j]
            blocks[(m + i, m + j)] = inv_t[i, j]
    return _embed(n, blocks)


def random_isometry(rng: random.Random, g: ScalarProduct, integral: bool = True) -> Matrix:
    """Random element of O(g) for a ``split(k, l)`` Gram matrix."""
    k, l = g.signature
    m = min(k, l)
    n = g.dim
    if g != ScalarProduct.split(k, l):
        raise InputError("random isometries are generated for split(k, l) forms only")
    out = _split_block(random_unimodular(rng, m), n, m)
    if m >= 2:
        for lower in (True, False):
            i, j = rng.sample(range(m), 2)
            s = random_rational(rng, integral)
            # skew S: e_j -> e_j + s f_i, e_i -> e_i - s f_j (or the mirror shear on f)
            if lower:
                shear = _embed(n, {(m + i, j): s, (m + j, i): -s})
            else:
                shear = _embed(n, {(i, m + j): s, (j, m + i): -s})
            out = shear @ out
    return out


def _random_combination(rng: random.Random, n: int, indices: list, integral: bool) -> dict:
    terms = {}
    for triple in itertools.combinations(indices, 3):
        if rng.random() < 0.7:
            terms[triple] = random_rational(rng, integral)
    return terms


def random_cone_element(rng: random.Random, g: ScalarProduct, integral: bool = False,
                        conjugate: bool = True) -> ThreeVector:
    """Random ``eta`` in Lambda^3 L for a random maximal isotropic ``L``.

    ``g`` must be a ``split(k, l)`` form; ``L`` starts as ``span{f}`` and is
    moved by a random isometry.
    """
    k, l = g.signature
    m = min(k, l)
    n = g.dim
    size = rng.randint(min(3, m), m)
    eta = ThreeVector(n, _random_combination(rng, n, list(range(m + 1, m + size + 1)), integral))
    if conjugate:
        eta = push_forward(random_isometry(rng, g, integral=True), eta)
    return eta


def random_three_vector(rng: random.Random, n: int, density: float = 0.3) -> ThreeVector:
    """Arbitrary (generally not isotropic) 3-vector."""
    terms = {t: random_rational(rng) for t in itertools.combinations(range(1, n + 1), 3)
             if rng.random() < density}
    return ThreeVector(n, terms)


@dataclass(frozen=True)
class Sample:
    eta: ThreeVector
    g: ScalarProduct
    structure: CompatibleStructure
    type_pq: tuple


def standard_setting(signature: tuple, epsilon: int) -> tuple:
    """``(g, structure)`` used by :func:`gen_random`.

    ``eps = +1``: ``split(m, m)`` with ``tau e = -e``, ``tau f = f``.
    ``eps = -1``: ``split(m, m)`` (``m`` even) with rotation blocks.
    """
    k, l = signature
    if k != l:
        raise InputError("compatible structures need split signature (m, m)")
    g = ScalarProduct.split(k, l)
    if epsilon == 1:
        return g, make_structure(split_para(k), g, 1)
    if epsilon == -1:
        if k % 2:
            raise InputError("eps = -1 needs signature (m, m) with m even")
        return g, make_structure(complex_block(2 * k), g, -1)
    raise InputError(f"epsilon must be +1 or -1, got {epsilon!r}")


def gen_random(seed, signature: tuple, type_pq: tuple, epsilon: int,
               conjugate: bool = True, integral: bool = False,
               rng: Optional[random.Random] = None) -> Sample:
    """Sample ``eta`` in the pure-type part of an invariant isotropic ``L``.

    ``eps = +1``: ``L = span{f_1..f_p} + span{e_{p+1}..e_{p+q}}`` and
    ``eta`` in Lambda^3 L^+ + Lambda^3 L^-.
    ``eps = -1``: ``type_pq = (r, 0)`` with ``r`` the complex dimension of
    ``L = span{f_1..f_2r}``; ``eta`` is the (3,0)+(0,3) part of a random
    element of Lambda^3 L.
    Optionally conjugated by a random isometry commuting with the structure.
    """
    rng = rng or random.Random(seed)
    g, structure = standard_setting(signature, epsilon)
    m = signature[0]
    n = 2 * m
    p, q = type_pq
    if p < 0 or q < 0:
        raise InputError("type entries must be non-negative")
    if epsilon == 1:
        if p + q > m:
            raise InputError(f"type {type_pq} does not fit a maximal isotropic subspace of dim {m}")
        plus = list(range(m + 1, m + p + 1))  # f_1..f_p
        minus = list(range(p + 1, p + q + 1))  # e_{p+1}..e_{p+q}
        terms = _random_combination(rng, n, plus, integral)
        terms.update(_random_combination(rng, n, minus, integral))
        eta = ThreeVector(n, terms)
        twist = _split_block(random_unimodular(rng, m), n, m) if conjugate else None
    else:
        if q != 0 or 2 * p > m:
            raise InputError(f"type {type_pq} is not feasible for eps = -1 in dimension {n}")
        eta0 = ThreeVector(n, _random_combination(rng, n, list(range(m + 1, m + 2 * p + 1)),
                                                  integral))
        eta, _ = pure_type_project(eta0, g, structure)
        twist = _split_block(random_complex_unimodular(rng, m), n, m) if conjugate else None
    if twist is not None:
        eta = push_forward(twist, eta)
    return Sample(eta, g, structure, (p, q))
