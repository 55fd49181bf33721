import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nilflat.exactlin import ScalarProduct, unit
from nilflat.multilinear import ThreeVector
from nilflat.structures import make_structure, split_para

settings.register_profile(
    "nilflat",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("nilflat")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)
small_ints = st.integers(min_value=-3, max_value=3)


def vectors(n, elements=rationals):
    return st.lists(elements, min_size=n, max_size=n).map(tuple)


def e(i, n=6):
    """1-based e_i of the split(3,3) basis (f_j is e(3 + j))."""
    return unit(n, i - 1)


@pytest.fixture
def g33():
    return ScalarProduct.split(3)


@pytest.fixture
def golden_eta():
    return ThreeVector(6, {(4, 5, 6): 1})


@pytest.fixture
def tau33(g33):
    return make_structure(split_para(3), g33, 1)


@pytest.fixture
def rng():
    return random.Random(20240611)


def frac(*xs):
    return tuple(Fraction(x) for x in xs)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {line}")
