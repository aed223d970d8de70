from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phi3matrix import MPoly
from phi3matrix.errors import InputError

ARITY = 3

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
monomials = st.tuples(*[st.integers(0, 3)] * ARITY)
polys = st.dictionaries(monomials, fractions, max_size=5).map(lambda d: MPoly(ARITY, d))


def x(i, arity=2):
    return MPoly.var(i, arity)


def test_product_of_variables():
    assert x(1) * x(2) == MPoly(2, {(1, 1): 1})


def test_difference_is_zero_polynomial():
    p = x(1) + x(2)
    assert (p - p).is_zero()
    assert len(p - p) == 0


def test_square_expansion_and_evaluation():
    p = (MPoly.var(1, 1) + 1) ** 2
    assert p == MPoly(1, {(2,): 1, (1,): 2, (0,): 1})
    assert p.evaluate([3]) == 16


def test_no_zero_coefficients_stored():
    p = MPoly(2, {(1, 0): Fraction(1, 2), (0, 1): 0})
    assert [m for m, _ in p.terms] == [(1, 0)]


def test_term_order_degree_then_lex():
    p = x(1) ** 2 + x(2) + x(1) * x(2) + 1
    degrees = [sum(m) for m, _ in p.terms]
    assert degrees == sorted(degrees)


def test_arity_mismatch():
    with pytest.raises(InputError):
        MPoly.var(1, 2) + MPoly.var(1, 3)
    with pytest.raises(InputError):
        MPoly(2, {(1,): 1})


def test_extend_keeps_coefficients():
    p = x(1) * 3
    assert p.extend(4).coefficient((1, 0, 0, 0)) == 3


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == MPoly.zero(ARITY)


@given(polys, polys, st.lists(fractions, min_size=ARITY, max_size=ARITY))
def test_evaluation_is_a_homomorphism(a, b, vals):
    assert (a * b).evaluate(vals) == a.evaluate(vals) * b.evaluate(vals)
    assert (a + b).evaluate(vals) == a.evaluate(vals) + b.evaluate(vals)


@given(fractions, fractions, fractions, fractions)
def test_rational_sums_are_association_independent(p, q, r, s):
    one = MPoly.const(1, 1)
    left = (one * p + one * q) + (one * r + one * s)
    right = one * p + (one * q + (one * r + one * s))
    assert left == right
    assert left.terms == right.terms
