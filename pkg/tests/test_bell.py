import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phi3matrix import (
    Jet,
    MPoly,
    bell_partial,
    bell_partial_definition,
    double_factorial,
    gamma_closed,
    gamma_recursive,
    verify_bell_identity_1,
    verify_conjecture,
    verify_footnote_identity,
)
from phi3matrix.bell import bell_symbolic, conjecture_sides, footnote_sides
from phi3matrix.errors import InputError


@pytest.mark.parametrize("n,expected", [(5, 15), (-1, 1), (0, 1), (9, 945), (8, 384)])
def test_double_factorial(n, expected):
    assert double_factorial(n) == expected


def test_double_factorial_rejects_below_minus_one():
    with pytest.raises(InputError):
        double_factorial(-2)


def test_bell_empty_argument_list():
    assert bell_partial(0, 0, []) == 1
    assert bell_partial(0, 1, []) == 0


def test_bell_all_singletons():
    x1 = MPoly.var(1, 1)
    assert bell_partial(4, 4, [x1]) == x1**4


def test_bell_three_two():
    x1, x2 = MPoly.var(1, 2), MPoly.var(2, 2)
    assert bell_partial(3, 2, [x1, x2]) == 3 * x1 * x2


def test_bell_k_above_n_is_zero():
    assert bell_partial(2, 3, [Fraction(1), Fraction(2)]) == 0


@pytest.mark.parametrize("n", range(0, 8))
def test_recurrence_matches_definition(n):
    arity = n + 1
    xs = [MPoly.var(i, arity) for i in range(1, arity + 1)]
    for k in range(0, n + 1):
        assert bell_symbolic(n, k, arity) == bell_partial_definition(n, k, xs)
        assert bell_partial(n, k, xs) == bell_symbolic(n, k, arity)


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=5, max_size=5), st.integers(1, 4))
def test_generating_function(xs, n):
    # sum_k B_{n,k} u^k = n! [t^n] exp(u sum_j x_j t^j / j!)
    for u in (Fraction(1), Fraction(-2, 3)):
        inner = [Fraction(0)] + [u * xs[j - 1] / _fact(j) for j in range(1, n + 1)]
        series = Jet(inner).exp()
        lhs = sum(bell_partial(n, k, xs) * u**k for k in range(0, n + 1))
        assert lhs == series[n] * _fact(n)


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


@pytest.mark.parametrize("args", [(1, 0, 1, 0), (4, 1, 2, 3)])
def test_bell_identity_examples(args):
    assert verify_bell_identity_1(*args)


def test_bell_identity_mutation_fails():
    arity = 5 - 2
    x1 = MPoly.var(1, arity)
    assert not verify_bell_identity_1(5, 2, 1, 1, perturbation=x1**5)


def test_bell_identity_sweep_small():
    vals = (0, 1, -1, 2, 3)
    for n in range(1, 6):
        for k in range(n):
            for a, b in itertools.product(vals, vals):
                assert verify_bell_identity_1(n, k, a, b), (n, k, a, b)


def test_gamma_initial_conditions():
    assert gamma_closed(3, 0) == (MPoly.const(1, gamma_closed(3, 0)[0].arity), 0)
    poly, power = gamma_closed(6, 3)
    assert power == 3 and poly == 1


def test_gamma_four_by_hand():
    # rho_0 g^0_4 + 3 rho_1 g^1_4 = 0 with g^1_4 = 1/rho_0 gives g^0_4 = -3 rho_1 / rho_0^2
    table = gamma_recursive(4)
    for rho0, rho1 in ((Fraction(2), Fraction(5)), (Fraction(-1, 3), Fraction(7, 2))):
        vals = table.evaluate(rho0, _xs([rho0, rho1]))
        assert vals[1] == 1 / rho0
        assert vals[0] == -3 * rho1 / rho0**2


def _xs(rhos):
    from phi3matrix.bell import x_from_moments

    return x_from_moments(rhos)


@pytest.mark.parametrize("B", range(3, 8))
def test_gamma_recursive_equals_closed(B):
    table = gamma_recursive(B)
    for M in range(B - 2):
        assert table[M] == gamma_closed(B, M)


def test_gamma_out_of_range():
    with pytest.raises(InputError):
        gamma_closed(5, 3)


@pytest.mark.parametrize("l,counts", [(0, [4]), (2, [2, 1])])
def test_conjecture_examples(l, counts):
    assert verify_conjecture(l, counts)


def test_conjecture_mutation_fails():
    assert not verify_conjecture(0, [4], mutate=True)


def test_conjecture_empty_range_is_zero_on_both_sides():
    lhs, rhs = conjecture_sides(3, [1])
    assert lhs.is_zero() and rhs.is_zero()


@pytest.mark.parametrize("m,counts", [(0, []), (0, [0, 0]), (2, [1]), (1, [2, 1])])
def test_footnote_examples(m, counts):
    assert verify_footnote_identity(m, counts)


def test_footnote_empty_case_by_hand():
    lhs, rhs = footnote_sides(0, [])
    assert lhs == rhs == Fraction(1, 4)
