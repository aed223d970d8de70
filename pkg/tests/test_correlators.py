import itertools
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import W_LAM03_X4
from phi3matrix import (
    BoundarySpec,
    G1,
    G2,
    GN_single_boundary,
    G_1plus1,
    G_1plus1plus1,
    G_1plusTower,
    G_1plusTower_ansatz,
    G_multi_boundary,
    Provenance,
    W,
    W_jet,
    X_of_x,
    evaluate,
    solve_c,
)
from phi3matrix.errors import DomainError, InputError, SingularityError
from phi3matrix.spectral import Coupling

LOG2 = math.log(2)


@pytest.fixture(scope="module")
def cp3():
    return solve_c(lam=0.3)


@pytest.fixture(scope="module")
def cp2():
    return solve_c(lam=0.2)


@pytest.fixture(scope="module")
def free():
    return solve_c(0)


@given(st.floats(-0.24, 0.24))
def test_normalisation_real_and_imaginary_branches(lam2):
    assert abs(W(solve_c(lam2), 1.0) - 1) < 1e-12


def test_free_W(free):
    assert W(free, 9.0) == 3


def test_W_against_ansatz_quadrature(cp3):
    assert abs(W(cp3, 4.0) - W_LAM03_X4) < 1e-8


def test_W_custom_spectrum_path_matches_closed_form(cp3):
    from phi3matrix import EigenvalueFunction

    ident = EigenvalueFunction.custom(lambda x: x, lambda x: 1.0, lambda y: y)
    cp = solve_c(lam=0.3, e=ident)
    assert abs(W(cp, 4.0) - W(cp3, 4.0)) < 1e-8
    assert abs(W_jet(cp, 4.0, 2)[1] - W_jet(cp3, 4.0, 2)[1]) < 1e-8


def test_W_on_cut(cp3):
    with pytest.raises(DomainError):
        W(cp3, -2.0)


def test_W_jet(cp3, free):
    j = W_jet(cp3, 2.0, 3)
    assert j[0] == W(cp3, 2.0)
    assert W_jet(free, 4.0, 1)[1] == pytest.approx(0.25, abs=1e-15)
    h = 1e-4
    fd = (-W(cp3, 2 + 2 * h) + 8 * W(cp3, 2 + h) - 8 * W(cp3, 2 - h) + W(cp3, 2 - 2 * h)) / (12 * h)
    assert abs(j[1] - fd) < 1e-7


def test_G1_renormalised(cp3, free):
    assert G1(cp3, 0.0) == pytest.approx(0, abs=1e-15)
    assert G1(free, 3.0) == 0


def test_G1_small_coupling_expansion():
    lam = 0.1
    u = 1 / 3
    series = (
        lam * LOG2 * u
        + lam**3 * LOG2**2 * (u - u**3)
        + lam**5 * (LOG2**2 * u + (2 * LOG2**3 - LOG2**2) * u**3 - 2 * LOG2**3 * u**5)
    )
    assert abs(G1(solve_c(lam=lam), 1.0) - series) < 1e-6


def test_G2_free(free):
    for X, Y in ((4.0, 9.0), (2.0, 7.5)):
        assert G2(free, X, Y) == pytest.approx(2 / (math.sqrt(X) + math.sqrt(Y)), rel=1e-14)
    assert G2(free, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_G2_diagonal(cp3):
    h = 1e-4
    fd = (-W(cp3, 4 + 2 * h) + 8 * W(cp3, 4 + h) - 8 * W(cp3, 4 - h) + W(cp3, 4 - 2 * h)) / (12 * h)
    assert abs(G2(cp3, 4.0, 4.0) - 2 * fd) < 1e-7


@given(st.floats(1.0, 50.0), st.floats(1.0, 50.0))
def test_G2_symmetric(X, Y):
    cp = solve_c(lam=0.3)
    assert G2(cp, X, Y) == G2(cp, Y, X)


def test_GN_two_is_G2(cp3):
    assert GN_single_boundary(cp3, [4.0, 9.0]) == G2(cp3, 4.0, 9.0)


def test_GN_three_with_repeated_argument(cp2):
    X, Y = 4.0, 2.0
    # 8 lambda d/dY (W(X) - W(Y))/(X - Y) from the W jet
    wj = W_jet(cp2, Y, 1)
    q = (W(cp2, X) - wj[0]) / (X - Y)
    dq = (q - wj[1]) / (X - Y)
    assert abs(GN_single_boundary(cp2, [X, Y, Y]) - 8 * cp2.lam * dq) < 1e-8


@given(st.permutations([1.5, 4.0, 9.0, 20.0, 2.25]))
def test_GN_permutation_invariant(perm):
    cp = solve_c(lam=0.3)
    ref = GN_single_boundary(cp, [1.5, 4.0, 9.0, 20.0, 2.25])
    assert abs(GN_single_boundary(cp, perm) - ref) <= 1e-12 * abs(ref)


def test_GN_needs_two(cp3):
    with pytest.raises(InputError):
        GN_single_boundary(cp3, [4.0])


def test_G11(cp3, free):
    assert G_1plus1(free, 4.0, 9.0) == 0
    X = 1 - cp3.c.real
    assert G_1plus1(cp3, X, X) == pytest.approx(cp3.lam2.real, rel=1e-14)


def test_G111_free_and_tower(cp3, free):
    assert G_1plus1plus1(free, 2.0, 3.0, 4.0) == 0
    args = [2.0, 5.0, 9.0]
    a = G_1plus1plus1(cp3, *args)
    b = G_1plusTower(cp3, args)
    assert abs(a - b) <= 1e-12 * abs(a)


def test_G111_extended_precision_plugin(cp2):
    with mpmath.workdps(30):
        lam2 = mpmath.mpf("0.2") ** 2
        s = mpmath.findroot(lambda s: s + 2 * lam2 * mpmath.log(1 + 1 / s) - 1, 0.94)
        c = s * s - 1
        rho0 = 1 - 2 * lam2 / (s * (s + 1))
        ref = -32 * mpmath.mpf("0.2") ** 5 / (rho0 * (1 + c) ** mpmath.mpf(4.5))
    assert abs(G_1plus1plus1(cp2, 1.0, 1.0, 1.0) - complex(ref)) < 1e-15


def test_G111_at_critical_point():
    fake = Coupling(0.49 + 0j, 0.2401 + 0j, -0.87 + 0j, 0j)
    with pytest.raises(SingularityError):
        G_1plus1plus1(fake, 2.0, 3.0, 4.0)
    with pytest.raises(SingularityError):
        G_1plusTower(fake, [2.0, 3.0, 4.0, 5.0])


def test_tower_four_against_ansatz(cp2):
    a = G_1plusTower(cp2, [1.0] * 4)
    b = G_1plusTower_ansatz(cp2, [1.0] * 4)
    assert abs(a - b) <= 1e-10 * abs(a)


def test_tower_bounds(cp3):
    with pytest.raises(InputError):
        G_1plusTower(cp3, [2.0, 3.0])
    with pytest.raises(InputError):
        G_1plusTower(cp3, [2.0] * 13)


@pytest.mark.parametrize("B", [3, 4, 5])
def test_tower_parity_in_lambda(B):
    # (-2 lambda)^(3B-4) fixes the parity to that of B
    args = [2.0 + k for k in range(B)]
    plus = G_1plusTower(solve_c(lam=0.3), args)
    minus = G_1plusTower(solve_c(lam=-0.3), args)
    assert abs(minus - (-1) ** B * plus) <= 1e-13 * abs(plus)


def test_multi_boundary_single_boundary(cp3):
    xs = (4.0, 9.0, 16.0)
    assert G_multi_boundary(cp3, BoundarySpec((xs,))) == GN_single_boundary(cp3, xs)


def test_multi_boundary_two_one_by_hand(cp3):
    X1, X2, Y = 4.0, 9.0, 16.0
    hand = cp3.lam * (G_1plus1(cp3, X1, Y) - G_1plus1(cp3, X2, Y)) * 4 / (X1 - X2)
    val = G_multi_boundary(cp3, BoundarySpec(((X1, X2), (Y,))))
    assert abs(val - hand) <= 1e-12 * abs(hand)


def test_multi_boundary_free(free):
    assert G_multi_boundary(free, BoundarySpec(((2.0, 3.0, 4.0), (5.0, 6.0)))) == 0


def test_multi_boundary_symmetries(cp3):
    spec = ((2.0, 5.0), (3.0, 7.0, 11.0), (4.0,))
    ref = G_multi_boundary(cp3, BoundarySpec(spec))
    for perm in itertools.permutations(spec):
        v = G_multi_boundary(cp3, BoundarySpec(perm))
        assert abs(v - ref) <= 1e-12 * abs(ref)
    rotated = (spec[0], spec[1][1:] + spec[1][:1], spec[2])
    assert abs(G_multi_boundary(cp3, BoundarySpec(rotated)) - ref) <= 1e-12 * abs(ref)


def _richardson(f, k_range=(3, 4, 5, 6)):
    """Limit of f(h) as h -> 0 from samples at h = 10^-k (error linear in h)."""
    vals = [f(10.0**-k) for k in k_range]
    # h ratio 10: one Richardson step removes the O(h) term
    ext = [(10 * b - a) / 9 for a, b in zip(vals, vals[1:])]
    return ext[-2]


def test_coincidence_limit_GN(cp3):
    X, Y = 4.0, 9.0
    exact = GN_single_boundary(cp3, [X, Y, Y])
    lim = _richardson(lambda h: GN_single_boundary(cp3, [X, Y, Y + 1e-2 * h * 1e3]))
    assert abs(exact - lim) < 1e-6


def test_coincidence_limit_multi_boundary(cp3):
    exact = G_multi_boundary(cp3, BoundarySpec(((4.0, 4.0), (9.0,))))
    lim = _richardson(lambda h: G_multi_boundary(cp3, BoundarySpec(((4.0, 4.0 + 10 * h), (9.0,)))))
    assert abs(exact - lim) < 1e-6


def test_evaluate_dispatch(cp3):
    assert evaluate(cp3, BoundarySpec(((4.0,),))).provenance is Provenance.W
    assert evaluate(cp3, BoundarySpec(((9.0,),)), 1.0).value == G1(cp3, 1.0)
    assert evaluate(cp3, BoundarySpec(((4.0, 9.0),))).provenance is Provenance.TWO_POINT
    assert evaluate(cp3, BoundarySpec(((4.0,), (9.0,)))).provenance is Provenance.ONE_PLUS_ONE
    assert evaluate(cp3, BoundarySpec(((4.0,), (9.0,), (2.0,)))).provenance is Provenance.TOWER
    assert evaluate(cp3, BoundarySpec(((4.0, 1.0), (9.0,)))).provenance is Provenance.MULTI_BOUNDARY


def test_boundary_spec_from_x():
    spec = BoundarySpec.from_x([[0, 1], [2]])
    assert spec.args == ((1, 9), (25,))
    assert spec.partition == (2, 1) and spec.N == 3 and spec.B == 2
    assert X_of_x(1.5) == 16
    with pytest.raises(InputError):
        BoundarySpec(((),))


def test_complex_arguments_are_holomorphic(cp3):
    # Cauchy-Riemann: derivative along real and imaginary directions agree
    z, h = 3.0 + 2.0j, 1e-6
    dre = (G_1plus1(cp3, z + h, 5.0) - G_1plus1(cp3, z - h, 5.0)) / (2 * h)
    dim = (G_1plus1(cp3, z + 1j * h, 5.0) - G_1plus1(cp3, z - 1j * h, 5.0)) / (2j * h)
    assert abs(dre - dim) < 1e-8
