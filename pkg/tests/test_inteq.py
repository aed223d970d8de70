import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.interpolate import CubicSpline

from oracles import G1_LAM03_X2
from phi3matrix import G_1plus1, solve_c
from phi3matrix.correlators import W_divided_difference
from phi3matrix.errors import InputError
from phi3matrix.inteq import (
    BACKEND,
    closed_form_G11,
    closed_form_G111,
    closed_form_W,
    make_grid,
    residual_report,
    solve_G11_inteq,
    solve_W_inteq,
)
from phi3matrix.inteq import _kernels_py, kernels


@pytest.fixture(scope="module")
def grid():
    return make_grid()


@pytest.fixture(scope="module")
def cp3():
    return solve_c(lam=0.3)


def test_grid_invariants(grid):
    assert grid.n == 2000 and grid.Xi == 1e8
    assert np.all(np.diff(grid.nodes) > 0)
    assert grid.nodes[0] > 1 and grid.nodes[-1] < 1e8
    # each panel integrates degree 2q-1 exactly
    for k in (0, 5, 31):
        a, b = grid.edges[0], grid.edges[1]
        w = grid.weights[: grid.q]
        x = grid.nodes[: grid.q]
        assert np.sum(w * x**k) == pytest.approx((b ** (k + 1) - a ** (k + 1)) / (k + 1), rel=1e-12)


def test_grid_rejects_bad_sizes():
    with pytest.raises(InputError):
        make_grid(n=100, q=16)
    with pytest.raises(InputError):
        make_grid(Xi=0.5)


def test_free_solution_is_sqrt(grid):
    W = solve_W_inteq(0.0, grid=grid)
    assert np.max(np.abs(W - np.sqrt(grid.nodes))) < 1e-10


@pytest.mark.parametrize("lam", [0.1, 0.3])
def test_solution_matches_closed_form(grid, lam):
    cp = solve_c(lam=lam)
    W = solve_W_inteq(cp.lam2, grid=grid)
    assert np.max(np.abs(W - closed_form_W(cp).f(grid.nodes))) < 1e-5


@pytest.mark.parametrize("lam", [0.1, 0.3])
def test_closed_form_residual(grid, lam):
    cp = solve_c(lam=lam)
    assert residual_report("W", closed_form_W(cp), grid, cp).sup < 1e-6


def test_residual_of_zero_candidate():
    g = make_grid(n=320, Xi=1e4)
    rep = residual_report("W", np.zeros(g.n), g, lam2=0.0)
    assert np.allclose(np.abs(rep.residual), g.nodes, rtol=1e-14)


def test_one_point_function_from_the_oracle(grid, cp3):
    # G1 at x = 2 needs W(25): spline through the solved node values
    W = solve_W_inteq(cp3.lam2, grid=grid)
    X = grid.nodes
    sel = (X > 5) & (X < 125)
    spline = CubicSpline(np.log(X[sel]), W[sel] / np.sqrt(X[sel]))
    W25 = 5 * spline(np.log(25.0))
    assert abs((W25 - 5) / (2 * 0.3) - G1_LAM03_X2) < 1e-6


def test_convergence_order():
    cp = solve_c(lam=0.3)
    errs = []
    for n in (250, 500, 1000, 2000):
        g = make_grid(n=n, Xi=1e8, q=5)
        errs.append(np.max(np.abs(solve_W_inteq(cp.lam2, grid=g) - closed_form_W(cp).f(g.nodes))))
    # ignore pairs already at the iteration tolerance floor
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:]) if b > 1e-9]
    assert orders and min(orders) >= 2


def test_cutoff_doubling_follows_the_tail():
    cp = solve_c(lam=0.3)
    pts = np.logspace(0, 4, 9)
    reps = [
        residual_report("W", closed_form_W(cp), make_grid(n=960, Xi=Xi), cp, points=pts, tail="none")
        for Xi in (1e6, 2e6, 4e6)
    ]
    for a, b in zip(reps, reps[1:]):
        assert b.sup < a.sup
        ratio = (a.sup / b.sup) / (a.tail_estimate / b.tail_estimate)
        assert 0.5 < ratio < 2


def test_kernel_has_no_cancellation_blowup():
    cp = solve_c(lam=0.3)
    g = make_grid(n=160, Xi=1e8)
    X = g.nodes
    F = closed_form_W(cp).f(X)
    worst = 0.0
    for i in range(0, g.n, 3):
        for j in range(g.n):
            if i == j:
                continue
            q = (F[i] - F[j]) / (X[i] - X[j])
            ref = W_divided_difference(cp, [X[i], X[j]]).real
            worst = max(worst, abs(q - ref) / abs(ref))
    assert worst < 1e-8


def test_G11_free():
    g = make_grid(n=320, Xi=1e6)
    assert np.all(solve_G11_inteq(solve_c(0), 4.0, grid=g) == 0)


def test_G11_solution_small_coupling(grid):
    cp = solve_c(lam=0.05)
    Y = 9.0
    sol = solve_G11_inteq(cp, Y, grid=grid)
    X = grid.nodes
    interior = X < 1e6
    ref = np.array([G_1plus1(cp, x, Y) for x in X[interior]]).real
    assert np.max(np.abs(sol[interior] - ref)) < 1e-6


def test_G11_closed_form_residual(grid, cp3):
    pts = np.logspace(0, 4, 5)
    for Y in pts:
        assert residual_report("G11", closed_form_G11(cp3, Y), grid, cp3, Y=Y, points=pts).sup < 1e-6


def test_G111_closed_form_residual(grid, cp3):
    pts = np.logspace(0, 3, 4)
    rep = residual_report("G111", closed_form_G111(cp3, 4.0, 9.0), grid, cp3, Y=4.0, Y3=9.0, points=pts)
    assert rep.sup < 1e-6


def test_residual_report_validates():
    cp = solve_c(lam=0.1)
    g = make_grid(n=320, Xi=1e4)
    with pytest.raises(InputError):
        residual_report("nope", closed_form_W(cp), g, cp)
    with pytest.raises(InputError):
        residual_report("G11", closed_form_W(cp), g, cp)


@given(st.integers(1, 40), st.booleans())
def test_backends_agree(n, cplx):
    rng = np.random.default_rng(n)
    X = np.sort(rng.uniform(1, 100, n))
    F = rng.normal(size=n) + (1j * rng.normal(size=n) if cplx else 0)
    w = rng.normal(size=n)
    dF = rng.normal(size=n)
    a = kernels.quotient_apply(X, F, w, dF)
    b = _kernels_py.quotient_apply(X, F, w, dF)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-13)
    assert np.allclose(kernels.offdiag_kernel(X, w), _kernels_py.offdiag_kernel(X, w), rtol=1e-14, atol=0)


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, PHI3MATRIX_PURE_PYTHON="1")
    code = "from phi3matrix.inteq import BACKEND; print(BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert BACKEND in ("python", "cython")


def test_pure_python_solution_matches_compiled():
    code = (
        "import sys\n"
        "import numpy as np\n"
        "from phi3matrix import solve_c\n"
        "from phi3matrix.inteq import make_grid, solve_W_inteq\n"
        "g = make_grid(n=480, Xi=1e6)\n"
        "sys.stdout.buffer.write(solve_W_inteq(solve_c(lam=0.3).lam2, grid=g).astype(float).tobytes())\n"
    )
    env = dict(os.environ, PHI3MATRIX_PURE_PYTHON="1")
    raw = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, check=True).stdout
    pure = np.frombuffer(raw, dtype=float)
    here = solve_W_inteq(solve_c(lam=0.3).lam2, grid=make_grid(n=480, Xi=1e6))
    assert np.max(np.abs(pure - here)) < 1e-12
