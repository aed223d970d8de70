"""Discretised integral equations as an independent oracle for the closed forms.

The grid covers [1, Xi].  The remainder (Xi, inf) is added analytically with
the large-argument model W(Y) = kappa sqrt(Y), kappa fitted at the last node,
so that the discrete equations approximate the Xi -> inf problem that the
closed forms solve.  ``tail="none"`` gives the plain truncated equation.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy import integrate

from ..correlators import GN_single_boundary, G_multi_boundary, BoundarySpec
from ..errors import ConditioningError, ConvergenceError, InputError
from ..spectral import LINEAR, Coupling, EigenvalueFunction
from .grid import Grid, make_grid
from .kernels import offdiag_kernel, quotient_apply

__all__ = [
    "Candidate",
    "ResidualReport",
    "closed_form_W",
    "closed_form_G11",
    "closed_form_G111",
    "solve_W_inteq",
    "solve_G11_inteq",
    "residual_report",
    "W_tail",
]


@dataclass(frozen=True)
class Candidate:
    """A function given by vectorised value and derivative callables."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ResidualReport:
    points: np.ndarray
    residual: np.ndarray
    sup: float
    l2: float
    tail_estimate: float


# -- closed forms, vectorised ------------------------------------------------


def _as_arr(coupling: Coupling, X):
    X = np.asarray(X, dtype=float if complex(coupling.c).imag == 0 and complex(coupling.lam2).imag == 0 else complex)
    return X


def _real_or_complex(coupling: Coupling, v):
    c, l2 = complex(coupling.c), complex(coupling.lam2)
    return v.real if c.imag == 0 and l2.imag == 0 else v


def closed_form_W(coupling: Coupling) -> Candidate:
    if not coupling.e.is_linear:
        raise InputError("vectorised closed form exists for the linear spectrum only")
    c = _real_or_complex(coupling, np.asarray(complex(coupling.c)))
    L = _real_or_complex(coupling, np.asarray(complex(coupling.lam2)))
    s1 = np.sqrt(1 + c)

    def parts(X):
        X = _as_arr(coupling, X)
        a, r = np.sqrt(X + c), np.sqrt(X)
        Q = (a + r) * (r + 1) / (r * s1 + a)
        return X, a, r, Q

    def f(X):
        X, a, r, Q = parts(X)
        return a + 2 * L / r * np.log(Q)

    def df(X):
        X, a, r, Q = parts(X)
        da, dr = 0.5 / a, 0.5 / r
        dlogQ = (da + dr) / (a + r) + dr / (r + 1) - (dr * s1 + da) / (r * s1 + a)
        return da - L / r**3 * np.log(Q) + 2 * L / r * dlogQ

    return Candidate(f, df)


def closed_form_G11(coupling: Coupling, Y) -> Candidate:
    c = _real_or_complex(coupling, np.asarray(complex(coupling.c)))
    L = _real_or_complex(coupling, np.asarray(complex(coupling.lam2)))
    b = np.sqrt(Y + c + (0j if np.iscomplexobj(c) or isinstance(Y, complex) else 0.0))

    def f(X):
        a = np.sqrt(_as_arr(coupling, X) + c)
        return 4 * L / (a * b * (a + b) ** 2)

    def df(X):
        a = np.sqrt(_as_arr(coupling, X) + c)
        da = 0.5 / a
        return -4 * L * da * (3 * a + b) / (b * a**2 * (a + b) ** 3)

    return Candidate(f, df)


def closed_form_G111(coupling: Coupling, Y2, Y3) -> Candidate:
    c = complex(coupling.c)
    pref = -32 * coupling.lam**5 / (coupling.rho0 * cmath.sqrt(Y2 + c) ** 3 * cmath.sqrt(Y3 + c) ** 3)

    def f(X):
        return pref * (np.asarray(X, dtype=complex) + c) ** -1.5

    def df(X):
        return -1.5 * pref * (np.asarray(X, dtype=complex) + c) ** -2.5

    return Candidate(f, df)


# -- shared pieces --------------------------------------------------------------


def _wrho(grid: Grid, lam2, e: EigenvalueFunction):
    lam2 = complex(lam2)
    unit = grid.weights * e.rho_unit(grid.nodes)
    return unit * lam2.real if lam2.imag == 0 else unit * lam2


def _quotient_sum(points, fP, dfP, grid: Grid, fN, wrho):
    """sum_j wrho_j (f(P_i) - f(T_j)) / (P_i - T_j), derivative where P_i = T_j."""
    P = np.asarray(points, dtype=float)
    if P.shape == grid.nodes.shape and np.array_equal(P, grid.nodes):
        return quotient_apply(grid.nodes, fN, wrho, dfP)
    dx = P[:, None] - grid.nodes[None, :]
    same = dx == 0
    dx = np.where(same, 1.0, dx)
    q = (np.asarray(fP)[:, None] - np.asarray(fN)[None, :]) / dx
    q = np.where(same, np.asarray(dfP)[:, None], q)
    return q @ wrho


def _artanh_ratio(X, U):
    """artanh(sqrt(X)/U)/sqrt(X), continued analytically."""
    x = np.sqrt(np.asarray(X, dtype=complex))
    return (np.log((U + x) / (U - x)) / (2 * x))


def W_tail(points, WP, W1, kappa, lam2, grid: Grid, e: EigenvalueFunction = LINEAR):
    """int_Xi^inf rho(Y) [(W(X)-W(Y))/(X-Y) - (W(1)-W(Y))/(1-Y)] dY with W(Y) = kappa sqrt(Y)."""
    points = np.asarray(points, dtype=float)
    U = np.sqrt(grid.Xi)
    if e.is_linear:
        x = np.sqrt(points)
        val = 4 * lam2 * (
            -kappa * np.log((x + U) / (1 + U))
            + (kappa * x - WP) * _artanh_ratio(points, U)
            + (W1 - kappa) * np.arctanh(1 / U)
        )
        return val
    # generic spectrum: integrate in u = 1/sqrt(Y) over (0, 1/U)
    WP = np.asarray(WP, dtype=complex)

    def integrand(u):
        if u == 0.0:
            return np.zeros(2 * points.size)
        Y = 1.0 / (u * u)
        WY = kappa * np.sqrt(Y)
        v = lam2 * e.rho_unit(Y) * ((WP - WY) / (points - Y) - (W1 - WY) / (1 - Y)) * (2.0 / u**3)
        return np.concatenate([v.real, v.imag])

    val, _ = integrate.quad_vec(integrand, 0.0, 1.0 / U, epsabs=1e-14, epsrel=1e-10)
    return val[: points.size] + 1j * val[points.size :]


def _G11_tail_coefficient(points, lam2, grid: Grid, e: EigenvalueFunction):
    """Coefficient of g(X) from int_Xi^inf rho(T) / (X - T) dT (the g(T) part is O(Xi^-2))."""
    points = np.asarray(points, dtype=float)
    U = np.sqrt(grid.Xi)
    if e.is_linear:
        return -4 * lam2 * _artanh_ratio(points, U)

    def integrand(u):
        if u == 0.0:
            return np.zeros(points.size)
        Y = 1.0 / (u * u)
        return e.rho_unit(Y) / (points - Y) * (2.0 / u**3)

    val, _ = integrate.quad_vec(integrand, 0.0, 1.0 / U, epsabs=1e-15, epsrel=1e-10)
    return lam2 * val


def _maybe_real(v, lam2, c=0.0):
    v = np.asarray(v)
    if np.iscomplexobj(v) and complex(lam2).imag == 0 and complex(c).imag == 0:
        return v.real
    return v


# -- W equation ------------------------------------------------------------------


def solve_W_inteq(
    lam2,
    e: EigenvalueFunction = LINEAR,
    grid: Optional[Grid] = None,
    tail: str = "analytic",
    tol: float = 1e-10,
    damping: float = 0.5,
    max_iter: int = 2000,
) -> np.ndarray:
    """Self-consistent W on the grid nodes by damped fixed-point iteration.

    The update is W <- (1-damping) W + damping sqrt(X + I_1 - I_X - tail),
    seeded with sqrt(X).  Convergence is declared when
    max_i |Delta W_i| / sqrt(X_i) < tol.
    """
    grid = grid or make_grid()
    lam2 = complex(lam2)
    X = grid.nodes
    wrho = _wrho(grid, lam2, e)
    lam2v = lam2.real if lam2.imag == 0 else lam2
    W = np.sqrt(X).astype(complex if lam2.imag else float)
    scale = np.sqrt(X)
    history = []
    for _ in range(max_iter):
        dW = grid.differentiate(W)
        W1 = grid.value_at_one(W)
        IX = quotient_apply(X, W, wrho, dW)
        I1 = np.sum(wrho * (W1 - W) / (1 - X))
        T = 0.0
        if tail == "analytic":
            T = W_tail(X, W, W1, W[-1] / np.sqrt(X[-1]), lam2v, grid, e)
            T = _maybe_real(T, lam2)
        rhs = X + I1 - IX - T
        new = np.sqrt(rhs.astype(complex)) if np.iscomplexobj(rhs) or np.any(rhs.real < 0) else np.sqrt(rhs)
        new = _maybe_real(new, lam2)
        step = damping * (new - W)
        W = W + step
        change = float(np.max(np.abs(step) / scale))
        history.append(change)
        if not np.isfinite(change) or change > 1e6:
            raise ConvergenceError("fixed-point iteration for W diverged", history)
        if change < tol:
            return W
    raise ConvergenceError(f"fixed-point iteration for W did not reach {tol:g}", history)


def _residual_W(coupling_or_lam2, candidate, grid: Grid, points, e, tail):
    lam2 = complex(coupling_or_lam2.lam2) if isinstance(coupling_or_lam2, Coupling) else complex(coupling_or_lam2)
    lam2v = lam2.real if lam2.imag == 0 else lam2
    wrho = _wrho(grid, lam2, e)
    X = grid.nodes
    if isinstance(candidate, Candidate):
        fN = candidate.f(X)
        W1 = candidate.f(np.array([1.0]))[0]
        P = X if points is None else np.asarray(points, dtype=float)
        fP, dfP = candidate.f(P), candidate.df(P)
    else:
        fN = np.asarray(candidate)
        W1 = grid.value_at_one(fN)
        if points is not None:
            raise InputError("sampled candidates are evaluated at the grid nodes only")
        P, fP, dfP = X, fN, grid.differentiate(fN)
    IX = _quotient_sum(P, fP, dfP, grid, fN, wrho)
    I1 = np.sum(wrho * (W1 - fN) / (1 - X))
    kappa = fN[-1] / np.sqrt(X[-1])
    T = W_tail(P, fP, W1, kappa, lam2v, grid, e) if tail == "analytic" else 0.0
    res = fP**2 + IX - I1 + T - P
    # size of the neglected piece when the tail is dropped
    est = np.max(np.abs(W_tail(P, fP, W1, kappa, lam2v, grid, e)))
    return P, _maybe_real(res, lam2, getattr(coupling_or_lam2, "c", 0.0)), float(est)


# -- (1+1) equation ----------------------------------------------------------------


def _rhs_G11(coupling: Coupling, points, Y):
    return np.array([-coupling.lam * GN_single_boundary(coupling, [p, Y, Y]) for p in points])


def solve_G11_inteq(coupling: Coupling, Y, grid: Optional[Grid] = None, tail: str = "analytic") -> np.ndarray:
    """G(.|Y) on the grid nodes from the linear equation

    W(X) g(X) + 1/2 int rho(T) (g(X) - g(T)) / (X - T) dT = -lambda G(X, Y, Y).
    """
    grid = grid or make_grid()
    X = grid.nodes
    if coupling.lam == 0:
        return np.zeros_like(X)
    lam2 = complex(coupling.lam2)
    wrho = _wrho(grid, lam2, coupling.e)
    if coupling.e.is_linear:
        Wn = closed_form_W(coupling).f(X)
    else:
        from ..correlators import W as W_scalar

        Wn = np.array([W_scalar(coupling, x) for x in X])
    K = offdiag_kernel(X, wrho)
    diag = Wn + 0.5 * K.sum(axis=1)
    if tail == "analytic":
        diag = diag + 0.5 * _G11_tail_coefficient(X, lam2.real if lam2.imag == 0 else lam2, grid, coupling.e)
    diag = _maybe_real(diag, lam2, coupling.c)
    A = -0.5 * K.astype(np.result_type(K, diag))
    A[np.diag_indices_from(A)] += diag
    # derivative stencil on the diagonal of the quotient
    q = grid.q
    h = np.diff(grid.edges)
    for p in range(grid.panels):
        sl = slice(p * q, (p + 1) * q)
        A[sl, sl] += 0.5 * wrho[sl, None] * grid._ref_diff * (2.0 / h[p])
    b = _rhs_G11(coupling, X, Y)
    A = _maybe_real(A, lam2, coupling.c)
    b = _maybe_real(b, lam2, coupling.c)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    anorm = np.linalg.norm(A, 1)
    gecon = scipy.linalg.lapack.zgecon if np.iscomplexobj(A) else scipy.linalg.lapack.dgecon
    rcond, _ = gecon(lu, anorm, norm="1")
    if rcond < 1e-14:
        raise ConditioningError(f"(1+1) system is numerically singular (cond ~ {1 / max(rcond, 1e-300):.3e})", 1 / max(rcond, 1e-300))
    return scipy.linalg.lu_solve((lu, piv), b)


def _residual_G11(coupling: Coupling, candidate, grid: Grid, points, Y, tail):
    lam2 = complex(coupling.lam2)
    wrho = _wrho(grid, lam2, coupling.e)
    X = grid.nodes
    if isinstance(candidate, Candidate):
        P = X if points is None else np.asarray(points, dtype=float)
        fN, fP, dfP = candidate.f(X), candidate.f(P), candidate.df(P)
    else:
        if points is not None:
            raise InputError("sampled candidates are evaluated at the grid nodes only")
        fN = np.asarray(candidate)
        P, fP, dfP = X, fN, grid.differentiate(fN)
    from ..correlators import W as W_scalar

    WP = np.array([W_scalar(coupling, p) for p in P])
    IX = _quotient_sum(P, fP, dfP, grid, fN, wrho)
    tail_coef = _G11_tail_coefficient(P, lam2.real if lam2.imag == 0 else lam2, grid, coupling.e)
    T = 0.5 * tail_coef * fP if tail == "analytic" else 0.0
    res = WP * fP + 0.5 * IX + T - _rhs_G11(coupling, P, Y)
    est = float(np.max(np.abs(0.5 * tail_coef * fP)))
    return P, _maybe_real(res, lam2, coupling.c), est


def _residual_G111(coupling: Coupling, candidate, grid: Grid, points, Y2, Y3, tail):
    lam2 = complex(coupling.lam2)
    wrho = _wrho(grid, lam2, coupling.e)
    X = grid.nodes
    P = X if points is None else np.asarray(points, dtype=float)
    fN, fP, dfP = candidate.f(X), candidate.f(P), candidate.df(P)
    from ..correlators import G_1plus1, W as W_scalar

    WP = np.array([W_scalar(coupling, p) for p in P])
    IX = _quotient_sum(P, fP, dfP, grid, fN, wrho)
    tail_coef = _G11_tail_coefficient(P, lam2.real if lam2.imag == 0 else lam2, grid, coupling.e)
    T = 0.5 * tail_coef * fP if tail == "analytic" else 0.0
    lam = coupling.lam
    rhs = np.array(
        [
            -lam * G_multi_boundary(coupling, BoundarySpec(((p, Y2, Y2), (Y3,))))
            - lam * G_multi_boundary(coupling, BoundarySpec(((p, Y3, Y3), (Y2,))))
            - 2 * lam * G_1plus1(coupling, p, Y2) * G_1plus1(coupling, p, Y3)
            for p in P
        ]
    )
    res = WP * fP + 0.5 * IX + T - rhs
    est = float(np.max(np.abs(0.5 * tail_coef * fP)))
    return P, _maybe_real(res, lam2, coupling.c), est


def residual_report(
    equation: str,
    candidate,
    grid: Optional[Grid] = None,
    coupling=None,
    *,
    lam2=None,
    e: EigenvalueFunction = LINEAR,
    Y=None,
    Y3=None,
    points: Optional[Sequence[float]] = None,
    tail: str = "analytic",
) -> ResidualReport:
    """Signed residuals of a candidate in one of the discretised equations.

    ``equation`` is ``"W"`` (1-point equation), ``"G11"`` ((1+1) equation,
    needs ``Y``) or ``"G111"`` ((1+1+1) equation, needs ``Y`` and ``Y3``).
    ``candidate`` is a :class:`Candidate` or values sampled on the grid nodes.
    """
    grid = grid or make_grid()
    if tail not in ("analytic", "none"):
        raise InputError(f"unknown tail mode {tail!r}")
    if equation == "W":
        src = coupling if coupling is not None else lam2
        if src is None:
            raise InputError("the W equation needs a coupling or lambda^2")
        ee = coupling.e if coupling is not None else e
        P, res, est = _residual_W(src, candidate, grid, points, ee, tail)
    elif equation == "G11":
        if coupling is None or Y is None:
            raise InputError("the (1+1) equation needs a coupling and Y")
        P, res, est = _residual_G11(coupling, candidate, grid, points, Y, tail)
    elif equation == "G111":
        if coupling is None or Y is None or Y3 is None:
            raise InputError("the (1+1+1) equation needs a coupling, Y and Y3")
        if not isinstance(candidate, Candidate):
            raise InputError("the (1+1+1) check takes a closed-form candidate")
        P, res, est = _residual_G111(coupling, candidate, grid, points, Y, Y3, tail)
    else:
        raise InputError(f"unknown equation {equation!r}")
    res = np.asarray(res)
    return ResidualReport(
        np.asarray(P), res, float(np.max(np.abs(res))), float(np.sqrt(np.mean(np.abs(res) ** 2))), est
    )
