"""Closed-form planar correlation functions.

Arguments are the transformed variables X = (2 e(x) + 1)^2.  Every function
takes a solved :class:`~phi3matrix.spectral.Coupling`.  Multi-argument
functions reduce to divided differences (see :mod:`phi3matrix.divdiff`), so
coinciding arguments are handled as limits.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import integrate

from .bell import gamma_closed, x_from_moments
from .divdiff import EPS_DD, divided_difference
from .errors import DomainError, InputError, QuadratureError, SingularityError
from .jet import Jet, jlog, jsqrt
from .spectral import Coupling, D_jet, moments

__all__ = [
    "Provenance",
    "PlanarFunctionValue",
    "BoundarySpec",
    "X_of_x",
    "W",
    "W_jet",
    "G1",
    "G2",
    "GN_single_boundary",
    "G_1plus1",
    "G_1plus1plus1",
    "G_1plusTower",
    "G_1plusTower_ansatz",
    "G_multi_boundary",
    "evaluate",
    "MAX_TOWER_B",
]

MAX_TOWER_B = 12


class Provenance(str, Enum):
    W = "W"
    ONE_POINT = "G1"
    TWO_POINT = "G2"
    SINGLE_BOUNDARY = "GN"
    ONE_PLUS_ONE = "G(1+1)"
    TOWER = "G(1+...+1)"
    MULTI_BOUNDARY = "multi-boundary"


@dataclass(frozen=True)
class PlanarFunctionValue:
    value: complex
    provenance: Provenance


@dataclass(frozen=True)
class BoundarySpec:
    """Partition (N_1..N_B) with the X-arguments of each boundary."""

    args: tuple

    def __post_init__(self):
        args = tuple(tuple(complex(z) for z in b) for b in self.args)
        if not args or any(len(b) == 0 for b in args):
            raise InputError("every boundary needs at least one argument")
        object.__setattr__(self, "args", args)

    @classmethod
    def from_x(cls, xs: Sequence[Sequence[float]], e=None) -> "BoundarySpec":
        return cls(tuple(tuple(X_of_x(x, e) for x in b) for b in xs))

    @property
    def partition(self) -> tuple:
        return tuple(len(b) for b in self.args)

    @property
    def B(self) -> int:
        return len(self.args)

    @property
    def N(self) -> int:
        return sum(self.partition)


def X_of_x(x, e=None):
    if e is None or e.is_linear:
        return (2 * x + 1) ** 2
    return (2 * e.e(x) + 1) ** 2


def _check_arg(coupling: Coupling, X) -> None:
    z = complex(X) + complex(coupling.c)
    if z.imag == 0 and z.real <= 0:
        raise DomainError(f"X = {X} puts X + c on the cut (-inf, 0]")


def _lift(a, like):
    """Promote ``a`` to a constant jet shaped like the nested jet ``like``."""
    if isinstance(like, Jet) and isinstance(like.coeffs[0], Jet) and not (
        isinstance(a, Jet) and isinstance(a.coeffs[0], Jet)
    ):
        return Jet.constant(a, like.order)
    return a


# -- W ----------------------------------------------------------------------


def _W_linear(coupling: Coupling, X):
    c = complex(coupling.c)
    lam2 = coupling.lam2
    s1 = coupling.s
    a = jsqrt(X + c)
    r = jsqrt(X)
    arg = (a + r) * (r + 1) / (r * s1 + a)
    return a + 2 * lam2 / r * jlog(arg)


def _W_custom_integrand(coupling: Coupling, X):
    c = complex(coupling.c)
    a = cmath.sqrt(complex(X) + c)

    def f(T):
        b = np.sqrt(T + c + 0j)
        return coupling.rho(T) / ((a + b) * b)

    return a, f


def _quad_vec_tail(f, size: int):
    """Vector-valued tail quadrature over [1, inf).

    T = (1-u)^-2 keeps the integrand bounded for T^(-3/2) decay; quad_vec has
    no endpoint extrapolation, so the map must remove the singularity.
    """

    def mapped(u):
        if u >= 1.0:
            return np.zeros(2 * size)
        w = 1.0 - u
        v = np.asarray(f(1.0 / (w * w)), dtype=complex) * (2.0 / (w * w * w))
        return np.concatenate([v.real, v.imag])

    val, err = integrate.quad_vec(mapped, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=400)
    if err > 1e-9:
        raise QuadratureError(f"W quadrature error estimate {err:.3e}", err)
    return val[:size] + 1j * val[size:]


def W(coupling: Coupling, X) -> complex:
    """Planar 1-point resolvent W(X) with W(1) = 1."""
    _check_arg(coupling, X)
    if coupling.e.is_linear:
        if complex(X) == 0:
            raise DomainError("the closed form of W is singular at X = 0")
        return complex(_W_linear(coupling, complex(X)))
    a, f = _W_custom_integrand(coupling, X)
    return a + 0.5 * _quad_vec_tail(lambda T: np.array([f(T)]), 1)[0]


def W_jet(coupling: Coupling, X, order: int) -> Jet:
    """Taylor expansion of W at X through ``order``."""
    _check_arg(coupling, X)
    X = complex(X)
    if coupling.e.is_linear:
        if X == 0:
            raise DomainError("the closed form of W is singular at X = 0")
        return _W_linear(coupling, Jet.variable(X, order))
    c = complex(coupling.c)
    aj = (Jet.variable(X, order) + c).sqrt()

    def f(T):
        b = np.sqrt(T + c + 0j)
        return (1 / ((aj + b) * b)).coeffs * coupling.rho(T)

    integral = _quad_vec_tail(f, order + 1)
    return aj + Jet(0.5 * integral)


def _W_taylor(coupling: Coupling):
    return lambda z0, n: list(W_jet(coupling, z0, n - 1).coeffs)


def W_divided_difference(coupling: Coupling, Xs: Sequence, eps: float = EPS_DD):
    for X in Xs:
        _check_arg(coupling, X)
    return divided_difference(Xs, lambda z: W(coupling, z), _W_taylor(coupling), eps)


# -- one boundary -------------------------------------------------------------


def G1(coupling: Coupling, x: float) -> complex:
    """Renormalised 1-point function G(x) = (W(X) - (2e(x)+1)) / (2 lambda)."""
    if x < 0:
        raise InputError("x must be non-negative")
    if coupling.lam == 0:
        return 0j
    ex = coupling.e.value(x)
    return (W(coupling, (2 * ex + 1) ** 2) - (2 * ex + 1)) / (2 * coupling.lam)


def G2(coupling: Coupling, X, Y) -> complex:
    """2(W(X) - W(Y))/(X - Y); the diagonal is 2 W'(X)."""
    return complex(2 * W_divided_difference(coupling, [X, Y]))


def GN_single_boundary(coupling: Coupling, Xs: Sequence) -> complex:
    """N-point function on one boundary: 2 (4 lambda)^(N-2) W[X_1, ..., X_N]."""
    N = len(Xs)
    if N < 2:
        raise InputError("the single-boundary N-point function needs N >= 2")
    pref = 2 * (4 * coupling.lam) ** (N - 2)
    if pref == 0:
        return 0j
    return complex(pref * W_divided_difference(coupling, Xs))


# -- kernels with several boundaries ------------------------------------------


def _kernel_11(coupling: Coupling, X, Y):
    c = complex(coupling.c)
    a = jsqrt(X + c)
    b = jsqrt(Y + c)
    a = _lift(a, b)
    b = _lift(b, a)
    return 4 * coupling.lam2 / (a * b * (a + b) ** 2)


def G_1plus1(coupling: Coupling, X, Y) -> complex:
    """4 lambda^2 / (sqrt(X+c) sqrt(Y+c) (sqrt(X+c) + sqrt(Y+c))^2)."""
    _check_arg(coupling, X)
    _check_arg(coupling, Y)
    return complex(_kernel_11(coupling, complex(X), complex(Y)))


def G_1plus1plus1(coupling: Coupling, X, Y2, Y3) -> complex:
    """-32 lambda^5 / (rho_0 (X+c)^(3/2) (Y2+c)^(3/2) (Y3+c)^(3/2))."""
    for z in (X, Y2, Y3):
        _check_arg(coupling, z)
    if coupling.rho0 == 0:
        raise SingularityError("rho_0 = 0: the (1+1+1)-point function diverges at the critical point")
    c = complex(coupling.c)
    prod = 1
    for z in (X, Y2, Y3):
        prod *= cmath.sqrt(complex(z) + c) ** 3
    return -32 * coupling.lam**5 / (coupling.rho0 * prod)


def _h_jet(coupling: Coupling, Y, order: int) -> Jet:
    """t-jet of (Y + c - 2t)^(-3/2)."""
    base = Jet([complex(Y) + complex(coupling.c), -2.0] + [0.0] * (order - 1)) if order else Jet([complex(Y) + complex(coupling.c)])
    return base ** -1.5


def _h_taylor_in_Y(coupling: Coupling, order: int):
    """Taylor data in Y of the t-jet-valued function Y -> (Y + c - 2t)^(-3/2)."""
    c = complex(coupling.c)

    def taylor(Y0, n):
        u0 = complex(Y0) + c
        # coefficients g_j of u^(-3/2) about u0
        g = [u0**-1.5]
        for j in range(1, n + order):
            g.append(g[-1] * (-1.5 - (j - 1)) / (j * u0))
        out = []
        for k in range(n):
            coeffs = [g[k + m] * math.comb(k + m, k) * (-2.0) ** m for m in range(order + 1)]
            out.append(Jet(np.asarray(coeffs, dtype=np.complex128)))
        return out

    return taylor


def _slot_jet(coupling: Coupling, Ys: Sequence, order: int, eps: float = EPS_DD) -> Jet:
    for Y in Ys:
        _check_arg(coupling, Y)
    if len(Ys) == 1:
        return _h_jet(coupling, Ys[0], order)
    return divided_difference(
        Ys, lambda z: _h_jet(coupling, z, order), _h_taylor_in_Y(coupling, order), eps
    )


def _tower_from_slots(coupling: Coupling, slot_jets: Sequence[Jet], B: int) -> complex:
    if coupling.rho0 == 0:
        raise SingularityError("rho_0 = 0: the (1+...+1)-point functions diverge at the critical point")
    order = B - 3
    prod = slot_jets[0]
    for j in slot_jets[1:]:
        prod = prod * j
    D = D_jet(coupling, order)
    expr = prod / D ** (B - 2) if order else Jet([prod.coeffs[0] / D.coeffs[0] ** (B - 2)])
    return complex((-2 * coupling.lam) ** (3 * B - 4) * math.factorial(order) * expr.coeffs[order])


def G_1plusTower(coupling: Coupling, Xs: Sequence, max_B: int = MAX_TOWER_B) -> complex:
    """(1+...+1)-point function with B >= 3 boundaries, one argument each."""
    B = len(Xs)
    if B < 3:
        raise InputError("the tower formula needs B >= 3")
    if B > max_B:
        raise InputError(f"B = {B} exceeds the configured maximum {max_B}")
    return _tower_from_slots(coupling, [_h_jet(coupling, X, B - 3) for X in Xs], B)


def G_1plusTower_ansatz(coupling: Coupling, Xs: Sequence) -> complex:
    """Same quantity from the gamma-coefficient ansatz (independent route)."""
    B = len(Xs)
    if B < 3:
        raise InputError("the tower formula needs B >= 3")
    order = B - 3
    table = moments(coupling, max(order, 1))
    rhos = [complex(v) for v in table.values]
    xs = x_from_moments(rhos)
    prod = _h_jet(coupling, Xs[0], order)
    for X in Xs[1:]:
        prod = prod * _h_jet(coupling, X, order)
    total = 0j
    for M in range(order + 1):
        poly, power = gamma_closed(B, M)
        gamma = complex(poly.evaluate(xs[: poly.arity])) / rhos[0] ** power
        total += gamma * math.factorial(M) * prod.coeffs[M]
    return (-2 * coupling.lam) ** (3 * B - 4) / rhos[0] * total


def _kernel_11_dd(coupling: Coupling, Xs: Sequence, Ys: Sequence, eps: float = EPS_DD) -> complex:
    """Delta_X Delta_Y of the (1+1) kernel, with nested jets for clusters."""

    def inner(Xval, nest_order=None):
        def val(Y):
            return _kernel_11(coupling, Xval, complex(Y))

        def tay(Y0, n):
            if nest_order is None:
                return list(_kernel_11(coupling, Xval, Jet.variable(complex(Y0), n - 1)).coeffs)
            zero = Jet.constant(0j, nest_order)
            one = Jet.constant(1 + 0j, nest_order)
            Yj = Jet([Jet.constant(complex(Y0), nest_order), one] + [zero] * (n - 2)) if n > 1 else Jet(
                [Jet.constant(complex(Y0), nest_order)]
            )
            return list(_kernel_11(coupling, Xval, Yj).coeffs)

        return divided_difference(Ys, val, tay, eps)

    def outer_val(X):
        return inner(complex(X))

    def outer_tay(X0, n):
        Xj = Jet.variable(complex(X0), n - 1)
        res = inner(Xj, nest_order=n - 1)
        return list(res.coeffs) if isinstance(res, Jet) else [res] + [0j] * (n - 1)

    return divided_difference(Xs, outer_val, outer_tay, eps)


def G_multi_boundary(coupling: Coupling, spec: BoundarySpec, eps: float = EPS_DD) -> complex:
    """General planar function with B boundaries via divided differences of the kernel."""
    if not isinstance(spec, BoundarySpec):
        spec = BoundarySpec(spec)
    for b in spec.args:
        for z in b:
            _check_arg(coupling, z)
    B, N = spec.B, spec.N
    if B == 1:
        if N == 1:
            raise InputError("a single argument on one boundary is the 1-point function; use G1 or W")
        return GN_single_boundary(coupling, spec.args[0])
    pref = (4 * coupling.lam) ** (N - B)
    if pref == 0:
        return 0j
    if B == 2:
        return complex(pref * _kernel_11_dd(coupling, spec.args[0], spec.args[1], eps))
    if B > MAX_TOWER_B:
        raise InputError(f"B = {B} exceeds the configured maximum {MAX_TOWER_B}")
    slots = [_slot_jet(coupling, b, B - 3, eps) for b in spec.args]
    return complex(pref * _tower_from_slots(coupling, slots, B))


def evaluate(coupling: Coupling, spec: BoundarySpec, x_space_single=None) -> PlanarFunctionValue:
    """Dispatch a boundary spec to the matching closed form.

    A single boundary with one argument is the renormalised 1-point function;
    ``x_space_single`` carries its x value in that case.
    """
    B, part = spec.B, spec.partition
    if B == 1 and part[0] == 1:
        if x_space_single is not None:
            return PlanarFunctionValue(G1(coupling, x_space_single), Provenance.ONE_POINT)
        return PlanarFunctionValue(W(coupling, spec.args[0][0]), Provenance.W)
    if B == 1:
        prov = Provenance.TWO_POINT if part[0] == 2 else Provenance.SINGLE_BOUNDARY
        return PlanarFunctionValue(GN_single_boundary(coupling, spec.args[0]), prov)
    if all(n == 1 for n in part):
        if B == 2:
            return PlanarFunctionValue(G_1plus1(coupling, spec.args[0][0], spec.args[1][0]), Provenance.ONE_PLUS_ONE)
        return PlanarFunctionValue(G_1plusTower(coupling, [b[0] for b in spec.args]), Provenance.TOWER)
    return PlanarFunctionValue(G_multi_boundary(coupling, spec), Provenance.MULTI_BOUNDARY)
