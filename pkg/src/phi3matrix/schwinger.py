"""The induced Euclidean theory on R^2.

The momentum-space 2-point function is

    S2(p^2) = 2 W'((p^2/mu^2 + 1)^2) / mu^2.

W depends on X only through a = sqrt(X + c).  Off the physical axis the
square root is taken in factored form,

    a = sqrt(P + 1 - sqrt(-c)) * sqrt(P + 1 + sqrt(-c)),    P = p^2/mu^2,

which is holomorphic in P away from two horizontal cuts ending at the branch
points P = -1 -+ sqrt(-c).  Then S2 = (dW/da) / (a mu^2).
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, special

from .correlators import BoundarySpec, evaluate
from .errors import DomainError, InputError, QuadratureError, SingularityError
from .jet import Jet, jlog, jsqrt
from .spectral import Coupling, integrate_tail

__all__ = [
    "SchwingerPoint",
    "PositivityReport",
    "IntegrandValue",
    "S2_hat",
    "S2_hat_quadrature",
    "branch_points",
    "positivity_check",
    "S2_position",
    "mass_gap",
    "schwinger_N_integrand",
    "symmetry_factor",
    "scan_S2",
]

STIELTJES_VIOLATED = "stieltjes_violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SchwingerPoint:
    """Mass scale mu^2 and a complex squared momentum p^2 = P mu^2."""

    mu2: float
    p2: complex

    def __post_init__(self):
        if not (self.mu2 > 0):
            raise InputError(f"mu^2 must be positive, got {self.mu2}")

    @property
    def P(self) -> complex:
        return complex(self.p2) / self.mu2


@dataclass(frozen=True)
class PositivityReport:
    test_point: complex
    value: Optional[complex]
    imaginary_part_sign: Optional[str]
    branch_points: list
    verdict: str
    note: str = ""


@dataclass(frozen=True)
class IntegrandValue:
    value: complex
    vanishes_by_parity: bool = False


def _alpha(coupling: Coupling) -> complex:
    return cmath.sqrt(-complex(coupling.c))


def branch_points(coupling: Coupling, mu2: float = 1.0) -> list[complex]:
    """Zeros of (p^2 + mu^2)^2 + c mu^4 in p^2."""
    al = _alpha(coupling)
    return [mu2 * (-1 - al), mu2 * (-1 + al)]


def _factored_root(coupling: Coupling, P: complex) -> complex:
    al = _alpha(coupling)
    z1, z2 = P + 1 - al, P + 1 + al
    for z in (z1, z2):
        if z.imag == 0 and z.real <= 0:
            bps = ", ".join(f"{b:.10g}" for b in branch_points(coupling))
            raise DomainError(f"p^2/mu^2 = {P} lies on a cut of S2; branch points at p^2/mu^2 = {bps}")
    return cmath.sqrt(z1) * cmath.sqrt(z2)


def _W_of_a(coupling: Coupling, a, r0: complex):
    """W as a function of a; r0 is either root of a0^2 - c.

    The expression is even in r, so the sign of r0 is free; fixing it by hand
    avoids the cut of the principal root when (P + 1)^2 is negative.
    """
    c = complex(coupling.c)
    r = r0 * jsqrt((a * a - c) / (r0 * r0))
    return a + 2 * coupling.lam2 / r * jlog((a + r) * (r + 1) / (r * coupling.s + a))


def _dW_da_jet(coupling: Coupling, a0: complex, r0: complex) -> complex:
    return complex(_W_of_a(coupling, Jet.variable(a0, 1), r0).coeffs[1])


def _dW_da_small_r(coupling: Coupling, a: complex, r: complex) -> complex:
    """dW/da from the expansion in r; the closed form cancels badly as r -> 0.

    (1/r) log((a+r)(r+1)/(r s + a)) = sum_n (-1)^(n+1) r^(n-1) c_n / n with
    c_n = 1 + (1 - s^n) / a^n, and c_2 = r^2 / a^2 exactly.
    """
    s1 = coupling.s
    F_a = 0j
    F_r = -r / (2 * a)  # the n = 2 term of (a/r) dF/dr
    for n in range(1, 200):
        t_a = (-1) ** n * r ** (n - 1) * (1 - s1**n) / a ** (n + 1)
        F_a += t_a
        t_r = 0j
        if n >= 3:
            t_r = a * (-1) ** (n + 1) * (n - 1) / n * r ** (n - 3) * (1 + (1 - s1**n) / a**n)
            F_r += t_r
        if n > 3 and abs(t_a) + abs(t_r) < 1e-17 * (abs(F_a) + abs(F_r) + 1):
            break
    return 1 + 2 * coupling.lam2 * (F_a + F_r)


def _S2_unit(coupling: Coupling, P: complex) -> complex:
    """S2 at mu^2 = 1."""
    a0 = _factored_root(coupling, P)
    if a0 == 0:
        raise SingularityError(f"S2 is singular at the branch point p^2/mu^2 = {P}")
    if coupling.lam2 == 0:
        return 1 / a0
    if not coupling.e.is_linear:
        return _S2_custom(coupling, a0)
    r0 = P + 1 if (P + 1).real >= 0 else -(P + 1)
    if abs(r0) < 0.2 * min(abs(a0), 1.0, abs(a0) / abs(coupling.s)):
        return _dW_da_small_r(coupling, a0, r0) / a0
    return _dW_da_jet(coupling, a0, r0) / a0


def _S2_custom(coupling: Coupling, a: complex) -> complex:
    c = complex(coupling.c)

    def f(T):
        b = np.sqrt(T + c + 0j)
        return coupling.rho(T) / (b * (a + b) ** 2)

    return (1 - 0.5 * integrate_tail(f)) / a


def _clean_axis(coupling: Coupling, P: complex, value: complex) -> complex:
    if coupling.is_real and P.imag == 0 and complex(coupling.c).imag == 0:
        return complex(value.real, 0.0)
    return value


def S2_hat(coupling: Coupling, mu2: float, p2: complex) -> complex:
    """Momentum-space Schwinger 2-point function at complex p^2."""
    pt = SchwingerPoint(mu2, p2)
    P = pt.P
    return _clean_axis(coupling, P, _S2_unit(coupling, P)) / mu2


def S2_hat_quadrature(coupling: Coupling, mu2: float, p2: complex) -> complex:
    """Independent evaluation through the T-integral; used as an oracle."""
    pt = SchwingerPoint(mu2, p2)
    a = _factored_root(coupling, pt.P)
    return _S2_custom(coupling, a) / mu2


# -- positivity ---------------------------------------------------------------


def positivity_check(coupling: Coupling, mu2: float = 1.0) -> PositivityReport:
    """Look for a violation of the Stieltjes property of p^2 -> S2.

    Real coupling (-1 < c < 0): a Stieltjes function has Im f < 0 in the
    upper half plane and Im f > 0 in the lower one; we evaluate at
    p^2 = (-3 - i|c|/10) mu^2 in the lower half plane and find Im < 0.
    Imaginary coupling (c > 0): the branch points leave the negative axis.
    """
    SchwingerPoint(mu2, 0)
    c = complex(coupling.c)
    test = complex(-3, -abs(c) / 10) * mu2
    bps = branch_points(coupling, mu2)
    if coupling.lam2 == 0:
        return PositivityReport(test, 1 / (test + mu2), None, bps, INCONCLUSIVE, "free theory is trivially Stieltjes")
    try:
        value = S2_hat(coupling, mu2, test)
    except DomainError:
        value = None
    sign = None if value is None else ("negative" if value.imag < 0 else "nonnegative")
    if c.imag == 0 and -1 < c.real < 0:
        if sign == "negative":
            return PositivityReport(test, value, sign, bps, STIELTJES_VIOLATED, "Im S2 < 0 in the lower half plane")
        return PositivityReport(test, value, sign, bps, INCONCLUSIVE, "no sign violation at the test point")
    off_axis = [b for b in bps if abs(b.imag) > 1e-14 * abs(b)]
    if off_axis:
        return PositivityReport(test, value, sign, bps, STIELTJES_VIOLATED, "branch points off the negative real axis")
    return PositivityReport(test, value, sign, bps, INCONCLUSIVE, "")


def mass_gap(coupling: Coupling, mu2: float = 1.0) -> float:
    """Distance from the origin to the nearest singularity in |p|.

    Decay rate of the position-space 2-point function, mu sqrt(1 - sqrt(-c))
    for real coupling.
    """
    return min(cmath.sqrt(-b).real for b in branch_points(coupling, mu2))


# -- position space -----------------------------------------------------------


def _S2_unit_axis(coupling: Coupling, P: np.ndarray) -> np.ndarray:
    """Vectorised S2 at mu^2 = 1 for P >= 0, from the closed derivative."""
    c = complex(coupling.c)
    lam2 = complex(coupling.lam2)
    s1 = coupling.s
    al = _alpha(coupling)
    r = P + 1.0
    a = np.sqrt(r - al + 0j) * np.sqrt(r + al + 0j)
    g = (a + r) * (r + 1) / (r * s1 + a)
    L = np.log(g)
    dL = 1 / r + a / (r * (r + 1)) - (s1 * a + r) / (r * (r * s1 + a))
    dW = 1 + 2 * lam2 * (dL / r - L * a / r**3)
    return dW / a


def _wynn(partial: Sequence[complex]) -> tuple[complex, float]:
    """Wynn epsilon extrapolation; returns (limit, error estimate)."""
    s = list(partial)
    prev = [0.0] * (len(s) + 1)
    cur = s[:]
    best = [s[-1]]
    k = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0:
                nxt.append(math.inf)
            else:
                nxt.append(prev[i + 1] + 1 / d)
        prev, cur = cur, nxt
        k += 1
        if k % 2 == 0 and cur and all(np.isfinite(cur)):
            best.append(cur[-1])
    if len(best) >= 2:
        return best[-1], abs(best[-1] - best[-2])
    return s[-1], abs(s[-1] - s[-2]) if len(s) > 1 else math.inf


def S2_position(coupling: Coupling, mu2: float, separation: float, rtol: float = 1e-5, zeros: int = 60) -> float:
    """Position-space 2-point function at distance ``separation``.

    S(r) = (2 pi mu^2)^-1 int_0^inf q J0(q mu r) s(q^2) dq with s the
    dimensionless S2.  The free part integrates to K0(mu r); the remainder
    decays like q^-3 log q and is integrated between the zeros of J0, with
    Wynn extrapolation of the partial sums.
    """
    if not (separation > 0):
        raise InputError("the separation must be positive")
    SchwingerPoint(mu2, 0)
    rho = math.sqrt(mu2) * separation
    free = special.k0(rho)
    if coupling.lam2 == 0:
        return float(free / (2 * math.pi * mu2))
    if not coupling.e.is_linear:
        raise InputError("the position-space transform is implemented for the linear eigenvalue function")

    def integrand(q, part):
        P = q * q
        v = q * special.j0(q * rho) * (_S2_unit_axis(coupling, P) - 1 / (P + 1))
        return v.real if part == 0 else v.imag

    edges = np.concatenate([[0.0], special.jn_zeros(0, zeros) / rho])
    parts = [0] if complex(coupling.lam2).imag == 0 and complex(coupling.c).imag == 0 else [0, 1]
    total = 0j
    err = 0.0
    for part in parts:
        sums = []
        acc = 0.0
        quad_err = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, e = integrate.quad(integrand, lo, hi, args=(part,), epsabs=1e-16, epsrel=1e-13, limit=200)
            acc += val
            quad_err += e
            sums.append(acc)
        lim, ext_err = _wynn(sums[-24:])
        total += lim if part == 0 else 1j * lim
        err = max(err, ext_err + quad_err)
    value = (free + total) / (2 * math.pi * mu2)
    scale = abs(value)
    if not math.isfinite(err) or err / (2 * math.pi * mu2) > rtol * scale + 1e-15:
        raise QuadratureError(f"Hankel transform error estimate {err:.2e} above target", err)
    return value.real if abs(value.imag) <= 1e-14 * scale else value


# -- higher N -----------------------------------------------------------------


def symmetry_factor(partition: Sequence[int]) -> int:
    """Product over repeated boundary lengths of the multiplicity factorial."""
    out = 1
    for m in Counter(partition).values():
        out *= math.factorial(m)
    return out


def schwinger_N_integrand(
    coupling: Coupling,
    partition: Sequence[int],
    momenta: Sequence[Sequence[float]],
    points: Sequence[Sequence[float]],
    mu2: float = 1.0,
) -> IntegrandValue:
    """Summand of the connected N-point Schwinger function for one ordering.

    ``momenta`` holds one 2D vector per boundary; ``points`` the N positions
    in boundary order.  The momentum integrals are left to the caller.
    """
    partition = [int(n) for n in partition]
    if not partition or any(n <= 0 for n in partition):
        raise InputError("partition entries must be positive")
    if len(momenta) != len(partition):
        raise InputError("one momentum per boundary is required")
    if len(points) != sum(partition):
        raise InputError(f"{sum(partition)} points expected, got {len(points)}")
    SchwingerPoint(mu2, 0)
    if any(n % 2 for n in partition):
        return IntegrandValue(0j, True)
    pts = np.asarray(points, dtype=float)
    prefactor = 1.0 + 0j
    args = []
    start = 0
    for n, p in zip(partition, momenta):
        p = np.asarray(p, dtype=float)
        signs = np.array([(-1) ** i for i in range(n)], dtype=float)
        xi = signs @ pts[start : start + n]
        start += n
        prefactor *= (2**n / n) * cmath.exp(1j * float(p @ xi)) / (2 * math.pi * mu2)
        x = float(p @ p) / (2 * mu2)
        args.append(((2 * x + 1) ** 2,) * n)
    G = evaluate(coupling, BoundarySpec(tuple(args))).value
    return IntegrandValue(prefactor * G / (8 * math.pi * symmetry_factor(partition)))


# -- scans --------------------------------------------------------------------


def scan_S2(coupling: Coupling, mu2: float, re_range: tuple, im_range: tuple, steps: tuple) -> list:
    """S2 on a rectangle of complex p^2; points on a cut give None."""
    nre, nim = steps
    if nre < 1 or nim < 1:
        raise InputError("scan steps must be positive")
    res = np.linspace(re_range[0], re_range[1], nre) if nre > 1 else np.array([re_range[0]])
    ims = np.linspace(im_range[0], im_range[1], nim) if nim > 1 else np.array([im_range[0]])
    rows = []
    for y in ims:
        for x in res:
            p2 = complex(x, y)
            try:
                rows.append((p2, S2_hat(coupling, mu2, p2)))
            except (DomainError, SingularityError):
                rows.append((p2, None))
    return rows
