"""Spectral data: eigenvalue function, measure, moments and the coupling map.

The model point is fixed by the dimensionless squared coupling ``lam2`` and the
shift ``c`` solving the normalisation W(1) = 1.  For the linear spectrum
e(x) = x the normalisation reads

    1 = s + 2 lam2 log(1 + 1/s),    s = sqrt(1 + c),

and its s-derivative is exactly rho_0 = 1 - 2 lam2 / (s (s+1)).  The critical
coupling is where that derivative vanishes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .bell import double_factorial
from .errors import ConvergenceError, DomainError, InputError, QuadratureError
from .jet import Jet

__all__ = [
    "EigenvalueFunction",
    "LINEAR",
    "Coupling",
    "MomentTable",
    "normalisation_residual",
    "solve_c",
    "critical_point",
    "critical_system",
    "critical_jacobian",
    "moments",
    "c_series",
    "D_jet",
    "D_quadrature",
    "integrate_tail",
    "LAMBDA_C",
    "C_C",
]

# frozen reference values (computed by critical_point, checked in the tests)
LAMBDA_C = 0.4906857
C_C = -0.8737590


@dataclass(frozen=True, eq=False)
class EigenvalueFunction:
    """Monotone spectrum e: R+ -> R+ with e(0) = 0.

    ``Linear`` is the fast path with closed forms; ``Custom`` carries the map,
    its derivative and its inverse.
    """

    kind: str = "Linear"
    e: Optional[Callable[[float], float]] = None
    de: Optional[Callable[[float], float]] = None
    einv: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.kind not in ("Linear", "Custom"):
            raise InputError(f"unknown eigenvalue kind {self.kind!r}")
        if self.kind == "Custom" and None in (self.e, self.de, self.einv):
            raise InputError("a custom eigenvalue function needs e, e' and e^-1")

    @classmethod
    def custom(cls, e, de, einv) -> "EigenvalueFunction":
        return cls("Custom", e, de, einv)

    @property
    def is_linear(self) -> bool:
        return self.kind == "Linear"

    def value(self, x):
        return x if self.is_linear else self.e(x)

    def X_of_x(self, x):
        """Transformed argument X = (2 e(x) + 1)^2."""
        return (2 * self.value(x) + 1) ** 2

    def rho_unit(self, T):
        """Measure rho(T) at lam2 = 1; it is linear in lam2."""
        if self.is_linear:
            return 2.0 / np.sqrt(T)
        return 2.0 / (np.sqrt(T) * self.de(self.einv((np.sqrt(T) - 1.0) / 2.0)))

    def check(self, xs=None, tol: float = 1e-10) -> bool:
        """Sample monotonicity, e(0) = 0 and the inverse round trip."""
        if self.is_linear:
            return True
        xs = np.linspace(0.0, 50.0, 201) if xs is None else np.asarray(xs, float)
        if abs(self.e(0.0)) > tol:
            return False
        if any(self.de(x) <= 0 for x in xs):
            return False
        return all(abs(self.einv(self.e(x)) - x) < tol * max(1.0, abs(x)) for x in xs)


LINEAR = EigenvalueFunction()


def integrate_tail(f, tol: float = 1e-12, limit: int = 400):
    """Integral of a (possibly complex) function over [1, inf).

    Uses T = 1 + u/(1-u) so the algebraic tail becomes a finite interval.
    """

    def mapped(u, part):
        if u >= 1.0:
            return 0.0
        w = 1.0 - u
        val = f(1.0 + u / w) / (w * w)
        return val.real if part == 0 else val.imag

    total = 0.0
    err = 0.0
    imag_needed = True
    try:
        probe = complex(f(2.0))
        imag_needed = probe.imag != 0.0
    except TypeError:
        pass
    for part in (0, 1) if imag_needed else (0,):
        val, est = integrate.quad(mapped, 0.0, 1.0, args=(part,), epsabs=tol, epsrel=tol, limit=limit)
        total = total + (val if part == 0 else 1j * val)
        err = max(err, est)
    if not math.isfinite(err) or err > max(1e3 * tol, 1e-9):
        raise QuadratureError(f"tail quadrature error estimate {err:.3e} above target", err)
    return total


@dataclass(frozen=True)
class Coupling:
    """Solved model point; Z = 1 and nu = 0 are fixed."""

    lam: complex
    lam2: complex
    c: complex
    rho0: complex
    e: EigenvalueFunction = field(default=LINEAR, compare=False)
    residual: float = 0.0

    @property
    def s(self) -> complex:
        return cmath.sqrt(1 + self.c)

    @property
    def is_real(self) -> bool:
        return self.lam2.imag == 0 and self.lam.imag == 0

    def rho(self, T):
        return self.lam2 * self.e.rho_unit(T)

    def rho0_closed(self):
        s = self.s
        return 1 - 2 * self.lam2 / (s * (s + 1))

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "lambda2": self.lam2, "c": self.c, "rho0": self.rho0, "residual": self.residual}


def _to_complex(z) -> complex:
    return complex(z)


def _clean(z: complex, scale: float = 1.0) -> complex:
    """Drop an imaginary part that is pure rounding noise."""
    z = complex(z)
    return complex(z.real, 0.0) if abs(z.imag) <= 1e-15 * max(scale, abs(z.real)) else z


# -- normalisation ---------------------------------------------------------


def _f_linear(s, lam2):
    return s + 2 * lam2 * cmath.log(1 + 1 / s) - 1


def _custom_J(c, e: EigenvalueFunction):
    s = cmath.sqrt(1 + c)
    return 0.5 * integrate_tail(lambda T: e.rho_unit(T) / ((s + np.sqrt(T + c + 0j)) * np.sqrt(T + c + 0j)))


def _custom_dJ(c, e: EigenvalueFunction):
    s = cmath.sqrt(1 + c)

    def g(T):
        a = np.sqrt(T + c + 0j)
        den = (s + a) * a
        dden = a / (2 * s) + (s + a) / (2 * a)
        return -e.rho_unit(T) * dden / den**2

    return 0.5 * integrate_tail(g)


def normalisation_residual(c, lam2, e: EigenvalueFunction = LINEAR) -> float:
    c = _to_complex(c)
    s = cmath.sqrt(1 + c)
    if e.is_linear:
        return abs(_f_linear(s, lam2))
    return abs(s + lam2 * _custom_J(c, e) - 1)


def _check_cut(c: complex) -> None:
    if c.imag == 0 and c.real <= -1:
        raise DomainError(f"c = {c} lies on the cut (-inf, -1]")


def _newton_linear(lam2: complex, steps: int = 16, tol: float = 1e-15):
    """Homotopy continuation lam2 * t, t: 0 -> 1, Newton in s."""
    s = 1.0 + 0j
    trace = []
    for i in range(1, steps + 1):
        L = lam2 * i / steps
        # predictor from the series guess at the first step
        if i == 1:
            s = cmath.sqrt(1 - 4 * L * math.log(2))
        for _ in range(60):
            f = _f_linear(s, L)
            df = 1 - 2 * L / (s * (s + 1))
            if df == 0:
                raise ConvergenceError("vanishing derivative (critical point) during continuation", trace)
            step = f / df
            lam_damp = 1.0
            while True:
                trial = s - lam_damp * step
                if trial.real > 0 and abs(_f_linear(trial, L)) <= abs(f) * (1 - 0.25 * lam_damp) + 1e-300:
                    break
                lam_damp *= 0.5
                if lam_damp < 1e-6:
                    break
            s = trial
            trace.append(abs(_f_linear(s, L)))
            if abs(lam_damp * step) < tol * max(1.0, abs(s)):
                break
        else:
            raise ConvergenceError(f"Newton did not converge at homotopy step {i}", trace)
    return s, trace


def _bisect_real(lam2: float, lam2_c: float, s_c: float):
    """Monotone real branch: s in (s_c, 1] for lam2 > 0, s > 1 for lam2 < 0."""
    if lam2 >= 0:
        lo, hi = s_c, 1.0
    else:
        lo, hi = 1.0, 2.0
        while _f_linear(hi, lam2).real < 0:
            hi *= 2
    flo = _f_linear(lo, lam2).real
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _f_linear(mid, lam2).real
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


def _resolve_lambda(lam, lam2):
    if (lam is None) == (lam2 is None):
        raise InputError("give exactly one of lambda or lambda^2")
    if lam is not None:
        lam = _to_complex(lam)
        return _clean(lam), _clean(lam * lam)
    lam2 = _to_complex(lam2)
    return _clean(cmath.sqrt(lam2)), _clean(lam2)


def solve_c(lam2=None, e: EigenvalueFunction = LINEAR, *, lam=None) -> Coupling:
    """Solve the normalisation W(1) = 1 for c on the branch through c(0) = 0."""
    lam, lam2 = _resolve_lambda(lam, lam2)
    if lam2 == 0:
        return Coupling(lam, lam2, 0j, 1 + 0j, e, 0.0)
    if lam2.imag == 0 and lam2.real > 0:
        lc, cc = critical_point(e) if not e.is_linear else (LAMBDA_C_PRECISE, C_C_PRECISE)
        if lam2.real >= lc * lc:
            raise DomainError(
                f"no solution: |lambda| = {math.sqrt(lam2.real):.6f} is not below the critical value "
                f"lambda_c = {lc:.6f} (c_c = {cc:.6f})"
            )
    if e.is_linear:
        c = _solve_linear(lam2)
        s = cmath.sqrt(1 + c)
        rho0 = 1 - 2 * lam2 / (s * (s + 1))
    else:
        c = _solve_custom(lam2, e)
        rho0 = moments_quadrature(lam2, c, e, 0)[0]
    _check_cut(c)
    res = normalisation_residual(c, lam2, e)
    return Coupling(lam, lam2, _clean(c), _clean(rho0), e, res)


def _solve_linear(lam2: complex) -> complex:
    real = lam2.imag == 0
    try:
        s, _ = _newton_linear(lam2)
    except ConvergenceError:
        if not real:
            raise
        s = None
    if real:
        sc = math.sqrt(1 + C_C_PRECISE)
        if s is None or abs(s.imag) > 1e-12 or abs(_f_linear(s, lam2)) > 1e-13:
            s = complex(_bisect_real(lam2.real, LAMBDA_C_PRECISE**2, sc))
        s = complex(s.real, 0.0)
    return s * s - 1


def _solve_custom(lam2: complex, e: EigenvalueFunction, steps: int = 8) -> complex:
    c = -4 * lam2 * math.log(2) * 0  # the series guess is linear-spectrum specific
    trace = []
    for i in range(1, steps + 1):
        L = lam2 * i / steps
        for _ in range(40):
            s = cmath.sqrt(1 + c)
            F = s + L * _custom_J(c, e) - 1
            dF = 1 / (2 * s) + L * _custom_dJ(c, e)
            step = F / dF
            c = c - step
            trace.append(abs(F))
            if abs(step) < 1e-14:
                break
        else:
            raise ConvergenceError("custom-spectrum Newton did not converge", trace)
    return c


# -- critical point ----------------------------------------------------------


def critical_system(L, c, e: EigenvalueFunction = LINEAR) -> np.ndarray:
    """(normalisation residual, rho_0) as functions of (lam2, c)."""
    s = cmath.sqrt(1 + c)
    if e.is_linear:
        return np.array([_f_linear(s, L).real, (1 - 2 * L / (s * (s + 1))).real])
    J = _custom_J(c, e).real
    I0 = moments_quadrature(1.0, c, e, 0)[0]
    return np.array([(s + L * J - 1).real, (1 - L * (1 - I0)).real])


def critical_jacobian(L, c, e: EigenvalueFunction = LINEAR) -> np.ndarray:
    if not e.is_linear:
        h = 1e-6
        cols = [
            (critical_system(L + h, c, e) - critical_system(L - h, c, e)) / (2 * h),
            (critical_system(L, c + h, e) - critical_system(L, c - h, e)) / (2 * h),
        ]
        return np.column_stack(cols)
    s = math.sqrt(1 + c)
    ds_dc = 1 / (2 * s)
    rho0 = 1 - 2 * L / (s * (s + 1))
    # d/ds [2L/(s(s+1))] = -2L(2s+1)/(s(s+1))^2
    drho0_ds = 2 * L * (2 * s + 1) / (s * (s + 1)) ** 2
    return np.array(
        [
            [2 * math.log(1 + 1 / s), rho0 * ds_dc],
            [-2 / (s * (s + 1)), drho0_ds * ds_dc],
        ]
    )


def critical_point(e: EigenvalueFunction = LINEAR, guess=(0.24, -0.87)) -> tuple[float, float]:
    """Solve {normalisation = 0, rho_0 = 0} by Newton on (lam2, c)."""
    x = np.array(guess, dtype=float)
    trace = []
    for _ in range(100):
        F = critical_system(x[0], x[1], e)
        trace.append(float(np.max(np.abs(F))))
        J = critical_jacobian(x[0], x[1], e)
        dx = np.linalg.solve(J, -F)
        damp = 1.0
        while x[1] + damp * dx[1] <= -1:
            damp *= 0.5
        x = x + damp * dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    else:
        raise ConvergenceError("critical-point Newton did not converge", trace)
    if x[0] <= 0:
        raise ConvergenceError("critical point converged to a non-physical lambda^2", trace)
    return math.sqrt(x[0]), float(x[1])


LAMBDA_C_PRECISE, C_C_PRECISE = critical_point()


# -- moments -----------------------------------------------------------------


@dataclass(frozen=True)
class MomentTable:
    coupling: Coupling
    values: tuple

    @property
    def L(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, l: int):
        return self.values[l]


def _I_linear(c: complex, L: int) -> list:
    """I_l = int_1^inf T^(-1/2) (T+c)^(-3/2-l) dT via derivatives of 2/(s(s+1))."""
    cj = Jet.variable(complex(c), L) if isinstance(c, complex) and c.imag else Jet.variable(float(complex(c).real), L)
    s = (cj + 1).sqrt()
    F = 2 / (s * (s + 1))
    out = []
    prod = 1.0
    for l in range(L + 1):
        deriv = math.factorial(l) * F.coeffs[l]
        out.append((-1) ** l * deriv / prod)
        prod *= 1.5 + l
    return out


def moments_quadrature(lam2, c, e: EigenvalueFunction, L: int) -> list:
    c = complex(c)
    out = []
    for l in range(L + 1):
        p = -1.5 - l
        val = integrate_tail(lambda T, p=p: e.rho_unit(T) * (T + c + 0j) ** p)
        out.append((1.0 if l == 0 else 0.0) - 0.5 * lam2 * val)
    return out


def moments(coupling: Coupling, L: int, method: str = "auto") -> MomentTable:
    """rho_l = delta_{l0} - 1/2 int_1^inf rho(T) (T+c)^(-3/2-l) dT for l = 0..L.

    ``method`` is ``closed`` (linear spectrum, derivatives of the l = 0 integral),
    ``quadrature`` or ``auto``.
    """
    if L < 0:
        raise InputError("moment order must be non-negative")
    _check_cut(complex(coupling.c))
    if method == "auto":
        method = "closed" if coupling.e.is_linear else "quadrature"
    if method == "closed":
        if not coupling.e.is_linear:
            raise InputError("closed-form moments need the linear spectrum")
        Is = _I_linear(complex(coupling.c), L)
        vals = [(1.0 if l == 0 else 0.0) - coupling.lam2 * Is[l] for l in range(L + 1)]
    elif method == "quadrature":
        vals = moments_quadrature(coupling.lam2, coupling.c, coupling.e, L)
    else:
        raise InputError(f"unknown moment method {method!r}")
    return MomentTable(coupling, tuple(_clean(complex(v)) for v in vals))


# -- series and denominators --------------------------------------------------


def c_series(order: int) -> list[float]:
    """Taylor coefficients of c in powers of lam2 (index k is the lam2^k term)."""
    if not 0 <= order <= 10:
        raise InputError("series order must lie in 0..10")
    L = Jet([0.0, 1.0] + [0.0] * (order - 1)) if order >= 1 else Jet([0.0])
    s = Jet.constant(1.0, order)
    # each pass fixes one more coefficient of s = 1 - 2 L log(1 + 1/s)
    for _ in range(order + 1):
        s = 1.0 - 2.0 * L * (1.0 + 1.0 / s).log()
    c = s * s - 1.0
    return [float(v) for v in c.coeffs]


def D_jet(coupling: Coupling, order: int, table: MomentTable | None = None) -> Jet:
    """Denominator D(t) = rho_0 + sum_r (2r+1)!!/(r+1)! rho_r t^r."""
    if table is None or table.L < order:
        table = moments(coupling, order)
    coeffs = [complex(table[0])]
    for r in range(1, order + 1):
        coeffs.append(double_factorial(2 * r + 1) / math.factorial(r + 1) * complex(table[r]))
    return Jet(np.asarray(coeffs, dtype=np.complex128))


def D_quadrature(coupling: Coupling, t: complex) -> complex:
    """1 - int rho(T) / (sqrt(T+c) (sqrt(T+c) + sqrt(T+c-2t)) sqrt(T+c-2t)) dT."""
    c = complex(coupling.c)

    def f(T):
        a = np.sqrt(T + c + 0j)
        b = np.sqrt(T + c - 2 * t + 0j)
        return coupling.rho(T) / (a * (a + b) * b)

    return 1 - integrate_tail(f)
