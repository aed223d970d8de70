"""Perturbative and combinatorial cross-checks.

Taylor coefficients of the exact correlators in the squared coupling come from
the Cauchy integral over a small circle |lambda^2| = R, discretised by the
trapezoidal rule (spectrally accurate for analytic integrands).  Targets that
are odd in lambda are divided by lambda first.
"""

from __future__ import annotations

import cmath
import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import bell
from .correlators import G1, G2, W, G_1plus1, X_of_x
from .divdiff import divided_difference
from .errors import ConvergenceError, DomainError, InputError
from .jet import Jet
from .spectral import LAMBDA_C, LINEAR, EigenvalueFunction, c_series, critical_point, solve_c

__all__ = [
    "SeriesExtract",
    "extract_series",
    "TARGETS",
    "g1_series_term",
    "feyn_g1_term",
    "two_point_order2",
    "toy_graph_values",
    "check_order3_onepoint",
    "check_order2_twopoint",
    "Check",
    "SuiteReport",
    "run_suite",
    "SUITES",
]

LOG2 = math.log(2.0)


# -- Cauchy extraction ---------------------------------------------------------


def _target_c(cp, args):
    return cp.c


def _target_W(cp, args):
    return W(cp, args[0])


def _target_G1(cp, args):
    return G1(cp, args[0])


def _target_G2(cp, args):
    return G2(cp, args[0], args[1])


def _target_G11(cp, args):
    return G_1plus1(cp, args[0], args[1])


# name -> (function of (coupling, args), number of args, parity in lambda)
TARGETS: dict[str, tuple[Callable, int, int]] = {
    "c": (_target_c, 0, 0),
    "W": (_target_W, 1, 0),
    "G1": (_target_G1, 1, 1),
    "G2": (_target_G2, 2, 0),
    "G1+1": (_target_G11, 2, 0),
}


@dataclass(frozen=True)
class SeriesExtract:
    """Taylor coefficients in lambda; ``coefficients[n]`` multiplies lambda^n.

    Entries of the target's parity come from the extraction in lambda^2;
    the others from a separate circle in lambda and only measure the parity
    leak.
    """

    target: str
    args: tuple
    radius: float
    order: int
    coefficients: list
    points: int
    doubling_error: float
    parity_leak: float

    def __getitem__(self, n: int) -> complex:
        return self.coefficients[n]


def _circle_values(fn, args, nodes, e, use_lam):
    out = np.empty(len(nodes), dtype=complex)
    for j, z in enumerate(nodes):
        try:
            cp = solve_c(lam=z, e=e) if use_lam else solve_c(lam2=z, e=e)
        except DomainError as exc:
            raise DomainError(f"extraction circle leaves the analytic region at {z:.4g}: {exc}") from exc
        out[j] = complex(fn(cp, args))
    return out


def extract_series(
    target: str,
    args: Sequence = (),
    order: int = 5,
    radius: float = 0.01,
    M: int = 64,
    e: EigenvalueFunction = LINEAR,
    check_parity: bool = True,
) -> SeriesExtract:
    """Coefficients of lambda^0 .. lambda^order of a correlator at fixed arguments."""
    if target not in TARGETS:
        raise InputError(f"unknown target {target!r}; choose from {sorted(TARGETS)}")
    fn, nargs, parity = TARGETS[target]
    args = tuple(args)
    if len(args) != nargs:
        raise InputError(f"target {target} takes {nargs} argument(s), got {len(args)}")
    if order < 0:
        raise InputError("order must be non-negative")
    if not 0 < radius < 0.5 * LAMBDA_C**2:
        raise DomainError(f"radius {radius} must lie in (0, {0.5 * LAMBDA_C ** 2:.4f}) to stay inside the analytic disk")
    if M < 2 * (order // 2 + 1):
        raise InputError("too few circle points for the requested order")

    K = (order - parity) // 2 + 1 if order >= parity else 0
    # 2M nodes; the even-indexed ones form the M-point rule
    nodes = radius * np.exp(2j * np.pi * np.arange(2 * M) / (2 * M))

    def h(cp, a):
        v = fn(cp, a)
        return v / cp.lam if parity else v

    vals = _circle_values(h, args, nodes, e, use_lam=False)

    def coeffs(v, m):
        a = np.fft.fft(v) / m
        return np.array([a[k] / radius**k for k in range(K)])

    fine = coeffs(vals, 2 * M)
    coarse = coeffs(vals[::2], M)
    doubling = float(np.max(np.abs(fine - coarse))) if K else 0.0
    scale = max(1.0, float(np.max(np.abs(fine)))) if K else 1.0
    if doubling > 1e-6 * scale:
        raise ConvergenceError(f"Cauchy coefficients change by {doubling:.2e} when doubling the circle points")

    out = [0j] * (order + 1)
    for k in range(K):
        out[2 * k + parity] = complex(fine[k])

    leak = 0.0
    if check_parity and order >= 1:
        rl = math.sqrt(radius)
        lnodes = rl * np.exp(2j * np.pi * np.arange(2 * M) / (2 * M))
        lvals = _circle_values(fn, args, lnodes, e, use_lam=True)
        a = np.fft.fft(lvals) / (2 * M)
        wrong = [abs(a[n] / rl**n) for n in range(order + 1) if n % 2 != parity]
        for n in range(order + 1):
            if n % 2 != parity:
                out[n] = complex(a[n] / rl**n)
        right = max([abs(out[n]) for n in range(order + 1) if n % 2 == parity] + [1e-300])
        leak = max(wrong, default=0.0) / right
    return SeriesExtract(target, args, radius, order, out, M, doubling, leak)


# -- printed expansions --------------------------------------------------------


def g1_series_term(n: int, x: float) -> float:
    """Coefficient of lambda^n in the small-coupling expansion of G1(x), n = 1, 3, 5."""
    u = 1.0 / (2 * x + 1)
    if n == 1:
        return u * math.log(x + 1)
    if n == 3:
        return LOG2**2 * (u - u**3)
    if n == 5:
        return LOG2**2 * u + (2 * LOG2**3 - LOG2**2) * u**3 - 2 * LOG2**3 * u**5
    raise InputError("the printed expansion covers lambda, lambda^3 and lambda^5")


def feyn_g1_term(x: float) -> float:
    """Sum of the four order-3 one-point graphs."""
    u = 1.0 / (2 * x + 1)
    return LOG2**2 * u - LOG2**2 * u**3


def _log_dd(x1: float, x2: float) -> float:
    """(log(x1+1) - log(x2+1)) / (x1 - x2), including the diagonal."""

    def taylor(z0, n):
        return [complex(v) for v in Jet.variable(z0 + 1, n - 1).log().coeffs]

    return divided_difference([x1, x2], lambda z: cmath.log(z + 1), taylor).real


def two_point_order2(x1: float, x2: float) -> float:
    """Sum of the order-2 two-point graphs of one boundary."""
    return (_log_dd(x1, x2) - math.log(x1 + 1) / (2 * x1 + 1) - math.log(x2 + 1) / (2 * x2 + 1)) / (x1 + x2 + 1) ** 2


# -- toy graphs ----------------------------------------------------------------


def _face_integral_gamma2(x1: float, x2: float, cutoff: Optional[float]) -> float:
    """int_0^cutoff dy / ((x1+y+1)(x2+y+1)) by partial fractions."""
    A, B = x1 + 1.0, x2 + 1.0
    if cutoff is None:
        return _log_dd(x1, x2)
    L = float(cutoff)
    if abs(A - B) <= 1e-9 * max(A, B):
        return L / (A * (A + L))
    return (math.log1p(L / A) - math.log1p(L / B)) / (B - A)


def toy_graph_values(graph: str, args: Sequence[float], lam: complex = 1.0, cutoff: Optional[float] = None) -> complex:
    """Weights of the three example graphs.

    ``graph`` is ``"G1"``, ``"G2"`` or ``"G3"`` (Gamma_1, Gamma_2, Gamma_3).
    Gamma_1 is returned renormalised (subtracted at x = 0); ``cutoff`` is the
    upper limit of the face integrals, ``None`` meaning infinity.
    """
    args = [float(a) for a in args]
    if any(a < 0 for a in args):
        raise InputError("face variables must be non-negative")
    key = graph.replace("Gamma", "G").replace("Γ", "G").replace("_", "")
    if key == "G1":
        if len(args) != 1:
            raise InputError("Gamma_1 takes one face variable")
        (x,) = args
        if cutoff is None:
            face = -math.log(x + 1)
        else:
            face = math.log1p(cutoff / (x + 1)) - math.log1p(cutoff)
        return -lam * face / (2 * x + 1)
    if key == "G2":
        if len(args) != 2:
            raise InputError("Gamma_2 takes two face variables")
        x1, x2 = args
        return lam**2 / (x1 + x2 + 1) ** 2 * _face_integral_gamma2(x1, x2, cutoff)
    if key == "G3":
        if len(args) != 2:
            raise InputError("Gamma_3 takes two face variables")
        x1, x2 = args
        return lam**2 / ((2 * x1 + 1) * (2 * x2 + 1) * (x1 + x2 + 1) ** 2)
    raise InputError(f"unknown graph {graph!r}; choose G1, G2 or G3")


# -- order checks --------------------------------------------------------------


def check_order3_onepoint(x: float, tol: float = 1e-7) -> bool:
    if x < 0:
        raise InputError("x must be non-negative")
    coef = extract_series("G1", (x,), order=3, check_parity=False)[3]
    return abs(coef - feyn_g1_term(x)) < tol


def check_order2_twopoint(x1: float, x2: float, tol: float = 1e-7) -> bool:
    if x1 < 0 or x2 < 0:
        raise InputError("face variables must be non-negative")
    ext = extract_series("G2", (X_of_x(x1), X_of_x(x2)), order=2, check_parity=False)
    free = 1.0 / (x1 + x2 + 1)
    return abs(ext[0] - free) < tol and abs(ext[2] - two_point_order2(x1, x2)) < tol


# -- suites --------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    observed: object = None
    expected: object = None
    tolerance: object = None
    params: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    checks: list
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": len(self.failures()),
            "seconds": round(self.seconds, 3),
            "checks": [asdict(c) for c in self.checks],
        }


def _close(name, observed, expected, tol, **params) -> Check:
    err = abs(observed - expected)
    return Check(name, bool(err < tol), observed, expected, tol, params)


def suite_bell(max_n: int = 8, footnote_m: int = 4, footnote_p: int = 4, footnote_n: int = 3, **_) -> list:
    checks = []
    vals = (0, 1, -1, 2, 3)
    for n in range(1, max_n + 1):
        for k in range(0, n):
            for alpha, beta in itertools.product(vals, vals):
                ok = bell.verify_bell_identity_1(n, k, alpha, beta)
                if not ok:
                    checks.append(Check("bell identity", False, params={"n": n, "k": k, "alpha": alpha, "beta": beta}))
    checks.append(Check("bell identity sweep", not checks, params={"max_n": max_n}))
    fails = []
    count = 0
    for m in range(footnote_m + 1):
        for p in range(2, footnote_p + 1):
            for counts in itertools.product(range(footnote_n + 1), repeat=p - 1):
                count += 1
                if not bell.verify_footnote_identity(m, counts):
                    fails.append(Check("footnote identity", False, params={"m": m, "counts": list(counts)}))
    checks.extend(fails)
    checks.append(Check("footnote identity sweep", not fails, observed=count, params={"max_m": footnote_m, "max_p": footnote_p}))
    return checks


def suite_conjecture(max_l: int = 4, max_p: int = 3, max_n: int = 3, **_) -> list:
    fails = []
    count = 0
    nontrivial = 0
    for l in range(max_l + 1):
        for p in range(0, max_p + 1):
            for counts in itertools.product(range(max_n + 1), repeat=p + 1):
                if not any(counts):
                    continue
                count += 1
                lhs, rhs = bell.conjecture_sides(l, counts)
                if not (lhs.is_zero() and rhs.is_zero()):
                    nontrivial += 1
                if lhs != rhs:
                    fails.append(Check("conjecture", False, str(lhs), str(rhs), params={"l": l, "counts": list(counts)}))
    return fails + [
        Check(
            "conjecture sweep",
            not fails,
            observed={"cases": count, "nontrivial": nontrivial},
            params={"max_l": max_l, "max_p": max_p, "max_n": max_n},
        )
    ]


def suite_gamma(max_b: int = 9, **_) -> list:
    checks = []
    for B in range(3, max_b + 1):
        table = bell.gamma_recursive(B)
        ok = all(table[M] == bell.gamma_closed(B, M) for M in range(B - 2))
        checks.append(Check(f"gamma B={B}", ok, params={"B": B}))
    return checks


def suite_inteq(lambdas: Sequence[float] = (0.1, 0.3), n: int = 2000, Xi: float = 1e8, **_) -> list:
    from .correlators import G_1plus1 as g11
    from .inteq import closed_form_G11, closed_form_W, make_grid, residual_report, solve_W_inteq

    grid = make_grid(n=n, Xi=Xi)
    checks = []
    for lam in lambdas:
        cp = solve_c(lam=lam)
        rep = residual_report("W", closed_form_W(cp), grid, cp)
        checks.append(Check("W closed form residual", rep.sup < 1e-6, rep.sup, 0.0, 1e-6, {"lambda": lam}))
        sol = solve_W_inteq(cp.lam2, grid=grid)
        ref = closed_form_W(cp).f(grid.nodes)
        err = float(np.max(np.abs(sol - ref)))
        checks.append(Check("solve_W_inteq vs closed form", err < 1e-5, err, 0.0, 1e-5, {"lambda": lam}))
    cp = solve_c(lam=0.3)
    pts = np.logspace(0, 4, 5)
    worst = 0.0
    for Y in pts:
        rep = residual_report("G11", closed_form_G11(cp, Y), grid, cp, Y=Y, points=pts)
        worst = max(worst, rep.sup)
    checks.append(Check("(1+1) residual on 5x5 grid", worst < 1e-6, worst, 0.0, 1e-6, {"lambda": 0.3}))
    cf = closed_form_G11(cp, 25.0).f(np.array([9.0]))[0]
    checks.append(_close("(1+1) vectorised vs scalar", complex(cf), g11(cp, 9.0, 25.0), 1e-12, X=9.0, Y=25.0))
    return checks


def suite_series(xs: Sequence[float] = (0.5, 1.0, 2.0), **_) -> list:
    checks = []
    for x in xs:
        ext = extract_series("G1", (x,), order=5)
        for n in (1, 3, 5):
            checks.append(_close(f"G1 lambda^{n}", ext[n].real, g1_series_term(n, x), 1e-7, x=x))
        checks.append(_close("G1 lambda^3 vs graph sum", ext[3].real, feyn_g1_term(x), 1e-7, x=x))
        checks.append(Check("G1 parity leak", ext.parity_leak < 1e-8, ext.parity_leak, 0.0, 1e-8, {"x": x}))
    for x1, x2 in ((1.0, 2.0), (0.5, 2.0), (1.0, 1.0)):
        ext = extract_series("G2", (X_of_x(x1), X_of_x(x2)), order=2)
        checks.append(_close("two-point lambda^2 vs graph sum", ext[2].real, two_point_order2(x1, x2), 1e-7, x1=x1, x2=x2))
        checks.append(_close("two-point free part", ext[0].real, 1 / (x1 + x2 + 1), 1e-10, x1=x1, x2=x2))
    for x1, x2 in ((0.0, 0.0), (1.0, 2.0)):
        ext = extract_series("G1+1", (X_of_x(x1), X_of_x(x2)), order=2, check_parity=False)
        checks.append(_close("(1|1) lambda^2 vs Gamma_3", ext[2].real, toy_graph_values("G3", (x1, x2)), 1e-7, x1=x1, x2=x2))
    ext = extract_series("c", (), order=6, check_parity=False)
    frozen = c_series(3)
    for k in (1, 2, 3):
        checks.append(_close(f"c lambda^{2 * k}", ext[2 * k].real, frozen[k], 1e-7))
    return checks


def suite_schwinger(lam: float = 0.3, lam2_imag: float = -0.04, mu2: float = 1.0, **_) -> list:
    from .schwinger import STIELTJES_VIOLATED, positivity_check

    checks = []
    rep = positivity_check(solve_c(lam=lam), mu2)
    checks.append(
        Check(
            "real coupling: Im S2 at the test point",
            rep.verdict == STIELTJES_VIOLATED and rep.imaginary_part_sign == "negative",
            {"value": rep.value, "verdict": rep.verdict},
            "negative imaginary part",
            None,
            {"lambda": lam, "mu2": mu2},
        )
    )
    cp = solve_c(lam2_imag)
    rep = positivity_check(cp, mu2)
    c = cp.c.real
    expected = sorted([mu2 * complex(-1, math.sqrt(c)), mu2 * complex(-1, -math.sqrt(c))], key=lambda z: z.imag)
    got = sorted(rep.branch_points, key=lambda z: z.imag)
    err = max(abs(a - b) for a, b in zip(got, expected))
    checks.append(
        Check(
            "imaginary coupling: branch points",
            err < 1e-8 and rep.verdict == STIELTJES_VIOLATED,
            {"branch_points": got, "verdict": rep.verdict},
            expected,
            1e-8,
            {"lambda2": lam2_imag, "mu2": mu2},
        )
    )
    return checks


def suite_critical(**_) -> list:
    L, c = critical_point()
    return [_close("critical coupling", L, 0.490686, 1e-5), _close("critical c", c, -0.873759, 1e-5)]


SUITES: dict[str, Callable[..., list]] = {
    "bell": suite_bell,
    "conjecture": suite_conjecture,
    "gamma": suite_gamma,
    "inteq": suite_inteq,
    "series": suite_series,
    "schwinger": suite_schwinger,
}


def run_suite(name: str, **options) -> list[SuiteReport]:
    """Run one named suite, or all of them for ``name == "all"``."""
    names = list(SUITES) if name == "all" else [name]
    reports = []
    for n in names:
        if n not in SUITES:
            raise InputError(f"unknown suite {n!r}; choose from {sorted(SUITES)} or 'all'")
        t0 = time.perf_counter()
        checks = SUITES[n](**options)
        reports.append(SuiteReport(n, checks, time.perf_counter() - t0))
    return reports
