"""Partial Bell polynomials, the gamma coefficient tower and related identities.

Everything here is exact: coefficients are :class:`fractions.Fraction` and the
Bell variables are either rationals or :class:`~phi3matrix.mpoly.MPoly`
indeterminates.  The gamma tower is stored in the reduced variables

    x_r = -(2r+1)!! rho_r / ((r+1) rho_0),

so that gamma^M_B = g^M_B(x) / rho_0^(B-3) with g a polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from .errors import InconsistencyError, InputError
from .mpoly import MPoly

__all__ = [
    "double_factorial",
    "bell_partial",
    "bell_partial_definition",
    "bell_symbolic",
    "verify_bell_identity_1",
    "GammaTable",
    "gamma_closed",
    "gamma_recursive",
    "conjecture_sides",
    "verify_conjecture",
    "footnote_sides",
    "verify_footnote_identity",
    "x_from_moments",
]


def double_factorial(n: int) -> int:
    if n < -1:
        raise InputError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _check_nk(n: int, k: int) -> None:
    if n < 0 or k < 0:
        raise InputError(f"Bell indices must be non-negative, got ({n}, {k})")


def _zero_like(xs):
    for x in xs:
        if isinstance(x, MPoly):
            return MPoly.zero(x.arity)
    return Fraction(0)


def _one_like(xs):
    for x in xs:
        if isinstance(x, MPoly):
            return MPoly.const(1, x.arity)
    return Fraction(1)


def bell_partial(n: int, k: int, xs: Sequence):
    """B_{n,k}(x_1, ..., x_{n-k+1}) by the standard recurrence.

    ``xs[j-1]`` plays the role of ``x_j``.  Entries may be rationals or MPolys.
    """
    _check_nk(n, k)
    if n >= 1 and k <= n and len(xs) < n - k + 1:
        raise InputError(f"B_{{{n},{k}}} needs {n - k + 1} variables, got {len(xs)}")
    zero, one = _zero_like(xs), _one_like(xs)
    if k > n:
        return zero
    # table[m][q] = B_{m,q}; only q <= k and m <= n are needed
    table = [[zero] * (k + 1) for _ in range(n + 1)]
    table[0][0] = one
    for m in range(1, n + 1):
        for q in range(max(1, m - (n - k)), min(m, k) + 1):
            acc = zero
            for j in range(1, m - q + 2):
                prev = table[m - j][q - 1]
                if isinstance(prev, MPoly) and prev.is_zero():
                    continue
                acc = acc + xs[j - 1] * prev * comb(m - 1, j - 1)
            table[m][q] = acc
    return table[n][k]


def _compositions(n: int, k: int, width: int):
    """Non-negative j_1..j_width with sum j = k and sum i*j_i = n."""

    def rec(i, left_k, left_n):
        if i > width:
            if left_k == 0 and left_n == 0:
                yield ()
            return
        for j in range(0, min(left_k, left_n // i) + 1):
            for tail in rec(i + 1, left_k - j, left_n - i * j):
                yield (j,) + tail

    yield from rec(1, k, n)


def bell_partial_definition(n: int, k: int, xs: Sequence):
    """B_{n,k} from the multi-index sum of the definition (slow cross-check)."""
    _check_nk(n, k)
    zero, one = _zero_like(xs), _one_like(xs)
    if n == 0:
        return one if k == 0 else zero
    if k > n:
        return zero
    width = n - k + 1
    if len(xs) < width:
        raise InputError(f"B_{{{n},{k}}} needs {width} variables, got {len(xs)}")
    total = zero
    for js in _compositions(n, k, width):
        coef = Fraction(factorial(n))
        term = one
        for i, j in enumerate(js, start=1):
            if j:
                coef /= factorial(j) * factorial(i) ** j
                term = term * xs[i - 1] ** j
        total = total + term * coef
    return total


@lru_cache(maxsize=None)
def bell_symbolic(n: int, k: int, arity: int) -> MPoly:
    """B_{n,k} over the indeterminates x_1..x_arity (memoised)."""
    _check_nk(n, k)
    if n == 0:
        return MPoly.const(1 if k == 0 else 0, arity)
    if k == 0 or k > n:
        return MPoly.zero(arity)
    if arity < n - k + 1:
        raise InputError(f"arity {arity} too small for B_{{{n},{k}}}")
    acc = MPoly.zero(arity)
    for j in range(1, n - k + 2):
        prev = bell_symbolic(n - j, k - 1, arity)
        if not prev.is_zero():
            acc = acc + MPoly.var(j, arity) * prev * comb(n - 1, j - 1)
    return acc


def _xs(arity: int) -> list[MPoly]:
    return [MPoly.var(i, arity) for i in range(1, arity + 1)]


def verify_bell_identity_1(n: int, k: int, alpha, beta, perturbation: MPoly | None = None) -> bool:
    """Check sum_j (alpha j + beta) C(n,j) x_j B_{n-j,k} = (alpha n + beta (k+1)) B_{n,k+1}.

    ``perturbation`` is added to the right side; used for mutation tests.
    """
    if n < 1 or not 0 <= k <= n - 1:
        raise InputError(f"need n >= 1 and 0 <= k <= n-1, got n={n}, k={k}")
    alpha, beta = Fraction(alpha), Fraction(beta)
    R = max(n - k, 1)
    lhs = MPoly.zero(R)
    for j in range(1, n - k + 1):
        lhs = lhs + MPoly.var(j, R) * bell_symbolic(n - j, k, R) * ((alpha * j + beta) * comb(n, j))
    rhs = bell_symbolic(n, k + 1, R) * (alpha * n + beta * (k + 1))
    if perturbation is not None:
        rhs = rhs + perturbation.extend(R) if perturbation.arity <= R else rhs + perturbation
    return lhs == rhs


# -- gamma tower -----------------------------------------------------------


@dataclass(frozen=True)
class GammaTable:
    """gamma^M_B = entries[M][0] / rho_0^entries[M][1] with polynomials in x_r."""

    B: int
    entries: dict = field(default_factory=dict)

    def __getitem__(self, M: int) -> tuple[MPoly, int]:
        return self.entries[M]

    def evaluate(self, rho0, xs: Sequence) -> list:
        """Numeric gamma^M_B for M = 0..B-3 given rho_0 and x_1.. values."""
        out = []
        for M in range(self.B - 2):
            poly, power = self.entries[M]
            out.append(poly.evaluate(list(xs)[: poly.arity]) / rho0 ** power)
        return out


def gamma_closed(B: int, M: int) -> tuple[MPoly, int]:
    """Closed Bell-polynomial form of gamma^M_B as (polynomial in x_r, rho_0 power)."""
    if B < 3:
        raise InputError(f"B must be >= 3, got {B}")
    if not 0 <= M <= B - 3:
        raise InputError(f"M must lie in 0..{B - 3}, got {M}")
    R = B - 3
    s = B - 3 - M
    total = MPoly.zero(R)
    for K in range(0, s + 1):
        bell = bell_symbolic(s, K, R)
        if bell.is_zero():
            continue
        total = total + bell * Fraction(factorial(B - 3 + K), factorial(s) * factorial(M))
    return total, B - 3


@lru_cache(maxsize=None)
def _g_recursive(B: int) -> tuple[MPoly, ...]:
    R = B - 3
    if B == 3:
        return (MPoly.const(1, 0),)
    prev = [p.extend(R) for p in _g_recursive(B - 1)]
    xs = _xs(R)
    g: list[MPoly | None] = [None] * (B - 2)
    for M in range(B - 3, -1, -1):
        acc = prev[M - 1] if M >= 1 else MPoly.zero(R)
        for j in range(1, B - 3 - M + 1):
            acc = acc + xs[j - 1] * g[M + j] * (comb(M + j, j) * (j + 1))
        g[M] = acc
    # second relation of the triangular system, must hold identically
    for M in range(0, B - 3):
        lhs = g[M + 1] * (3 * (M + 1))
        for j in range(1, B - 4 - M + 1):
            lhs = lhs - xs[j - 1] * g[M + 1 + j] * (comb(M + 1 + j, j + 1) * (2 * j + 3) * (j + 1))
        if lhs != prev[M] * (2 * M + B - 1):
            raise InconsistencyError(f"consistency relation fails at B={B}, M={M}")
    return tuple(g)


def gamma_recursive(B: int) -> GammaTable:
    """gamma^M_B for all M by descending back-substitution from gamma^M_3 = delta_{M,0}."""
    if B < 3:
        raise InputError(f"B must be >= 3, got {B}")
    g = _g_recursive(B)
    return GammaTable(B, {M: (g[M], B - 3) for M in range(B - 2)})


def x_from_moments(rhos: Sequence) -> list:
    """x_r = -(2r+1)!! rho_r / ((r+1) rho_0) for r >= 1."""
    rho0 = rhos[0]
    return [-double_factorial(2 * r + 1) * rhos[r] / ((r + 1) * rho0) for r in range(1, len(rhos))]


# -- Conjecture on Bell polynomials ----------------------------------------


def _tower_sum(a: int, s: int, R: int) -> MPoly:
    """sum_K (a+K)! B_{s,K} / s!, dropping terms with negative factorial arguments."""
    if s < 0:
        return MPoly.zero(R)
    total = MPoly.zero(R)
    for K in range(0, s + 1):
        if a + K < 0:
            continue
        bell = bell_symbolic(s, K, R)
        if not bell.is_zero():
            total = total + bell * Fraction(factorial(a + K), factorial(s))
    return total


def conjecture_sides(l: int, counts: Sequence[int], mutate: bool = False) -> tuple[MPoly, MPoly]:
    """Both sides of the conjectured Bell identity as polynomials in x_r.

    ``counts`` is (n_0, ..., n_p).  With ``mutate`` the factorial (N'-2+K')!
    of the product term is replaced by (N-1+K')!, a deliberately broken
    identity used by the mutation tests.
    """
    if l < 0:
        raise InputError("l must be non-negative")
    counts = [int(n) for n in counts]
    if not counts or any(n < 0 for n in counts) or not any(counts):
        raise InputError("counts must be non-negative with at least one positive entry")
    N = sum(counts)
    M = sum(i * n for i, n in enumerate(counts))
    s = N - M - l - 4
    R = max(s, 1)

    c_l = Fraction(double_factorial(2 * l + 5), factorial(l + 2))
    weight = Fraction(0)
    for i, n in enumerate(counts):
        if n:
            weight += n * Fraction(
                double_factorial(2 * l + 2 * i + 3) * (2 * i + 1) * factorial(i),
                double_factorial(2 * i + 1) * factorial(l + i + 1),
            )
    lhs = _tower_sum(N - 2, s, R) * c_l - _tower_sum(N - 3, s, R) * weight

    rhs = MPoly.zero(R)
    for j in range(1, s + 1):
        coef = Fraction(
            double_factorial(2 * j + 2 * l + 5) * factorial(j + 1),
            double_factorial(2 * j + 1) * factorial(j + l + 2) * factorial(j),
        )
        rhs = rhs + MPoly.var(j, R) * _tower_sum(N - 2, s - j, R) * coef

    half = Fraction(1, 2)
    for lp in range(0, l + 1):
        lpp = l - lp
        pref = half * Fraction(
            double_factorial(2 * lp + 1) * double_factorial(2 * lpp + 1),
            factorial(lp) * factorial(lpp),
        )
        for sub in itertools.product(*(range(n + 1) for n in counts)):
            Np = sum(sub)
            Mp = sum(i * n for i, n in enumerate(sub))
            sp = Np - Mp - lp - 2
            spp = (N - Np) - (M - Mp) - lpp - 2
            if sp < 0 or spp < 0:
                continue
            mult = 1
            for n, k in zip(counts, sub):
                mult *= comb(n, k)
            first = _tower_sum(N - 1 if mutate else Np - 2, sp, R)
            rhs = rhs + first * _tower_sum(N - Np - 2, spp, R) * (pref * mult)
    return lhs, rhs


def verify_conjecture(l: int, counts: Sequence[int], mutate: bool = False) -> bool:
    lhs, rhs = conjecture_sides(l, counts, mutate)
    return lhs == rhs


# -- footnote identity ------------------------------------------------------


def footnote_sides(m: int, counts: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Both sides of the auxiliary rational identity; ``counts`` is (n_2, ..., n_p)."""
    if m < 0:
        raise InputError("m must be non-negative")
    counts = [int(n) for n in counts]
    if any(n < 0 for n in counts):
        raise InputError("counts must be non-negative")
    js = range(2, 2 + len(counts))
    df = double_factorial

    lhs = Fraction(0)
    for sub in itertools.product(*(range(n + 1) for n in counts)):
        rest = [n - k for n, k in zip(counts, sub)]
        a1 = sum(j * k for j, k in zip(js, sub))
        b1 = sum((j - 1) * k for j, k in zip(js, sub))
        a2 = sum(j * k for j, k in zip(js, rest))
        b2 = sum((j - 1) * k for j, k in zip(js, rest))
        mult = 1
        for n, k in zip(counts, sub):
            mult *= comb(n, k)
        for kp in range(m + 1):
            kpp = m - kp
            lhs += Fraction(
                df(2 * kp + 1) * df(2 * kpp + 1) * factorial(kp + a1) * factorial(kpp + a2) * mult,
                factorial(kp) * factorial(kpp) * factorial(2 + kp + b1) * factorial(2 + kpp + b2),
            )

    A = sum(j * n for j, n in zip(js, counts))
    Bsum = sum((j - 1) * n for j, n in zip(js, counts))
    brace = Fraction(df(2 * m + 3), factorial(m))
    for j, n in zip(js, counts):
        if n:
            brace += n * (
                Fraction(df(2 * m + 3), factorial(m + 2)) * ((m + 3) * j + m + 2)
                - Fraction(factorial(j) * df(2 * j + 2 * m + 3), factorial(j + m + 1) * df(2 * j - 1))
            )
    rhs = Fraction(2 * factorial(m + 1 + A), factorial(m + 4 + Bsum)) * brace
    return lhs, rhs


def verify_footnote_identity(m: int, counts: Sequence[int]) -> bool:
    lhs, rhs = footnote_sides(m, counts)
    return lhs == rhs
