"""Truncated Taylor series ("jets") in one variable.

A :class:`Jet` of order ``K`` stores the Taylor coefficients ``c[0..K]`` of a
function at some base point; arithmetic truncates at order ``K``.  Coefficients
may be floats, complex numbers, exact :class:`fractions.Fraction` values, or
jets themselves (which gives mixed Taylor expansions in several variables).

All transcendental operations use principal branches with the cut on
``(-inf, 0]``.
"""

from __future__ import annotations

import cmath
import math
import numbers
from fractions import Fraction

import numpy as np

from .errors import DomainError, SingularityError

__all__ = ["Jet", "jsqrt", "jlog", "jexp", "jpow"]


def _is_exactish(x) -> bool:
    return isinstance(x, (Fraction, Jet)) or not isinstance(x, numbers.Number)


def _as_array(coeffs) -> np.ndarray:
    seq = list(coeffs)
    if not seq:
        raise ValueError("a jet needs at least one coefficient")
    if any(_is_exactish(c) for c in seq):
        arr = np.empty(len(seq), dtype=object)
        arr[:] = seq
        return arr
    if any(isinstance(c, complex) or np.iscomplexobj(c) for c in seq):
        return np.asarray(seq, dtype=np.complex128)
    return np.asarray(seq, dtype=np.float64)


def _zeros_like(first, n: int) -> np.ndarray:
    if isinstance(first, Jet):
        arr = np.empty(n, dtype=object)
        for i in range(n):
            arr[i] = first * 0
        return arr
    if isinstance(first, Fraction) or not isinstance(first, numbers.Number):
        arr = np.empty(n, dtype=object)
        arr[:] = [first * 0] * n
        return arr
    if isinstance(first, (complex, np.complexfloating)):
        return np.zeros(n, dtype=np.complex128)
    return np.zeros(n, dtype=np.float64)


def _on_cut(x) -> bool:
    return x.imag == 0 and x.real <= 0


def _scalar_sqrt(x):
    if isinstance(x, Jet):
        return x.sqrt()
    if isinstance(x, Fraction):
        n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if x >= 0 and n * n == x.numerator and d * d == x.denominator:
            return Fraction(n, d)
        x = float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return complex(np.sqrt(complex(x)))
    x = float(x)
    return math.sqrt(x) if x >= 0 else complex(0.0, math.sqrt(-x))


def _scalar_log(x):
    if isinstance(x, Jet):
        return x.log()
    z = complex(x)
    if z == 0:
        raise SingularityError("log of zero")
    if isinstance(x, (complex, np.complexfloating)):
        return cmath.log(z)
    return math.log(z.real) if z.real > 0 else cmath.log(z)


def _scalar_exp(x):
    if isinstance(x, Jet):
        return x.exp()
    if isinstance(x, Fraction):
        if x == 0:
            return Fraction(1)
        x = float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return cmath.exp(x)
    return math.exp(x)


def _scalar_pow(x, alpha):
    if isinstance(x, Jet):
        return x ** alpha
    if isinstance(alpha, int) or (isinstance(alpha, Fraction) and alpha.denominator == 1):
        if isinstance(x, Fraction) or not isinstance(x, numbers.Number):
            return x ** int(alpha)
    if isinstance(x, Fraction):
        x = float(x)
    z = complex(x)
    if z == 0:
        raise SingularityError("power of zero with non-integer exponent")
    w = cmath.exp(float(alpha) * cmath.log(z))
    if isinstance(x, (complex, np.complexfloating)) or z.real < 0:
        return w
    return w.real


class Jet:
    """Truncated power series ``sum_k coeffs[k] t**k`` of fixed order."""

    __slots__ = ("coeffs",)
    __array_priority__ = 1000
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.coeffs = coeffs if isinstance(coeffs, np.ndarray) else _as_array(coeffs)

    # -- constructors ----------------------------------------------------
    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        """Jet of the identity map ``t -> x0 + t``."""
        if order == 0:
            return cls([x0])
        one = x0 * 0 + 1
        return cls([x0, one] + [x0 * 0] * (order - 1))

    @classmethod
    def constant(cls, c, order: int) -> "Jet":
        return cls([c] + [c * 0] * order)

    # -- basic protocol --------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self) -> str:
        return f"Jet({list(self.coeffs)!r})"

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.coeffs[: order + 1].copy())

    def derivative(self, k: int = 1):
        """k-th derivative at the base point, ``k! * coeffs[k]``."""
        return math.factorial(k) * self.coeffs[k]

    def __eq__(self, other):
        if isinstance(other, Jet):
            n = min(self.order, other.order) + 1
            return all(a == b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))
        return NotImplemented

    __hash__ = None

    def _coerce(self, other):
        if isinstance(other, Jet):
            n = min(self.order, other.order) + 1
            return self.coeffs[:n], other.coeffs[:n]
        a = self.coeffs
        b = _zeros_like(a[0], len(a))
        b[0] = other
        if b.dtype != object and a.dtype == object:
            b = b.astype(object)
        return a, b

    # -- ring operations -------------------------------------------------
    def __neg__(self):
        return Jet(-self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._coerce(other)
            return Jet(a + b)
        first = self.coeffs[0] + other
        c = self.coeffs
        if c.dtype != object and not isinstance(first, numbers.Number):
            c = c.astype(object)
        elif c.dtype == np.float64 and isinstance(first, (complex, np.complexfloating)):
            c = c.astype(np.complex128)
        else:
            c = c.copy()
        c[0] = first
        return Jet(c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * other)
        a, b = self._coerce(other)
        n = len(a)
        out = _zeros_like(a[0] * b[0], n)
        for k in range(n):
            out[k] = np.dot(a[: k + 1], b[k::-1])
        return Jet(out)

    def __rmul__(self, other):
        return Jet(other * self.coeffs) if not isinstance(other, Jet) else other * self

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            if other == 0:
                raise SingularityError("division of a jet by zero")
            return Jet(self.coeffs / other if not isinstance(other, Fraction) else self.coeffs * (1 / other))
        a, b = self._coerce(other)
        b0 = b[0]
        if b0 == 0:
            raise SingularityError("division by a jet with zero constant term")
        n = len(a)
        q = _zeros_like(a[0] / b0, n)
        for k in range(n):
            acc = a[k]
            if k:
                acc = acc - np.dot(b[1 : k + 1], q[k - 1 :: -1])
            q[k] = acc / b0
        return Jet(q)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order) / self

    def __pow__(self, alpha):
        if isinstance(alpha, Jet):
            return (alpha * self.log()).exp()
        if isinstance(alpha, int) and alpha >= 0:
            result = Jet.constant(self.coeffs[0] * 0 + 1, self.order)
            base = self
            e = alpha
            while e:
                if e & 1:
                    result = result * base
                e >>= 1
                if e:
                    base = base * base
            return result
        return self._power(alpha)

    def _power(self, alpha):
        a = self.coeffs
        a0 = a[0]
        if a0 == 0:
            raise SingularityError("non-integer power of a jet with zero constant term")
        if not isinstance(a0, Jet) and not isinstance(a0, Fraction) and isinstance(a0, numbers.Number) and _on_cut(complex(a0)) and not (isinstance(alpha, int)):
            raise DomainError(f"power of jet with constant term {a0} on the branch cut")
        n = len(a)
        y0 = _scalar_pow(a0, alpha)
        y = _zeros_like(y0, n)
        y[0] = y0
        for k in range(1, n):
            acc = 0 * y0
            for j in range(1, k + 1):
                acc = acc + (alpha * j - (k - j)) * a[j] * y[k - j]
            y[k] = acc / (k * a0)
        return Jet(y)

    # -- elementary functions -------------------------------------------
    def sqrt(self) -> "Jet":
        a0 = self.coeffs[0]
        if not isinstance(a0, (Jet, Fraction)) and isinstance(a0, numbers.Number) and _on_cut(complex(a0)):
            raise DomainError(f"sqrt of jet with constant term {a0} on the branch cut")
        a = self.coeffs
        n = len(a)
        y0 = _scalar_sqrt(a0)
        y = _zeros_like(y0, n)
        y[0] = y0
        two_y0 = 2 * y0
        for k in range(1, n):
            acc = a[k]
            if k > 1:
                acc = acc - np.dot(y[1:k], y[k - 1 : 0 : -1])
            y[k] = acc / two_y0
        return Jet(y)

    def log(self) -> "Jet":
        a = self.coeffs
        a0 = a[0]
        if not isinstance(a0, (Jet, Fraction)) and isinstance(a0, numbers.Number) and _on_cut(complex(a0)):
            raise DomainError(f"log of jet with constant term {a0} on the branch cut")
        n = len(a)
        y0 = _scalar_log(a0)
        y = _zeros_like(y0, n)
        y[0] = y0
        for k in range(1, n):
            acc = k * a[k]
            for j in range(1, k):
                acc = acc - j * y[j] * a[k - j]
            y[k] = acc / (k * a0)
        return Jet(y)

    def exp(self) -> "Jet":
        a = self.coeffs
        n = len(a)
        y0 = _scalar_exp(a[0])
        y = _zeros_like(y0, n)
        y[0] = y0
        for k in range(1, n):
            acc = 0 * y0
            for j in range(1, k + 1):
                acc = acc + j * a[j] * y[k - j]
            y[k] = acc / k if not isinstance(acc, Fraction) else acc / Fraction(k)
        return Jet(y)

    def compose(self, derivatives) -> "Jet":
        """Apply ``f`` given ``derivatives[k] = f^(k)(coeffs[0])``.

        Uses ``f(a) = sum_k f^(k)(a0)/k! (a - a0)^k``; ``(a - a0)`` is nilpotent
        at this order so the sum terminates.
        """
        n = len(self.coeffs)
        if len(derivatives) < n:
            raise ValueError("need as many derivatives as coefficients")
        delta = Jet(self.coeffs.copy())
        delta.coeffs[0] = delta.coeffs[0] * 0
        result = Jet.constant(derivatives[0], self.order)
        power = Jet.constant(self.coeffs[0] * 0 + 1, self.order)
        for k in range(1, n):
            power = power * delta
            result = result + power * (derivatives[k] / math.factorial(k))
        return result


def jsqrt(x):
    return x.sqrt() if isinstance(x, Jet) else _scalar_sqrt(x)


def jlog(x):
    return x.log() if isinstance(x, Jet) else _scalar_log(x)


def jexp(x):
    return x.exp() if isinstance(x, Jet) else _scalar_exp(x)


def jpow(x, alpha):
    return x ** alpha if isinstance(x, Jet) else _scalar_pow(x, alpha)
