"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as ``{exponent_tuple: Fraction}`` with a fixed arity ``R``
(indeterminates ``x_1 .. x_R``).  Zero coefficients are never stored, so two
polynomials are equal iff their term dictionaries are equal.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InputError

__all__ = ["MPoly", "as_fraction"]

Monomial = tuple[int, ...]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise InputError(f"exact rational expected, got {value!r}")


def _term_key(mono: Monomial):
    return (sum(mono), mono)


class MPoly:
    """Polynomial in ``arity`` indeterminates over the rationals."""

    __slots__ = ("arity", "_terms", "_hash")

    def __init__(self, arity: int, terms: Mapping[Monomial, object] | None = None):
        if arity < 0:
            raise InputError("arity must be non-negative")
        self.arity = arity
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != arity:
                raise InputError(f"exponent vector {mono} does not have arity {arity}")
            if any(e < 0 for e in mono):
                raise InputError("negative exponent")
            c = as_fraction(coef)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, arity: int, terms: dict[Monomial, Fraction]) -> "MPoly":
        p = cls.__new__(cls)
        p.arity = arity
        p._terms = terms
        p._hash = None
        return p

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, arity: int) -> "MPoly":
        return cls._raw(arity, {})

    @classmethod
    def const(cls, value, arity: int) -> "MPoly":
        c = as_fraction(value)
        return cls._raw(arity, {(0,) * arity: c} if c else {})

    @classmethod
    def var(cls, index: int, arity: int) -> "MPoly":
        """The indeterminate ``x_index`` (1-based)."""
        if not 1 <= index <= arity:
            raise InputError(f"variable index {index} outside 1..{arity}")
        mono = [0] * arity
        mono[index - 1] = 1
        return cls._raw(arity, {tuple(mono): Fraction(1)})

    # -- inspection ------------------------------------------------------
    @property
    def terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in total-degree-then-lex order."""
        return sorted(self._terms.items(), key=lambda kv: _term_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def coefficient(self, mono: Iterable[int]) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            if other.arity != self.arity:
                raise InputError(f"arity mismatch {self.arity} vs {other.arity}")
            return self._terms == other._terms
        if isinstance(other, numbers.Rational):
            return self == MPoly.const(other, self.arity)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "MPoly(0)"
        parts = []
        for mono, c in self.terms:
            factors = [f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(mono) if e]
            parts.append("*".join([str(c)] + factors) if factors else str(c))
        return "MPoly(" + " + ".join(parts) + ")"

    # -- arithmetic ------------------------------------------------------
    def _lift(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.arity != self.arity:
                raise InputError(f"arity mismatch {self.arity} vs {other.arity}")
            return other
        return MPoly.const(other, self.arity)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return MPoly._raw(self.arity, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.arity, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = as_fraction(other)
            if not c:
                return MPoly.zero(self.arity)
            return MPoly._raw(self.arity, {m: v * c for m, v in self._terms.items()})
        other = self._lift(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MPoly._raw(self.arity, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise InputError("polynomial powers must be non-negative integers")
        result = MPoly.const(1, self.arity)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- evaluation ------------------------------------------------------
    def evaluate(self, values):
        """Substitute ``values[i]`` for ``x_{i+1}``; works for any numeric ring."""
        values = list(values)
        if len(values) < self.arity:
            raise InputError(f"need {self.arity} values, got {len(values)}")
        total = 0
        for mono, c in self._terms.items():
            term = c if all(isinstance(v, (int, Fraction)) for v in values) else (
                complex(c) if any(isinstance(v, complex) for v in values) else float(c))
            for v, e in zip(values, mono):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    def extend(self, arity: int) -> "MPoly":
        """Same polynomial viewed in more indeterminates."""
        if arity < self.arity:
            raise InputError("cannot shrink arity")
        pad = (0,) * (arity - self.arity)
        return MPoly._raw(arity, {m + pad: c for m, c in self._terms.items()})
