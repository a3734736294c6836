"""Dense exact polynomials over ``int`` / ``Fraction``.

A single class covers both integer and rational coefficients; the
coefficient ring is whatever the entries are, and ``Fraction`` keeps
rationals in lowest terms.  Degrees in this project stay in the hundreds,
so schoolbook multiplication is fine.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

import mpmath

Coeff = Union[int, Fraction]

DEFAULT_PRECISION = 256


def _normalize(c) -> Coeff:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _normalize(Fraction(c.numerator, c.denominator))
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


class Polynomial:
    """Immutable dense polynomial; ``coeffs[k]`` multiplies ``var**k``."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "t"):
        cs = [_normalize(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Coeff, ...] = tuple(cs)
        self.var = var

    @classmethod
    def monomial(cls, k: int, c: Coeff = 1, var: str = "t") -> Polynomial:
        return cls([0] * k + [c], var)

    @classmethod
    def constant(cls, c: Coeff, var: str = "t") -> Polynomial:
        return cls([c], var)

    @classmethod
    def one_minus(cls, var: str = "t") -> Polynomial:
        return cls([1, -1], var)

    @property
    def degree(self):
        """Degree, or ``-math.inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __getitem__(self, k: int) -> Coeff:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.var == other.var and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other], self.var).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r}, var={self.var!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono:
                terms.append(f"({c})*{mono}" if isinstance(c, Fraction) or c < 0 else f"{c}*{mono}")
            else:
                terms.append(str(c))
        return " + ".join(terms)

    # -- ring operations ------------------------------------------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.var != self.var:
                raise ValueError(f"variable mismatch: {self.var!r} vs {other.var!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial([other], self.var)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial([c * other for c in self.coeffs], self.var)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial([], self.var)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Polynomial(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only nonnegative integer powers")
        result = Polynomial([1], self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- calculus and evaluation ---------------------------------------

    def derivative(self) -> Polynomial:
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def __call__(self, x):
        """Exact Horner evaluation for int / Fraction arguments."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mp(self, x, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
        """Horner evaluation in ``precision``-bit floating point."""
        if precision < 64:
            raise ValueError("precision must be at least 64 bits")
        with mpmath.workprec(precision):
            x = to_mpf(x)
            acc = mpmath.mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * x + to_mpf(c)
            return +acc

    def shift_down(self) -> Polynomial:
        """Divide by the variable; the constant term must vanish."""
        if self.coeffs and self.coeffs[0] != 0:
            raise ValueError("constant term is nonzero, cannot divide by the variable")
        return Polynomial(self.coeffs[1:], self.var)

    def shift_up(self, k: int = 1) -> Polynomial:
        return Polynomial([0] * k + list(self.coeffs), self.var)

    def divide_one_minus(self) -> Polynomial:
        """Exact quotient by ``(1 - var)``; requires ``p(1) == 0``."""
        if sum(self.coeffs) != 0:
            raise ValueError("not divisible by (1 - t)")
        q, acc = [], 0
        for c in self.coeffs[:-1]:
            acc += c
            q.append(acc)
        return Polynomial(q, self.var)

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> Polynomial:
        return cls([Fraction(c) for c in obj["coeffs"]], obj.get("var", "t"))


def one_minus_t_order(p: Polynomial):
    """Largest ``k`` with ``(1 - t)^k | p``; ``math.inf`` for the zero polynomial."""
    if p.is_zero():
        return math.inf
    k = 0
    while sum(p.coeffs) == 0:
        p = p.divide_one_minus()
        k += 1
    return k


def to_mpf(x) -> mpmath.mpf:
    """Convert ints, Fractions, strings, floats and mpf to mpf at the current precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, mpmath.mpf):
        return +x
    return mpmath.mpf(x)

