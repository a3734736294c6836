"""Generating functions for descents over conjugacy classes.

Two conventions are in play and every function says which one it returns:

* canonical: ``P_lambda(t) = sum over the class of t^d(pi)``, with ``d`` the
  plain descent count;
* series: ``t * P_lambda(t)``.  This is what the ``a``-indexed necklace
  series produce (for the single fixed point, ``(1-t)^2 sum a t^a = t``),
  and what the Stirling form ``sum_k S(n,k) k! t^k (1-t)^(n-k)`` of the
  Eulerian polynomial gives.

Exact polynomials are always built through the ``a``-polynomial and
Eulerian polynomials; the numeric series are only used as checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath

from .combinat import (
    CycleType,
    class_size,
    necklace_polynomial,
    signed_F,
    stirling2,
)
from .poly import DEFAULT_PRECISION, Polynomial, one_minus_t_order, to_mpf

CANONICAL = "canonical"
SERIES = "series"
MAX_TERMS = 10**6


@lru_cache(maxsize=None)
def _eulerian_series(n: int) -> Polynomial:
    t = Polynomial([0, 1])
    one_minus = Polynomial.one_minus()
    acc = Polynomial([])
    for k in range(n + 1):
        c = stirling2(n, k) * factorial(k)
        if c:
            acc = acc + (t**k) * (one_minus ** (n - k)) * c
    return acc


def eulerian_polynomial(n: int, convention: str = CANONICAL) -> Polynomial:
    """Eulerian polynomial of ``S_n``.

    ``convention="series"`` returns ``sum_k S(n,k) k! t^k (1-t)^(n-k)``,
    which equals ``t`` times the canonical one.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    series = _eulerian_series(n)
    if convention == SERIES:
        return series
    if convention == CANONICAL:
        return series.shift_down()
    raise ValueError(f"unknown convention {convention!r}")


@lru_cache(maxsize=None)
def _class_numerator(lam: CycleType) -> Polynomial:
    """``prod_i prod_{k<m_i} (F_{i,a} + i k)`` as an integer polynomial in a."""
    acc = Polynomial([1], "a")
    for i, count in lam.cycles():
        base = necklace_polynomial(i)
        for k in range(count):
            shifted = list(base)
            shifted[0] += i * k
            acc = acc * Polynomial(shifted, "a")
    return acc


def product_in_a(lam: CycleType) -> Polynomial:
    """``prod_i binom(f_{i,a} + m_i - 1, m_i)`` expanded in powers of ``a``.

    Rational coefficients; integer-valued at every integer ``a >= 1``.
    """
    denom = lam.centralizer_order()
    return Polynomial([Fraction(c, denom) for c in _class_numerator(lam).coeffs], "a")


def class_weight(lam: CycleType, a: int) -> Fraction:
    """``prod_i binom(f_{i,a} + m_i - 1, m_i)`` at an integer ``a`` of either sign.

    Built from ``signed_F`` directly, so negative ``a`` gives the formal
    values used outside the unit disk.
    """
    num = 1
    for i, count in lam.cycles():
        F = signed_F(i, a)
        for k in range(count):
            num *= F + i * k
    return Fraction(num, lam.centralizer_order())


@dataclass(frozen=True)
class DescentPolynomial:
    lam: CycleType
    canonical: Polynomial

    @property
    def series(self) -> Polynomial:
        """``t * P_lambda(t)``, the object the necklace series sum to."""
        return self.canonical.shift_up()

    @property
    def class_size(self) -> int:
        return sum(self.canonical.coeffs)

    def to_json(self) -> dict:
        return {
            "lambda": str(self.lam),
            "n": self.lam.n,
            "coeffs": [str(c) for c in self.canonical.coeffs],
            "class_size": str(self.class_size),
        }


def _series_literal(lam: CycleType) -> Polynomial:
    """``sum_k c_k (1-t)^(n-k) A_k(t)`` term by term (series convention)."""
    n = lam.n
    c = product_in_a(lam)
    one_minus = Polynomial.one_minus()
    acc = Polynomial([])
    for k in range(1, n + 1):
        if c[k]:
            acc = acc + eulerian_polynomial(k, SERIES) * (one_minus ** (n - k)) * c[k]
    return acc


def _series_stirling(lam: CycleType) -> Polynomial:
    """Same sum regrouped as ``sum_j beta_j t^j (1-t)^(n-j)``.

    ``beta_j = j! sum_k c_k S(k, j)`` is an integer (a forward difference of
    an integer-valued polynomial), so the whole pipeline stays in ints.
    """
    n = lam.n
    num = _class_numerator(lam)
    denom = lam.centralizer_order()
    coeffs: list[int] = []
    for j in range(n + 1):
        total = sum(num[k] * stirling2(k, j) for k in range(j, n + 1))
        beta, rem = divmod(total * factorial(j), denom)
        assert rem == 0, f"non-integral beta_{j} for {lam}"
        # Horner step: H_j = (1 - t) H_{j-1} + beta_j t^j
        shifted = [0] + coeffs
        coeffs = [(coeffs[i] if i < len(coeffs) else 0) - shifted[i] for i in range(len(shifted))]
        coeffs[j] += beta
    return Polynomial(coeffs)


def descent_polynomial(lam: CycleType, route: str = "stirling") -> DescentPolynomial:
    """Exact canonical descent polynomial of the conjugacy class ``lam``.

    ``route`` selects between the regrouped Stirling form (default, O(n^2)
    big-int operations) and the literal Eulerian sum; both are exact.
    """
    if route == "stirling":
        series = _series_stirling(lam)
    elif route == "literal":
        series = _series_literal(lam)
    else:
        raise ValueError(f"unknown route {route!r}")
    assert series.is_integral(), f"non-integer coefficients for {lam}"
    return DescentPolynomial(lam, series.shift_down())


# -- numeric series ------------------------------------------------------


@dataclass(frozen=True)
class SeriesEvaluation:
    value: mpmath.mpf
    terms_used: int
    tail_bound: mpmath.mpf
    converged: bool = True


class SeriesTruncationError(RuntimeError):
    """Raised when the tail bound cannot reach ``tol`` within the term cap."""

    def __init__(self, message: str, partial: SeriesEvaluation):
        super().__init__(message)
        self.partial = partial


def term_majorant(lam: CycleType, a: int) -> int:
    """Integer ``B(a)`` with ``|prod_i prod_k (F_{i,+-a} + ik)| <= B(a)``.

    Uses ``|F_{i,-a}| <= a^i + 2 a^(i/2)`` with ``a^(i/2)`` rounded up to
    ``a^ceil(i/2)``.  Each factor grows by at most ``((a+1)/a)^i`` when
    ``a -> a+1``, so ``B(a+1) <= (1 + 1/a)^n B(a)``.
    """
    out = 1
    for i, count in lam.cycles():
        base = a**i + 2 * a ** ((i + 1) // 2)
        for k in range(count):
            out *= base + i * k
    return out


def sum_with_tail(
    term,
    lam: CycleType,
    x,
    prefactor,
    tol,
    max_terms: int = MAX_TERMS,
    denom: int | None = None,
) -> SeriesEvaluation:
    """Sum ``prefactor * sum_{a>=1} term(a)`` with a certified stop.

    ``term(a)`` must satisfy ``|term(a)| <= B(a) x^a / denom`` where ``B`` is
    :func:`term_majorant`, ``denom`` defaults to the centralizer order and
    ``0 < x < 1``.  Arguments are already at the working precision.
    """
    n = lam.n
    if denom is None:
        denom = lam.centralizer_order()
    scale = abs(prefactor) / denom
    total = mpmath.mpf(0)
    bound = mpmath.inf
    a = 0
    for a in range(1, max_terms + 1):
        total += term(a)
        nxt = a + 1
        ratio = x * (1 + mpmath.mpf(1) / nxt) ** n
        if ratio < 1:
            bound = scale * term_majorant(lam, nxt) * x**nxt / (1 - ratio)
            if bound <= tol:
                return SeriesEvaluation(prefactor * total, a, bound)
    partial = SeriesEvaluation(prefactor * total, a, bound, converged=False)
    raise SeriesTruncationError(f"tail bound {bound} above tol after {a} terms", partial)


def series_inside(lam: CycleType, t, tol=1e-12, precision: int = DEFAULT_PRECISION,
                  max_terms: int = MAX_TERMS) -> SeriesEvaluation:
    """``(1-t)^(n+1) sum_{a>=1} t^a prod_i binom(f_{i,a}+m_i-1, m_i)`` for ``|t| < 1``.

    Converges to ``t * P_lambda(t)`` (series convention).
    """
    with mpmath.workprec(precision):
        t = to_mpf(t)
        tol = to_mpf(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        if not abs(t) < 1:
            raise ValueError(f"series_inside needs |t| < 1, got {t}")
        if t == 0:
            return SeriesEvaluation(mpmath.mpf(0), 0, mpmath.mpf(0))
        prefactor = (1 - t) ** (lam.n + 1)

        def term(a):
            w = class_weight(lam, a)
            return mpmath.mpf(w.numerator) / w.denominator * t**a

        return sum_with_tail(term, lam, abs(t), prefactor, tol, max_terms)


def series_outside(lam: CycleType, t, tol=1e-12, precision: int = DEFAULT_PRECISION,
                   max_terms: int = MAX_TERMS) -> SeriesEvaluation:
    """``(t-1)^(n+1) sum_{a>=1} t^-a (-1)^n prod_i binom(f_{i,-a}+m_i-1, m_i)`` for ``|t| > 1``.

    Converges to ``t * P_lambda(t)`` (series convention).
    """
    with mpmath.workprec(precision):
        t = to_mpf(t)
        tol = to_mpf(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        if not abs(t) > 1:
            raise ValueError(f"series_outside needs |t| > 1, got {t}")
        n = lam.n
        prefactor = (t - 1) ** (n + 1) * (-1) ** n
        inv = 1 / t

        def term(a):
            w = class_weight(lam, -a)
            return mpmath.mpf(w.numerator) / w.denominator * inv**a

        return sum_with_tail(term, lam, abs(inv), prefactor, tol, max_terms)


# -- expansion identity ----------------------------------------------------


def expansion_coefficients(lam: CycleType) -> tuple[Fraction, Fraction]:
    """First- and second-order coefficients of the ``(1-t)`` expansion."""
    m1, m2, m3, m4 = (lam.mult(i) for i in (1, 2, 3, 4))
    first = Fraction(comb(m1, 2) - m2)
    second = (
        Fraction(3 * m1 - 1, 4) * comb(m1, 3)
        + 3 * comb(m2, 2)
        - m2 * comb(m1, 2)
        - m3
        - m4
    )
    return first, second


def fulman_expansion_residual(lam: CycleType) -> tuple[Polynomial, object]:
    """Residual of the three-term expansion of ``A_lambda(t) / |C_lambda|``.

    Everything is in the series convention.  Returns the residual
    polynomial and its ``(1-t)``-adic order, which should be at least 3.
    """
    n = lam.n
    if n < 3:
        raise ValueError("expansion needs n >= 3")
    first, second = expansion_coefficients(lam)
    one_minus = Polynomial.one_minus()
    lhs = descent_polynomial(lam).series * Fraction(1, class_size(lam))
    rhs = (
        eulerian_polynomial(n, SERIES) * Fraction(1, factorial(n))
        + one_minus * eulerian_polynomial(n - 1, SERIES) * (first / (n * factorial(n - 1)))
        + one_minus**2
        * eulerian_polynomial(n - 2, SERIES)
        * (second / (n * (n - 1) * factorial(n - 2)))
    )
    residual = lhs - rhs
    return residual, one_minus_t_order(residual)
