"""Moments, the normalized MGF and CLT diagnostics.

The normalized descent number is ``W = (d - mu0) / sqrt(n)`` with
``mu0 = (n+1)/2 - m1^2/(2n)`` and ``d`` the canonical descent count.
The limiting law is ``N(0, (1 - 4 alpha^3 + 3 alpha^4) / 12)`` with
``alpha = m1/n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath

from .combinat import CycleType, signed_F
from .descent import DescentPolynomial, SeriesEvaluation, descent_polynomial, sum_with_tail
from .poly import DEFAULT_PRECISION, to_mpf

EXACT_BUDGET = 300
MAX_PRECISION = 1 << 14
S_WINDOW = 4


class PrecisionError(ArithmeticError):
    pass


class DegenerateClassError(ValueError):
    pass


def _poly_for(lam: CycleType, dp: DescentPolynomial | None, budget: int) -> DescentPolynomial:
    if dp is not None:
        if dp.lam != lam:
            raise ValueError("descent polynomial belongs to a different class")
        return dp
    if lam.n > budget:
        raise ValueError(f"exact polynomial budget is n <= {budget}, got {lam.n}")
    return descent_polynomial(lam)


def variance_coefficient(alpha: Fraction) -> Fraction:
    return 1 - 4 * alpha**3 + 3 * alpha**4


def asymptotic_mean(lam: CycleType) -> Fraction:
    return (1 - lam.alpha**2) * Fraction(lam.n, 2)


def asymptotic_variance(lam: CycleType) -> Fraction:
    return variance_coefficient(lam.alpha) * Fraction(lam.n, 12)


def theorem_center(lam: CycleType) -> Fraction:
    """``mu0 = (n+1)/2 - m1^2/(2n)``, the centering of ``W``."""
    n, m1 = lam.n, lam.fixed_points
    return Fraction(n + 1, 2) - Fraction(m1 * m1, 2 * n)


@dataclass(frozen=True)
class MomentReport:
    lam: CycleType
    exact_mean: Fraction
    exact_var: Fraction
    asym_mean: Fraction
    asym_var: Fraction
    center: Fraction
    gaps: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lambda": str(self.lam),
            "n": self.lam.n,
            "exact_mean": str(self.exact_mean),
            "exact_var": str(self.exact_var),
            "asym_mean": str(self.asym_mean),
            "asym_var": str(self.asym_var),
            "center": str(self.center),
            "gaps": {k: format(float(v), ".17g") for k, v in self.gaps.items()},
        }


def exact_moments(lam: CycleType, dp: DescentPolynomial | None = None,
                  budget: int = EXACT_BUDGET) -> MomentReport:
    """Exact mean and variance of ``d`` from ``P'(1)`` and ``P''(1)``."""
    p = _poly_for(lam, dp, budget).canonical
    size = p(1)
    d1 = p.derivative()
    mean = Fraction(d1(1), size)
    var = Fraction(d1.derivative()(1), size) + mean - mean * mean
    asym_mean = asymptotic_mean(lam)
    asym_var = asymptotic_variance(lam)
    center = theorem_center(lam)
    gaps = {
        "mean_vs_asym": mean - asym_mean,
        "var_vs_asym": var - asym_var,
        "mean_vs_center": mean - center,
    }
    return MomentReport(lam, mean, var, asym_mean, asym_var, center, gaps)


# -- MGF -----------------------------------------------------------------


def _mgf_at(p, size: int, mu0: Fraction, n: int, s, precision: int):
    with mpmath.workprec(precision):
        s = to_mpf(s)
        root = mpmath.sqrt(n)
        x = mpmath.exp(s / root)
        value = p.eval_mp(x, precision) / size
        return mpmath.exp(-s * to_mpf(mu0) / root) * value


def mgf_exact(lam: CycleType, s, precision: int = DEFAULT_PRECISION,
              dp: DescentPolynomial | None = None, digits: int = 12,
              budget: int = EXACT_BUDGET) -> mpmath.mpf:
    """``M(s) = E exp(s W)`` from the exact descent polynomial.

    Evaluated at ``precision`` bits and then at doubled precisions until
    two successive values agree to ``digits`` significant digits.
    """
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    p = _poly_for(lam, dp, budget).canonical
    size = p(1)
    mu0 = theorem_center(lam)
    prev = _mgf_at(p, size, mu0, lam.n, s, precision)
    prec = precision
    while prec < MAX_PRECISION:
        prec *= 2
        cur = _mgf_at(p, size, mu0, lam.n, s, prec)
        with mpmath.workprec(prec):
            if abs(cur - prev) <= mpmath.mpf(10) ** (-digits) * abs(cur):
                return cur
        prev = cur
    raise PrecisionError(f"M({s}) for {lam} not stable to {digits} digits at {prec} bits")


def gaussian_target(lam: CycleType, s, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """``exp(s^2/24 * (1 - 4 alpha^3 + 3 alpha^4))``."""
    with mpmath.workprec(precision):
        s = to_mpf(s)
        return mpmath.exp(s * s / 24 * to_mpf(variance_coefficient(lam.alpha)))


@dataclass(frozen=True)
class MgfRow:
    s: mpmath.mpf
    exact: mpmath.mpf
    target: mpmath.mpf
    residual: mpmath.mpf
    scaled: mpmath.mpf | None


@dataclass(frozen=True)
class MgfReport:
    lam: CycleType
    rows: tuple[MgfRow, ...]

    def to_json(self) -> dict:
        return {
            "lambda": str(self.lam),
            "n": self.lam.n,
            "alpha": f"{self.lam.fixed_points}/{self.lam.n}",
            "rows": [
                {
                    "s": fmt(r.s),
                    "exact": fmt(r.exact),
                    "target": fmt(r.target),
                    "residual": fmt(r.residual),
                    "scaled": None if r.scaled is None else fmt(r.scaled),
                }
                for r in self.rows
            ],
        }


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering used in every report."""
    return mpmath.nstr(to_mpf(x), 17, min_fixed=-4, max_fixed=17, strip_zeros=False)


def residual_report(lam: CycleType, s_grid, precision: int = DEFAULT_PRECISION,
                    dp: DescentPolynomial | None = None) -> MgfReport:
    """Exact MGF against the Gaussian target on ``s_grid``.

    ``scaled = residual * sqrt(n) / log(n)^3`` (natural log); ``None`` when
    ``n = 1``.
    """
    dp = _poly_for(lam, dp, EXACT_BUDGET)
    rows = []
    n = lam.n
    for s in s_grid:
        if abs(float(s)) > S_WINDOW:
            raise ValueError(f"|s| must be <= {S_WINDOW}, got {s}")
        exact = mgf_exact(lam, s, precision, dp=dp)
        with mpmath.workprec(precision):
            target = gaussian_target(lam, s, precision)
            residual = abs(exact - target)
            scaled = residual * mpmath.sqrt(n) / mpmath.log(n) ** 3 if n >= 2 else None
            rows.append(MgfRow(to_mpf(s), exact, target, residual, scaled))
    return MgfReport(lam, tuple(rows))


# -- series representation of the MGF -------------------------------------


@dataclass(frozen=True)
class SeriesTermDiag:
    lam: CycleType
    a: int
    sign: int
    K: int
    factors: dict


def series_term_diag(lam: CycleType, a: int, sign: int) -> SeriesTermDiag:
    """``K_a = prod_i K_a^(i)`` for the given sign of ``s``.

    ``sign < 0`` uses ``prod_k (F_{i,a} + ik)``, ``sign > 0`` uses
    ``prod_k (-1)^i (F_{i,-a} + ik)``.
    """
    if a < 1:
        raise ValueError("a must be positive")
    if sign == 0:
        raise ValueError("sign must be nonzero")
    factors = {}
    total = 1
    for i, count in lam.cycles():
        if sign < 0:
            F, flip = signed_F(i, a), 1
        else:
            F, flip = signed_F(i, -a), (-1) ** i
        prod = 1
        for k in range(count):
            prod *= flip * (F + i * k)
        factors[i] = prod
        total *= prod
    return SeriesTermDiag(lam, a, 1 if sign > 0 else -1, total, factors)


def l_term(lam: CycleType, a: int, s, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """``L_a = (|s|/sqrt n)^(n+1) / n! * K_a * exp(-|s| a/sqrt n + m1^2 s / (2 n^1.5))``."""
    with mpmath.workprec(precision):
        s = to_mpf(s)
        n, m1 = lam.n, lam.fixed_points
        root = mpmath.sqrt(n)
        K = series_term_diag(lam, a, -1 if s < 0 else 1).K
        return (
            (abs(s) / root) ** (n + 1) / factorial(n) * K
            * mpmath.exp(-abs(s) * a / root + m1 * m1 * s / (2 * n * root))
        )


def sinh_prefactor(n: int, s) -> mpmath.mpf:
    """``(sinh(s / 2 sqrt n) / (s / 2 sqrt n))^(n+1)``; 1 at s = 0."""
    s = to_mpf(s)
    if s == 0:
        return mpmath.mpf(1)
    h = s / (2 * mpmath.sqrt(n))
    return (mpmath.sinh(h) / h) ** (n + 1)


def mgf_series(lam: CycleType, s, tol=1e-12, precision: int = DEFAULT_PRECISION,
               convention: str = "canonical") -> SeriesEvaluation:
    """MGF of ``W`` through the ``sum_a L_a`` representation.

    The series itself produces the MGF of ``(d + 1 - mu0)/sqrt n`` (series
    convention); ``convention="canonical"`` multiplies by ``exp(-s/sqrt n)``
    so the value is directly comparable with :func:`mgf_exact`.
    """
    if convention not in ("canonical", "series"):
        raise ValueError(f"unknown convention {convention!r}")
    with mpmath.workprec(precision):
        s = to_mpf(s)
        if s == 0:
            return SeriesEvaluation(mpmath.mpf(1), 0, mpmath.mpf(0))
        n, m1 = lam.n, lam.fixed_points
        root = mpmath.sqrt(n)
        x = mpmath.exp(-abs(s) / root)
        sign = -1 if s < 0 else 1
        prefactor = (
            sinh_prefactor(n, s)
            * (abs(s) / root) ** (n + 1) / factorial(n)
            * mpmath.exp(m1 * m1 * s / (2 * n * root))
        )
        if convention == "canonical":
            prefactor *= mpmath.exp(-s / root)

        def term(a):
            return series_term_diag(lam, a, sign).K * x**a

        return sum_with_tail(term, lam, x, prefactor, to_mpf(tol), denom=1)


# -- g_n ------------------------------------------------------------------


def g_eval(n: int, z, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """``(1 + z/sqrt n)^n exp(-sqrt n z)`` for ``z > -sqrt n``, else 0."""
    if n < 1:
        raise ValueError("n must be positive")
    with mpmath.workprec(precision):
        z = to_mpf(z)
        root = mpmath.sqrt(n)
        if z <= -root:
            return mpmath.mpf(0)
        return mpmath.exp(n * mpmath.log1p(z / root) - root * z)


def g_dominance_violations(N: int, ns, zs, tol=1e-12,
                           precision: int = DEFAULT_PRECISION) -> list[tuple]:
    """Grid points where ``g_n <= g_N`` (z >= 0) or ``g_n <= exp(-z^2/2)`` (z < 0) fails."""
    bad = []
    with mpmath.workprec(precision):
        for n in ns:
            if n < N:
                raise ValueError(f"need n >= N, got n={n} < N={N}")
            for z in zs:
                z = to_mpf(z)
                value = g_eval(n, z, precision)
                bound = g_eval(N, z, precision) if z >= 0 else mpmath.exp(-z * z / 2)
                if value > bound + tol:
                    bad.append((n, float(z), float(value), float(bound)))
    return bad


# -- distribution distance -------------------------------------------------


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2))


def ks_distance(lam: CycleType, dp: DescentPolynomial | None = None,
                center: str = "theorem", kind: str = "sup") -> float:
    """Distance between the exact law of ``W`` and its Gaussian limit.

    ``kind="sup"`` is the plain sup-norm over the real line (Kolmogorov
    distance).  ``kind="midpoint"`` compares the Gaussian CDF with the
    midpoint of each jump instead, which removes the half-jump floor every
    lattice law has against a continuous one.
    ``center="exact"`` recenters at the exact mean instead of ``mu0``.
    """
    coeff = variance_coefficient(lam.alpha)
    if coeff == 0:
        raise DegenerateClassError(f"class {lam} has degenerate limiting variance")
    p = _poly_for(lam, dp, EXACT_BUDGET).canonical
    size = p(1)
    n = lam.n
    if center == "theorem":
        mu = theorem_center(lam)
    elif center == "exact":
        mu = Fraction(p.derivative()(1), size)
    else:
        raise ValueError(f"unknown center {center!r}")
    sigma = math.sqrt(float(coeff) / 12)
    below = Fraction(0)
    worst = 0.0
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        mass = Fraction(c, size)
        w = float(k - mu) / math.sqrt(n)
        phi = _normal_cdf(w / sigma)
        if kind == "midpoint":
            worst = max(worst, abs(float(below + mass / 2) - phi))
        elif kind == "sup":
            worst = max(worst, abs(float(below) - phi), abs(float(below + mass) - phi))
        else:
            raise ValueError(f"unknown kind {kind!r}")
        below += mass
    return min(1.0, worst)


def log_convexity_defect(values, step) -> float:
    """Smallest second difference of ``log M`` on an evenly spaced grid."""
    logs = [mpmath.log(v) for v in values]
    diffs = [(logs[i - 1] - 2 * logs[i] + logs[i + 1]) / step**2 for i in range(1, len(logs) - 1)]
    return float(min(diffs)) if diffs else 0.0
