"""Number-theoretic and partition primitives.

Everything here works on Python ints, so values never overflow.  The
central object is :class:`CycleType`, a partition of ``n`` stored as the
dense multiplicity vector ``m_1, ..., m_n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence


def mobius(d: int) -> int:
    """Möbius function by trial division."""
    if d < 1:
        raise ValueError(f"mobius is defined for d >= 1, got {d}")
    result = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    if d > 1:
        result = -result
    return result


def divisors(i: int) -> list[int]:
    if i < 1:
        raise ValueError(f"divisors needs i >= 1, got {i}")
    small, large = [], []
    d = 1
    while d * d <= i:
        if i % d == 0:
            small.append(d)
            if d * d != i:
                large.append(i // d)
        d += 1
    return small + large[::-1]


def signed_F(i: int, a: int) -> int:
    """``F_{i,a} = sum_{d | i} mu(d) a^(i/d)``, evaluated literally.

    ``a`` may be any integer; negative arguments are the formal
    evaluations used by the series outside the unit disk.
    """
    if i < 1:
        raise ValueError(f"signed_F needs i >= 1, got {i}")
    return sum(mobius(d) * a ** (i // d) for d in divisors(i))


def necklace_count(i: int, a: int) -> int:
    """Number of primitive circular words of length ``i`` over ``a`` letters."""
    if a < 0:
        raise ValueError("necklace_count needs a >= 0; use signed_F for formal values")
    total = signed_F(i, a)
    q, r = divmod(total, i)
    assert r == 0, f"Möbius sum {total} not divisible by {i}"
    return q


def necklace_polynomial(i: int) -> list[int]:
    """Integer coefficients (index = power of a) of ``F_{i,a}`` as a polynomial in a."""
    coeffs = [0] * (i + 1)
    for d in divisors(i):
        coeffs[i // d] += mobius(d)
    return coeffs


def ord2(i: int) -> int:
    """2-adic valuation of a positive integer."""
    return (i & -i).bit_length() - 1


@lru_cache(maxsize=None)
def _stirling2_table(n: int) -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for r in range(1, n + 1):
        prev = rows[-1]
        row = [0] * (r + 1)
        for k in range(1, r + 1):
            row[k] = (k * prev[k] if k < r else 0) + prev[k - 1]
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def _stirling1_table(n: int) -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for r in range(1, n + 1):
        prev = rows[-1]
        row = [0] * (r + 1)
        for k in range(1, r + 1):
            row[k] = ((r - 1) * prev[k] if k < r else 0) + prev[k - 1]
        rows.append(tuple(row))
    return tuple(rows)


def stirling2(n: int, k: int) -> int:
    """Set partitions of an ``n``-set into ``k`` blocks; 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError("stirling2 needs nonnegative arguments")
    if k > n:
        return 0
    return _stirling2_table(n)[n][k]


def stirling1_unsigned(n: int, k: int) -> int:
    """Permutations of ``n`` elements with exactly ``k`` cycles; 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError("stirling1_unsigned needs nonnegative arguments")
    if k > n:
        return 0
    return _stirling1_table(n)[n][k]


def falling_factorial(a: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= a - j
    return out


_POWER_TERM = re.compile(r"^(\d+)\^(\d+)$")


@dataclass(frozen=True)
class CycleType:
    """Partition ``lambda`` of ``n`` given by cycle multiplicities.

    ``m[i - 1]`` is the number of ``i``-cycles, so ``m`` always has length ``n``.
    """

    n: int
    m: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"degree must be positive, got {self.n}")
        if len(self.m) != self.n:
            raise ValueError(f"need {self.n} multiplicities, got {len(self.m)}")
        if any(x < 0 for x in self.m):
            raise ValueError("multiplicities must be nonnegative")
        if sum((i + 1) * x for i, x in enumerate(self.m)) != self.n:
            raise ValueError(f"multiplicities {self.m} do not sum to {self.n}")

    @classmethod
    def from_parts(cls, parts: Sequence[int]) -> CycleType:
        parts = [int(p) for p in parts]
        if not parts or any(p < 1 for p in parts):
            raise ValueError(f"invalid parts {parts!r}")
        n = sum(parts)
        m = [0] * n
        for p in parts:
            m[p - 1] += 1
        return cls(n, tuple(m))

    @classmethod
    def from_multiplicities(cls, mult: dict[int, int]) -> CycleType:
        """Build from ``{cycle length: count}``."""
        parts: list[int] = []
        for length, count in mult.items():
            if count < 0:
                raise ValueError(f"negative multiplicity for {length}")
            parts.extend([length] * count)
        return cls.from_parts(parts)

    @classmethod
    def parse(cls, text: str) -> CycleType:
        """Parse ``"3,1,1"`` or the multiplicity form ``"1^2 3^1"``."""
        text = text.strip()
        if not text:
            raise ValueError("empty cycle type")
        if "^" in text:
            mult: dict[int, int] = {}
            for tok in re.split(r"[\s,]+", text):
                match = _POWER_TERM.match(tok)
                if not match:
                    raise ValueError(f"bad multiplicity term {tok!r} in {text!r}")
                length, count = int(match.group(1)), int(match.group(2))
                mult[length] = mult.get(length, 0) + count
            return cls.from_multiplicities(mult)
        try:
            parts = [int(tok) for tok in text.split(",")]
        except ValueError:
            raise ValueError(f"bad cycle type {text!r}") from None
        return cls.from_parts(parts)

    @classmethod
    def identity(cls, n: int) -> CycleType:
        return cls.from_parts([1] * n)

    def mult(self, i: int) -> int:
        """Number of ``i``-cycles (0 outside ``1..n``)."""
        return self.m[i - 1] if 1 <= i <= self.n else 0

    @property
    def parts(self) -> tuple[int, ...]:
        out: list[int] = []
        for i in range(self.n, 0, -1):
            out.extend([i] * self.m[i - 1])
        return tuple(out)

    @property
    def fixed_points(self) -> int:
        return self.m[0]

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.m[0], self.n)

    def cycles(self) -> Iterator[tuple[int, int]]:
        """``(length, multiplicity)`` for lengths that occur."""
        for i, count in enumerate(self.m, start=1):
            if count:
                yield i, count

    def centralizer_order(self) -> int:
        out = 1
        for i, count in self.cycles():
            out *= i**count * factorial(count)
        return out

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def class_size(lam: CycleType) -> int:
    """``n! / prod_i i^{m_i} m_i!``."""
    return factorial(lam.n) // lam.centralizer_order()


def _partitions(n: int, largest: int) -> Iterator[list[int]]:
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k, *rest]


def partitions_of(n: int) -> list[CycleType]:
    """All partitions of ``n`` in reverse lexicographic order of parts."""
    if n < 1:
        raise ValueError(f"partitions_of needs n >= 1, got {n}")
    return [CycleType.from_parts(p) for p in _partitions(n, n)]


def _le_scaled_sqrt(lhs: int, coef: int, a: int, i: int) -> bool:
    """Exact test of ``lhs <= coef * a^(i/2)`` for ``coef >= 0``."""
    if lhs <= 0:
        return True
    return lhs * lhs <= coef * coef * a**i


def necklace_bound_violations(imax: int = 40, amax: int = 60) -> list[tuple[str, int, int]]:
    """Check the identities and bounds relating ``F_{i,a}`` and ``F_{i,-a}``.

    For ``1 <= i <= imax`` and ``1 <= a <= amax``, exactly in integers:

    1. ``(-1)^i F_{i,-a} = F_{i,a} + 2 F_{i/2,a} [ord_2(i) = 1]``
    2. ``0 <= F_{i,a} <= a^i`` and ``0 <= (-1)^i F_{i,-a} <= a^i + 2 a^(i/2)``
    3. ``(-1)^i F_{i,-a} >= F_{i,a} >= a^(i/2) (a^(i/2) - i/2)``

    Half powers are compared by squaring.  Returns ``(part, i, a)`` triples
    that fail; empty means everything holds.
    """
    bad = []
    for i in range(1, imax + 1):
        for a in range(1, amax + 1):
            F = signed_F(i, a)
            G = (-1) ** i * signed_F(i, -a)
            top = a**i
            expected = F + (2 * signed_F(i // 2, a) if ord2(i) == 1 else 0)
            if G != expected:
                bad.append(("identity", i, a))
            if not (0 <= F <= top and 0 <= G and _le_scaled_sqrt(G - top, 2, a, i)):
                bad.append(("upper", i, a))
            # a^(i/2) (a^(i/2) - i/2) <= F  <=>  2 (a^i - F) <= i a^(i/2)
            if not (G >= F and _le_scaled_sqrt(2 * (top - F), i, a, i)):
                bad.append(("lower", i, a))
    return bad
