"""Ground truth by enumeration, plus a uniform sampler for large classes."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterator, Sequence

import numpy as np

from .combinat import CycleType
from .descent import DescentPolynomial
from .poly import Polynomial

MAX_ENUMERATION_DEGREE = 10
CHUNK_SIZE = 1 << 15


class SizeGuardError(ValueError):
    pass


class Permutation(tuple):
    """One-line notation ``(pi(1), ..., pi(n))`` of a bijection of ``1..n``."""

    def __new__(cls, images: Sequence[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a permutation of 1..{len(images)}")
        return super().__new__(cls, images)

    def cycle_type(self) -> CycleType:
        n = len(self)
        seen = [False] * (n + 1)
        parts = []
        for start in range(1, n + 1):
            if seen[start]:
                continue
            length, j = 0, start
            while not seen[j]:
                seen[j] = True
                j = self[j - 1]
                length += 1
            parts.append(length)
        return CycleType.from_parts(parts)


def descent_number(pi: Sequence[int]) -> int:
    return sum(1 for x, y in zip(pi, pi[1:]) if x > y)


def _guard(lam: CycleType):
    if lam.n > MAX_ENUMERATION_DEGREE:
        raise SizeGuardError(
            f"enumeration limited to n <= {MAX_ENUMERATION_DEGREE}, got n = {lam.n}"
        )


def iterate_class(lam: CycleType) -> Iterator[Permutation]:
    """Each element of the class exactly once.

    Every cycle is rooted at its smallest element: repeatedly take the
    smallest unplaced point, pick one of the still-available cycle lengths
    and an ordered choice of the remaining cycle members.
    """
    _guard(lam)
    n = lam.n
    image = [0] * (n + 1)

    def rec(remaining: list[int], lengths: dict[int, int]):
        if not remaining:
            yield Permutation(image[1:])
            return
        head, rest = remaining[0], remaining[1:]
        for length in sorted(lengths):
            if not lengths[length]:
                continue
            lengths[length] -= 1
            for tail in permutations(rest, length - 1):
                cycle = (head, *tail)
                for x, y in zip(cycle, cycle[1:] + cycle[:1]):
                    image[x] = y
                chosen = set(tail)
                yield from rec([r for r in rest if r not in chosen], lengths)
            lengths[length] += 1

    yield from rec(list(range(1, n + 1)), dict(lam.cycles()))


def brute_descent_polynomial(lam: CycleType) -> DescentPolynomial:
    counts = [0] * lam.n
    for pi in iterate_class(lam):
        counts[descent_number(pi)] += 1
    return DescentPolynomial(lam, Polynomial(counts))


# -- sampling ---------------------------------------------------------------


def _cycle_layout(lam: CycleType) -> list[int]:
    return sorted(lam.parts, reverse=True)


def _permutations_from_orders(orders: np.ndarray, lengths: list[int]) -> np.ndarray:
    """Read each row of ``orders`` (values 0..n-1) as consecutive cycles.

    Returns 0-based images.  Each class element arises from exactly
    ``prod_i i^{m_i} m_i!`` rows, so uniform rows give uniform elements.
    """
    rows = np.arange(orders.shape[0])[:, None]
    perm = np.empty_like(orders)
    start = 0
    for length in lengths:
        block = orders[:, start : start + length]
        perm[rows, block] = np.roll(block, -1, axis=1)
        start += length
    return perm


def sample_class(lam: CycleType, rng: np.random.Generator) -> Permutation:
    """One uniform element of the class, O(n)."""
    order = rng.permutation(lam.n)[None, :]
    perm = _permutations_from_orders(order, _cycle_layout(lam))[0]
    return Permutation(perm + 1)


def sample_descents(lam: CycleType, size: int, rng: np.random.Generator) -> np.ndarray:
    """Descent numbers of ``size`` independent uniform class elements."""
    n = lam.n
    if n == 1:
        return np.zeros(size, dtype=np.int64)
    orders = rng.permuted(np.tile(np.arange(n), (size, 1)), axis=1)
    perm = _permutations_from_orders(orders, _cycle_layout(lam))
    return np.count_nonzero(perm[:, :-1] > perm[:, 1:], axis=1)


@dataclass
class DescentDistribution:
    lam: CycleType
    counts: dict[int, int]
    total: int
    seed: int | None = None
    exact: bool = False

    def __post_init__(self):
        self.counts = {int(k): int(v) for k, v in sorted(self.counts.items()) if v}
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts do not sum to total")
        if any(not 0 <= k < self.lam.n for k in self.counts):
            raise ValueError("descent value outside 0..n-1")

    @classmethod
    def from_polynomial(cls, dp: DescentPolynomial) -> DescentDistribution:
        counts = {k: c for k, c in enumerate(dp.canonical.coeffs)}
        return cls(dp.lam, counts, dp.class_size, exact=True)

    def probabilities(self) -> dict[int, Fraction]:
        return {k: Fraction(v, self.total) for k, v in self.counts.items()}

    def mean(self) -> Fraction:
        return Fraction(sum(k * v for k, v in self.counts.items()), self.total)

    def variance(self) -> Fraction:
        mu = self.mean()
        second = Fraction(sum(k * k * v for k, v in self.counts.items()), self.total)
        return second - mu * mu

    def merge(self, other: DescentDistribution) -> DescentDistribution:
        if other.lam != self.lam:
            raise ValueError("cannot merge histograms of different classes")
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        return DescentDistribution(self.lam, counts, self.total + other.total, self.seed)

    def to_json(self) -> dict:
        return {
            "lambda": str(self.lam),
            "total": str(self.total),
            "seed": self.seed,
            "counts": {str(k): str(v) for k, v in self.counts.items()},
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["d", "count", "prob"])
        for k, v in self.counts.items():
            writer.writerow([k, v, format(v / self.total, ".17g")])
        return buf.getvalue()


def worker_count() -> int:
    """Worker pool cap from ``DESCENTLAB_THREADS`` (default 1)."""
    raw = os.environ.get("DESCENTLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"DESCENTLAB_THREADS must be an integer, got {raw!r}") from None


def _chunk_counts(lam: CycleType, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    return np.bincount(sample_descents(lam, size, rng), minlength=lam.n)


def empirical_histogram(lam: CycleType, samples: int, seed: int,
                        workers: int | None = None) -> DescentDistribution:
    """Descent histogram of ``samples`` uniform draws.

    Samples are split into fixed-size chunks, chunk ``c`` drawing from the
    PCG64 stream seeded by ``(seed, c)``, so the result does not depend on
    how many workers run.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    sizes = [CHUNK_SIZE] * (samples // CHUNK_SIZE)
    if samples % CHUNK_SIZE:
        sizes.append(samples % CHUNK_SIZE)
    workers = worker_count() if workers is None else workers
    jobs = [(lam, seed, c, size) for c, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_counts(*job), jobs))
    else:
        parts = [_chunk_counts(*job) for job in jobs]
    counts = np.sum(parts, axis=0)
    return DescentDistribution(lam, dict(enumerate(counts.tolist())), samples, seed)
