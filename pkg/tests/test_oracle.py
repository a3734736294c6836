from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from descentlab.combinat import CycleType, class_size, partitions_of
from descentlab.oracle import (
    DescentDistribution,
    Permutation,
    SizeGuardError,
    brute_descent_polynomial,
    descent_number,
    empirical_histogram,
    iterate_class,
    sample_class,
    worker_count,
)
from descentlab.poly import Polynomial
from descentlab.descent import descent_polynomial

import oracles

L = CycleType.parse


def test_descent_number():
    assert descent_number((1, 2, 3, 4, 5)) == 0
    assert descent_number((5, 4, 3, 2, 1)) == 4
    assert descent_number((2, 1, 4, 3)) == 2


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
    assert Permutation((2, 1, 4, 3)).cycle_type() == L("2,2")


def test_iterate_identity():
    assert list(iterate_class(CycleType.identity(5))) == [Permutation((1, 2, 3, 4, 5))]


def test_iterate_double_transposition():
    got = set(iterate_class(L("2,2")))
    assert got == {(2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1)}


def test_iterate_three_cycles():
    assert set(iterate_class(L("3"))) == set(oracles.class_members((3,)))


@pytest.mark.parametrize("lam", [lam for n in range(1, 8) for lam in partitions_of(n)], ids=str)
def test_iterate_is_the_class(lam):
    elements = list(iterate_class(lam))
    assert len(elements) == class_size(lam)
    assert len(set(elements)) == len(elements)
    assert all(pi.cycle_type() == lam for pi in elements)
    if lam.n <= 6:
        assert set(elements) == set(oracles.class_members(lam.parts))


def test_size_guard():
    with pytest.raises(SizeGuardError):
        next(iterate_class(CycleType.identity(11)))
    with pytest.raises(SizeGuardError):
        brute_descent_polynomial(CycleType.from_parts([11]))


def test_brute_polynomial_examples():
    assert brute_descent_polynomial(L("2,2")).canonical == Polynomial([0, 1, 1, 1])
    assert brute_descent_polynomial(CycleType.identity(6)).canonical == Polynomial([1])
    total = Polynomial([])
    for lam in partitions_of(4):
        total = total + brute_descent_polynomial(lam).canonical
    assert total == Polynomial([1, 11, 11, 1])


@pytest.mark.parametrize("lam", [lam for n in range(1, 9) for lam in partitions_of(n)], ids=str)
def test_brute_matches_formula(lam):
    assert brute_descent_polynomial(lam) == descent_polynomial(lam)


# -- sampler ---------------------------------------------------------------------


@pytest.mark.parametrize("text", ["2,2", "3,1,1", "5,3,2,2,1", "1^40 2^30", "7^3"])
def test_sample_has_cycle_type(text):
    lam = L(text)
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert sample_class(lam, rng).cycle_type() == lam


def test_sample_large_degree():
    lam = CycleType.from_multiplicities({1: 1000, 2: 4000, 997: 2})
    pi = sample_class(lam, np.random.default_rng(0))
    assert len(pi) == lam.n
    assert pi.cycle_type() == lam


def test_sample_deterministic():
    lam = L("4,3,2,1")
    a = sample_class(lam, np.random.default_rng(99))
    b = sample_class(lam, np.random.default_rng(99))
    assert a == b


def test_sample_frequencies_double_transposition():
    lam = L("2,2")
    rng = np.random.default_rng(11)
    freq = Counter(sample_class(lam, rng) for _ in range(30000))
    assert set(freq) == set(iterate_class(lam))
    for count in freq.values():
        assert abs(count / 30000 - 1 / 3) < 0.02


@pytest.mark.parametrize("lam", partitions_of(5), ids=str)
def test_sampler_uniform_over_class(lam):
    size = class_size(lam)
    draws = 100 * size
    rng = np.random.default_rng(2024)
    freq = Counter(sample_class(lam, rng) for _ in range(draws))
    elements = list(iterate_class(lam))
    assert set(freq) <= set(elements)
    if size == 1:
        return
    observed = [freq.get(pi, 0) for pi in elements]
    assert stats.chisquare(observed).pvalue > 1e-3


def test_histogram_examples():
    hist = empirical_histogram(L("2,2"), 60000, seed=42)
    assert hist.total == 60000
    assert set(hist.counts) == {1, 2, 3}
    for k in (1, 2, 3):
        assert abs(hist.counts[k] / 60000 - 1 / 3) < 0.02
    ident = empirical_histogram(CycleType.identity(7), 500, seed=1)
    assert ident.counts == {0: 500}
    mean = empirical_histogram(L("2,1,1"), 100000, seed=5).mean()
    assert abs(mean - Fraction(3, 2)) < 0.02


def test_histogram_reproducible_and_worker_independent():
    lam = L("3,2,2,1")
    a = empirical_histogram(lam, 100000, seed=8, workers=1)
    b = empirical_histogram(lam, 100000, seed=8, workers=3)
    assert a.counts == b.counts
    c = empirical_histogram(lam, 100000, seed=9)
    assert c.counts != a.counts


def test_histogram_merge():
    lam = L("3,1")
    a = empirical_histogram(lam, 1000, seed=1)
    b = empirical_histogram(lam, 500, seed=2)
    m = a.merge(b)
    assert m.total == 1500
    assert sum(m.counts.values()) == 1500
    with pytest.raises(ValueError):
        a.merge(empirical_histogram(L("2,2"), 10, seed=1))


def test_distribution_validation():
    with pytest.raises(ValueError):
        DescentDistribution(L("2,2"), {1: 2}, 3)
    with pytest.raises(ValueError):
        DescentDistribution(L("2,2"), {4: 3}, 3)


def test_exact_distribution_from_polynomial():
    dist = DescentDistribution.from_polynomial(descent_polynomial(L("2,2")))
    assert dist.exact
    assert dist.total == 3
    assert dist.mean() == 2
    assert dist.variance() == Fraction(2, 3)


def test_histogram_json_and_csv():
    hist = empirical_histogram(L("2,2"), 60000, seed=42)
    js = hist.to_json()
    assert js["lambda"] == "2,2"
    assert js["total"] == "60000"
    assert js["seed"] == 42
    assert set(js["counts"]) == {"1", "2", "3"}
    lines = hist.to_csv().splitlines()
    assert lines[0] == "d,count,prob"
    assert len(lines) == 4


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("DESCENTLAB_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("DESCENTLAB_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("DESCENTLAB_THREADS", "many")
    with pytest.raises(ValueError):
        worker_count()
