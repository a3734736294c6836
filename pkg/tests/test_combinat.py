from math import factorial

import pytest
from hypothesis import given, strategies as st

from descentlab.combinat import (
    CycleType,
    class_size,
    divisors,
    falling_factorial,
    mobius,
    necklace_bound_violations,
    necklace_count,
    ord2,
    partitions_of,
    signed_F,
    stirling1_unsigned,
    stirling2,
)

import oracles


@pytest.mark.parametrize("d, expected", [(1, 1), (12, 0), (30, -1), (7, -1), (6, 1), (49, 0)])
def test_mobius(d, expected):
    assert mobius(d) == expected


def test_mobius_rejects_zero():
    with pytest.raises(ValueError):
        mobius(0)


@pytest.mark.parametrize("i, expected", [(1, [1]), (7, [1, 7]), (12, [1, 2, 3, 4, 6, 12]), (36, [1, 2, 3, 4, 6, 9, 12, 18, 36])])
def test_divisors(i, expected):
    assert divisors(i) == expected


@pytest.mark.parametrize("a", [0, 1, 5])
def test_necklace_length_one(a):
    assert necklace_count(1, a) == a


@pytest.mark.parametrize("i, a", [(2, 3), (3, 2), (4, 2), (6, 2), (4, 3), (5, 3)])
def test_necklace_count_matches_enumeration(i, a):
    assert necklace_count(i, a) == oracles.primitive_necklaces(i, a)


def test_necklace_rejects_negative_alphabet():
    with pytest.raises(ValueError):
        necklace_count(3, -1)


@pytest.mark.parametrize("i, a, expected", [(2, 3, 6), (2, -3, 12), (3, -2, -6), (1, -4, -4)])
def test_signed_F(i, a, expected):
    assert signed_F(i, a) == expected


def test_signed_F_cross_checks():
    # (2,-3) against F_{2,3} + 2 F_{1,3}; (3,-2) against -F_{3,2}
    assert signed_F(2, -3) == signed_F(2, 3) + 2 * signed_F(1, 3)
    assert signed_F(3, -2) == -signed_F(3, 2)


@pytest.mark.parametrize("n, k", [(3, 2), (4, 2), (5, 3), (6, 2), (6, 4)])
def test_stirling2_matches_enumeration(n, k):
    assert stirling2(n, k) == oracles.set_partitions(n, k)


@pytest.mark.parametrize("n, k", [(3, 1), (4, 2), (5, 2), (6, 3)])
def test_stirling1_matches_enumeration(n, k):
    assert stirling1_unsigned(n, k) == oracles.perms_with_cycles(n, k)


@pytest.mark.parametrize("n", [0, 1, 5, 9])
def test_stirling_diagonal(n):
    assert stirling2(n, n) == 1
    assert stirling1_unsigned(n, n) == 1


def test_stirling_out_of_range_is_zero():
    assert stirling2(3, 5) == 0
    assert stirling1_unsigned(2, 4) == 0


def test_stirling_rows_sum():
    for n in range(1, 10):
        assert sum(stirling1_unsigned(n, k) for k in range(n + 1)) == factorial(n)


def test_power_via_falling_factorials():
    for n in range(13):
        for a in range(21):
            assert a**n == sum(stirling2(n, k) * falling_factorial(a, k) for k in range(n + 1))


def test_mobius_inversion_round_trip():
    for i in range(1, 41):
        for a in range(61):
            assert sum(d * necklace_count(d, a) for d in divisors(i)) == a**i


def test_necklace_lemma_sweep():
    assert necklace_bound_violations(40, 60) == []


@given(st.integers(1, 60), st.integers(1, 25))
def test_signed_relation_by_parity(i, a):
    lhs = (-1) ** i * signed_F(i, -a)
    extra = 2 * signed_F(i // 2, a) if ord2(i) == 1 else 0
    assert lhs == signed_F(i, a) + extra


@pytest.mark.parametrize("i, expected", [(1, 0), (2, 1), (12, 2), (40, 3), (7, 0)])
def test_ord2(i, expected):
    assert ord2(i) == expected


# -- cycle types -------------------------------------------------------------


def test_cycle_type_fields():
    lam = CycleType.parse("3,1,1")
    assert lam.n == 5
    assert lam.m == (2, 0, 1, 0, 0)
    assert lam.fixed_points == 2
    assert lam.alpha == pytest.approx(2 / 5)
    assert str(lam) == "3,1,1"


def test_multiplicity_form():
    assert CycleType.parse("1^2 3^1") == CycleType.parse("3,1,1")
    assert str(CycleType.parse("2^3")) == "2,2,2"


@pytest.mark.parametrize("bad", ["", "0", "a,b", "2,-1", "2^x", "1^2 3"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        CycleType.parse(bad)


def test_invalid_multiplicities():
    with pytest.raises(ValueError):
        CycleType(3, (1, 0, 1))
    with pytest.raises(ValueError):
        CycleType(3, (1, 1))


@given(st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_parse_print_round_trip(parts):
    lam = CycleType.from_parts(parts)
    assert CycleType.parse(str(lam)) == lam
    assert list(lam.parts) == sorted(parts, reverse=True)


@pytest.mark.parametrize("text, expected", [("1,1,1,1", 1), ("2,2", 3), ("3", 2), ("2,1,1", 6), ("4", 6)])
def test_class_size(text, expected):
    assert class_size(CycleType.parse(text)) == expected


def test_class_size_matches_enumeration():
    for lam in partitions_of(5):
        assert class_size(lam) == len(oracles.class_members(lam.parts))


@pytest.mark.parametrize("n", range(1, 13))
def test_class_sizes_sum_to_factorial(n):
    assert sum(class_size(lam) for lam in partitions_of(n)) == factorial(n)


@pytest.mark.parametrize("n, count", [(1, 1), (4, 5), (8, 22), (10, 42)])
def test_partition_counts(n, count):
    parts = partitions_of(n)
    assert len(parts) == count
    assert len(set(parts)) == count
    assert partitions_of(n) == parts


def test_partitions_of_one():
    assert partitions_of(1) == [CycleType.from_parts([1])]
