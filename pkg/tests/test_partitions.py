"""Set partitions and minimal zero-sum partition families."""

from itertools import product

import pytest
from hypothesis import given, strategies as st

from sepower.equivariant import ResourceError
from sepower.exactlin import Q
from sepower.partitions import (
    SetPartition,
    all_partitions,
    all_zero_sum_partitions,
    brute_force_minimal_zero_sum,
    duplicate_partition,
    is_zero_sum,
    refines,
    zero_sum_partitions,
)

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


@pytest.mark.parametrize("n", range(0, 8))
def test_bell_numbers(n):
    parts = list(all_partitions(range(n)))
    assert len(parts) == BELL[n]
    assert len({p.blocks for p in parts}) == BELL[n]


def test_enumeration_limit():
    with pytest.raises(ResourceError):
        list(all_partitions(range(11)))


def test_partition_validation():
    with pytest.raises(ValueError):
        SetPartition.of([[0, 1], [1, 2]])
    with pytest.raises(ValueError):
        SetPartition.of([[0]], ground=[0, 1])
    p = SetPartition.of([[2, 0], [1]])
    assert p.blocks == ((0, 2), (1,))


def test_refines():
    fine = SetPartition.singletons(range(3))
    coarse = SetPartition.single_block(range(3))
    mid = SetPartition.of([[0, 1], [2]])
    assert refines(fine, mid) and refines(mid, coarse) and refines(fine, coarse)
    assert not refines(coarse, mid)
    assert refines(mid, mid)


def test_duplicate_partition():
    p = SetPartition.of([[0, 1], [2]])
    d = duplicate_partition(p)
    assert d.blocks == ((0, 1, 3, 4), (2, 5))


def test_spec_style_examples():
    base = SetPartition.single_block(range(4))
    got = {q.blocks for q in zero_sum_partitions([1, -1, 1, -1], base)}
    assert got == {((0, 1), (2, 3)), ((0, 3), (1, 2))}
    assert zero_sum_partitions([1, 1, 1], SetPartition.single_block(range(3))) == []
    # zeros are always singletons
    got = zero_sum_partitions([0, 2, -2], SetPartition.single_block(range(3)))
    assert [q.blocks for q in got] == [((0,), (1, 2))]


def test_respects_base_partition():
    base = SetPartition.of([[0, 1], [2, 3]])
    got = zero_sum_partitions([1, 1, -1, -1], base)
    assert got == []
    got = zero_sum_partitions([1, -1, 2, -2], base)
    assert [q.blocks for q in got] == [((0, 1), (2, 3))]


def test_rational_coefficients():
    base = SetPartition.single_block(range(3))
    got = zero_sum_partitions([Q(1, 2), Q(1, 3), Q(-5, 6)], base)
    assert [q.blocks for q in got] == [((0, 1, 2),)]


def test_max_block_counts_nonzero_points():
    base = SetPartition.single_block(range(6))
    with pytest.raises(ResourceError):
        zero_sum_partitions([1, -1, 1, -1, 0, 0], base, max_block=3)
    assert zero_sum_partitions([1, -1, 0, 0, 0, 0], base, max_block=2)


def test_all_zero_sum_contains_minimal():
    base = SetPartition.single_block(range(4))
    coeffs = [1, -1, 2, -2]
    everything = all_zero_sum_partitions(coeffs, base)
    minimal = zero_sum_partitions(coeffs, base)
    assert all(any(refines(m, q) for m in minimal) for q in everything)
    assert all(is_zero_sum(q, coeffs, base.ground) for q in everything)


@st.composite
def based_coeffs(draw):
    n = draw(st.integers(1, 7))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    blocks = {}
    for i, l in enumerate(labels):
        blocks.setdefault(l, []).append(i)
    return coeffs, SetPartition.of(blocks.values(), range(n))


@given(based_coeffs())
def test_matches_brute_force_with_base(data):
    coeffs, base = data
    fast = sorted(q.blocks for q in zero_sum_partitions(coeffs, base))
    slow = sorted(q.blocks for q in brute_force_minimal_zero_sum(coeffs, base))
    assert fast == slow


def test_exhaustive_length_four():
    # a cheap slice of the full exhaustive check in the acceptance suite
    for n in range(1, 5):
        base = SetPartition.single_block(range(n))
        for coeffs in product(range(-2, 3), repeat=n):
            fast = sorted(q.blocks for q in zero_sum_partitions(coeffs, base))
            slow = sorted(q.blocks for q in brute_force_minimal_zero_sum(coeffs, base))
            assert fast == slow, coeffs
