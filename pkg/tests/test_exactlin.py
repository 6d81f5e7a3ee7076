"""Exact linear algebra: RREF, kernels, subspaces and unions of subspaces."""

import random

import pytest
import sympy
from hypothesis import given, strategies as st

from sepower.exactlin import (
    DimensionError,
    Q,
    RatMatrix,
    Subspace,
    SubspaceUnion,
    as_rational,
    nullspace,
    rank,
    rational_str,
    rref,
    solve,
    subspace_contains,
    subspace_intersect,
    subspace_permute,
    union_contains_subspace,
    union_eq,
    union_intersect,
    union_member,
    union_normalize,
    union_subset,
    union_union,
)

from conftest import matrices, random_subspace, random_union, unions


def test_as_rational_parses_fractions_and_rejects_floats():
    assert as_rational("3/6") == Q(1, 2)
    assert as_rational(-4) == Q(-4)
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert rational_str(Q(-2, 4)) == "-1/2"
    assert rational_str(Q(3)) == "3"


def test_matrix_arithmetic():
    a = RatMatrix.from_rows([[1, 2], [3, 4]])
    b = RatMatrix.identity(2)
    assert (a @ b) == a
    assert (a - a).is_zero()
    assert a.transpose().data == ((1, 3), (2, 4))
    assert list(a.apply([1, 1])) == [3, 7]
    with pytest.raises(DimensionError):
        a @ RatMatrix.zeros(3, 1)


@given(matrices())
def test_rref_matches_sympy(rows):
    m = RatMatrix.from_rows(rows)
    r, k = rref(m)
    ref, piv = sympy.Matrix(rows).rref()
    assert k == len(piv)
    ours = [[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row] for row in r.data[:k]]
    assert ours == ref.tolist()[:k]


@given(matrices())
def test_rref_idempotent(rows):
    r, k = rref(RatMatrix.from_rows(rows))
    r2, k2 = rref(r)
    assert r2 == r and k2 == k


@given(matrices())
def test_rank_nullity(rows):
    m = RatMatrix.from_rows(rows)
    ns = nullspace(m)
    assert rank(m) + ns.dim == m.ncols
    for v in ns.basis:
        assert all(x == 0 for x in m.apply(v))


@given(matrices())
def test_span_of_basis_round_trips(rows):
    s = Subspace.from_constraints(rows, len(rows[0]))
    t = Subspace.span(s.basis, s.ambient_dim)
    assert t.constraints == s.constraints


def test_span_and_contains():
    s = Subspace.span([[1, 1, 0]], 3)
    assert s.dim == 1
    assert s.contains_vector([2, 2, 0])
    assert not s.contains_vector([1, 0, 0])
    assert subspace_contains(Subspace.full(3), s)
    assert not subspace_contains(s, Subspace.full(3))
    assert Subspace.zero(3).dim == 0


@given(matrices(max_cols=4), matrices(max_cols=4))
def test_intersection_is_largest_common_subspace(a, b):
    n = 4
    a = [r + [0] * (n - len(r)) for r in a]
    b = [r + [0] * (n - len(r)) for r in b]
    s, t = Subspace.from_constraints(a, n), Subspace.from_constraints(b, n)
    i = subspace_intersect(s, t)
    assert subspace_contains(s, i) and subspace_contains(t, i)
    assert i.dim == n - rank(RatMatrix.from_rows(a + b))


def test_permute_swaps_coordinates():
    s = Subspace.span([[1, 0, 0]], 3)
    # coordinate i moves to perm[i]
    p = subspace_permute(s, [2, 0, 1])
    assert p.contains_vector([0, 0, 1])
    assert not p.contains_vector([1, 0, 0])


def test_solve():
    m = RatMatrix.from_rows([[1, 1], [0, 2]])
    x = solve(m, [3, 4])
    assert list(m.apply(x)) == [3, 4]
    assert solve(RatMatrix.from_rows([[1, 1], [1, 1]]), [1, 2]) is None


def test_union_normalizes_by_absorption():
    line = Subspace.span([[1, 0]], 2)
    u = union_normalize([line, Subspace.full(2), line], 2)
    assert len(u) == 1 and u.members[0].dim == 2
    assert SubspaceUnion.empty(2).is_empty
    assert not union_member(SubspaceUnion.empty(2), (0, 0))


def test_union_membership_is_not_span():
    x = Subspace.span([[1, 0]], 2)
    y = Subspace.span([[0, 1]], 2)
    u = SubspaceUnion.of(x, y)
    assert (1, 0) in u and (0, 5) in u
    assert (1, 1) not in u
    assert not union_contains_subspace(u, Subspace.full(2))


def test_union_covering_by_lines():
    # the plane is not covered by finitely many lines
    lines = [Subspace.span([[1, k]], 2) for k in range(5)]
    assert not union_contains_subspace(union_normalize(lines, 2), Subspace.full(2))


def test_union_json_round_trip():
    u = random_union(random.Random(3), 4)
    assert union_eq(SubspaceUnion.from_json(u.to_json()), u)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        union_intersect(SubspaceUnion.full(2), SubspaceUnion.full(3))


@given(unions(4), unions(4))
def test_union_commutative(u, v):
    assert union_eq(u | v, v | u)
    assert union_eq(u & v, v & u)


@given(unions(4), unions(4), unions(4))
def test_union_associative_distributive(u, v, w):
    assert union_eq((u | v) | w, u | (v | w))
    assert union_eq((u & v) & w, u & (v & w))
    assert union_eq(u & (v | w), (u & v) | (u & w))
    assert union_eq(u | (v & w), (u | v) & (u | w))


@given(unions(4), unions(4))
def test_union_absorption(u, v):
    assert union_eq(u | (u & v), u)
    assert union_eq(u & (u | v), u)
    assert union_subset(u & v, u)
    assert union_subset(u, u | v)


@given(unions(4), unions(4), st.integers(0, 1000))
def test_intersection_membership_sound(u, v, seed):
    rng = random.Random(seed)
    for m in u.members:
        c = [rng.randint(-3, 3) for _ in m.basis]
        p = tuple(sum((ci * b[k] for ci, b in zip(c, m.basis)), Q(0)) for k in range(u.ambient_dim))
        assert union_member(u & v, p) == union_member(v, p)


def test_random_subspace_helper_dims():
    s = random_subspace(random.Random(0), 5)
    assert 0 <= s.dim <= 5
