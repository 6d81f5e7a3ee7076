"""Permutation groups, subgroups, cosets and G-sets."""

import pytest

from sepower.groups import (
    GroupError,
    InvalidSubgroupError,
    compose,
    cosets,
    cyclic,
    dihedral,
    direct_product,
    double_cosets,
    generate_group,
    gset_power,
    gset_product,
    inverse,
    natural_gset,
    orbits,
    perm_sign,
    regular_gset,
    symmetric,
)


@pytest.mark.parametrize("g, order", [(cyclic(1), 1), (cyclic(5), 5), (symmetric(3), 6),
                                      (symmetric(4), 24), (dihedral(4), 8), (dihedral(5), 10)])
def test_orders(g, order):
    assert g.order == order
    assert g.elements[0] == tuple(range(g.degree))


def test_product_order_and_degree():
    p = direct_product(cyclic(2), cyclic(3))
    assert p.order == 6 and p.degree == 5


def test_group_axioms():
    g = symmetric(3)
    for a in range(g.order):
        assert g.mul(a, g.inv(a)) == 0
        assert g.mul(0, a) == a
        for b in range(g.order):
            for c in range(g.order):
                assert g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))


def test_compose_convention():
    p, q = (1, 2, 0), (0, 2, 1)
    # (p o q)(x) = p(q(x))
    assert compose(p, q) == tuple(p[q[x]] for x in range(3))
    assert compose(p, inverse(p)) == (0, 1, 2)
    assert perm_sign((1, 0, 2)) == -1 and perm_sign((1, 2, 0)) == 1


def test_bad_generators():
    with pytest.raises(GroupError):
        generate_group([[0, 0, 1]])
    with pytest.raises(GroupError):
        generate_group([[1, 0], [0, 2, 1]])


def test_subgroups_of_s3():
    g = symmetric(3)
    subs = g.all_subgroups()
    assert sorted(len(s) for s in subs) == [1, 2, 2, 2, 3, 6]
    assert len(g.alternating_subgroup()) == 3
    with pytest.raises(InvalidSubgroupError):
        g.subgroup([0, 1, 2])  # not closed or not of dividing order
    with pytest.raises(InvalidSubgroupError):
        g.generated_subgroup([[0, 1, 2, 3]])


def test_lagrange_and_coset_action():
    g = symmetric(3)
    for h in g.all_subgroups():
        cs = cosets(g, h)
        assert len(cs) * len(h) == g.order
        # the action is a homomorphism into Sym(G/H)
        for a in range(g.order):
            for b in range(g.order):
                ab = g.mul(a, b)
                assert all(cs.action[ab][c] == cs.action[a][cs.action[b][c]] for c in range(len(cs)))


def test_double_cosets_partition_group():
    g = symmetric(3)
    for h in g.all_subgroups():
        for k in g.all_subgroups():
            dc = double_cosets(h, g, k)
            pts = sorted(x for c in dc.classes for x in c)
            assert pts == list(range(g.order))
    a3 = g.alternating_subgroup()
    assert len(double_cosets(g.trivial_subgroup(), g, g.trivial_subgroup())) == 6
    assert len(double_cosets(a3, g, a3)) == 2


def test_gsets():
    g = cyclic(3)
    x = natural_gset(g)
    assert x.check_action_laws()
    assert orbits(x) == ((0, 1, 2),)
    pairs = gset_power(x, 2)
    assert pairs.size == 9
    assert len(orbits(pairs)) == 3
    prod = gset_product(x, regular_gset(g))
    assert prod.size == 9 and prod.check_action_laws()


def test_s3_pair_orbits():
    # diagonal plus off-diagonal pairs
    assert len(orbits(gset_power(natural_gset(symmetric(3)), 2))) == 2
