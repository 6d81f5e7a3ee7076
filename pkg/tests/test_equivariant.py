"""Permutation representations, equivariant layer bases and architectures."""

import pytest

from sepower.equivariant import (
    Architecture,
    ArchitectureError,
    BiasSpec,
    LayerSpace,
    ResourceError,
    circulant,
    circular_layer,
    commutant_basis,
    coset_rep,
    double_coset_basis,
    full_layer,
    ign_layer,
    invariant_basis,
    is_equivariant,
    mult_rep,
    natural_rep,
    network,
    power_rep,
    regular_rep,
    sum_rep,
    trivial_rep,
)
from sepower.exactlin import RatMatrix
from sepower.groups import cyclic, dihedral, gset_product, orbits, symmetric


def pair_orbit_count(v, w):
    """Oracle: dim Hom_G(R^V, R^W) is the number of G-orbits on W x V."""
    return len(orbits(gset_product(w.gset, v.gset)))


@pytest.mark.parametrize("g", [cyclic(3), cyclic(4), symmetric(3), dihedral(4)])
def test_commutant_dimension_matches_orbit_count(g):
    reps = [natural_rep(g), regular_rep(g), trivial_rep(g), power_rep(g, 2)]
    for v in reps:
        for w in reps:
            if v.dim * w.dim > 300:
                continue
            b = commutant_basis(v, w)
            assert len(b) == pair_orbit_count(v, w)
            assert all(is_equivariant(m, v, w) for m in b)


def test_s4_pairs_has_15_maps():
    s4 = symmetric(4)
    assert len(commutant_basis(power_rep(s4, 2), power_rep(s4, 2))) == 15


def test_s3_pairs_has_14_maps():
    # the count drops below 15 once n < 4
    s3 = symmetric(3)
    assert len(commutant_basis(power_rep(s3, 2), power_rep(s3, 2))) == 14


@pytest.mark.parametrize("n", range(2, 7))
def test_cyclic_regular_commutant_is_circulant(n):
    z = cyclic(n)
    b = commutant_basis(regular_rep(z), regular_rep(z))
    assert len(b) == n
    circ = circular_layer(n, n, z)
    nat = commutant_basis(natural_rep(z), natural_rep(z))
    assert circ.linear_generators.span_rref() == nat.span_rref()


def test_circulant_shape():
    assert circulant(3, 1) == RatMatrix.identity(3)
    c = circulant(3, 2)
    assert c.data == ((0, 0, 1), (1, 0, 0), (0, 1, 0))


def test_double_coset_span_equals_commutant():
    g = symmetric(3)
    for k in g.all_subgroups():
        for h in g.all_subgroups():
            dc = double_coset_basis(k, h)
            cb = commutant_basis(coset_rep(g, k), coset_rep(g, h))
            assert len(dc) == len(cb)
            assert dc.span_rref() == cb.span_rref()


def test_double_coset_map_columns():
    # each column of a double-coset map has entries summing to 1
    g = symmetric(3)
    a3 = g.alternating_subgroup()
    for m in double_coset_basis(g.trivial_subgroup(), a3):
        for c in range(m.ncols):
            assert sum(m.data[r][c] for r in range(m.nrows)) == 1


def test_invariants():
    g = symmetric(3)
    assert len(invariant_basis(natural_rep(g))) == 1
    assert len(invariant_basis(power_rep(g, 2))) == 2


def test_sum_and_mult():
    g = cyclic(3)
    s = sum_rep(regular_rep(g), trivial_rep(g))
    assert s.dim == 4 and len(s.orbits) == 2
    m = mult_rep(regular_rep(g), 3)
    assert m.dim == 9 and len(m.orbits) == 3
    with pytest.raises(ArchitectureError):
        mult_rep(regular_rep(g), 0)


def test_layer_rejects_non_equivariant():
    g = cyclic(3)
    v = natural_rep(g)
    bad = RatMatrix.from_entries(3, 3, {(0, 0): 1})
    with pytest.raises(ArchitectureError, match="equivariant"):
        LayerSpace(v, v, (bad,), BiasSpec.complete([range(3)]))


def test_layer_rejects_dependent_generators():
    g = cyclic(3)
    v = natural_rep(g)
    with pytest.raises(ArchitectureError, match="dependent"):
        LayerSpace(v, v, (circulant(3, 1), circulant(3, 1).scale(2)), BiasSpec.complete([range(3)]))


def test_bias_must_respect_orbits():
    g = cyclic(3)
    v = natural_rep(g)
    with pytest.raises(ArchitectureError, match="orbit"):
        LayerSpace(v, v, (circulant(3, 1),), BiasSpec.complete([[0], [1, 2]]))
    with pytest.raises(ArchitectureError, match="cover"):
        LayerSpace(v, v, (circulant(3, 1),), BiasSpec.complete([[0, 1]]))


def test_architecture_chain_and_bias_checks():
    g = cyclic(3)
    r, t = regular_rep(g), trivial_rep(g)
    with pytest.raises(ArchitectureError, match="source"):
        Architecture((full_layer(r, t), full_layer(r, t)))
    with pytest.raises(ArchitectureError, match="null bias"):
        Architecture((full_layer(r, r, bias="null"), full_layer(r, t)))
    a = network(r, r, t)
    assert a.depth == 2 and a.input_rep == r
    assert a.digest() == network(regular_rep(g), regular_rep(g), trivial_rep(g)).digest()
    assert a.digest() != network(r, r, r).digest()


def test_ign_layer():
    layer = ign_layer(3, 2, 1, 1)
    assert len(layer.generators) == 14
    assert layer.target.dim == 9
    two = ign_layer(3, 1, 1, 2)
    assert len(two.generators) == 2 * 2
    with pytest.raises(ResourceError):
        ign_layer(5, 3, 1, 1, limit=100)
