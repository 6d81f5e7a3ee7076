"""Permutation representations, equivariant bases, layer spaces and architectures."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .exactlin import ONE, ZERO, RatMatrix, _rref_sparse, _dense_rows, _kernel_basis, mpq, rank
from .groups import (
    Group,
    GSetObj,
    Subgroup,
    cosets,
    double_cosets,
    gset_disjoint_union,
    gset_from_cosets,
    gset_power,
    natural_gset,
    regular_gset,
    trivial_gset,
)


class ArchitectureError(ValueError):
    """An architecture or layer space violates the engine's preconditions."""


class ResourceError(RuntimeError):
    """A configured size or work limit was exceeded."""

    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = stats or {}


# ---------------------------------------------------------------------------
# Representations


@dataclass(frozen=True, eq=False)
class PermRep:
    gset: GSetObj
    name: str = ""

    @property
    def group(self) -> Group:
        return self.gset.group

    @property
    def dim(self) -> int:
        return self.gset.size

    @cached_property
    def matrices(self) -> dict:
        """Permutation matrix for each group generator: e_x -> e_{gx}."""
        return {g: perm_matrix(self.gset, g) for g in self.group.generators}

    def matrix(self, g: int) -> RatMatrix:
        return perm_matrix(self.gset, g)

    @property
    def orbits(self) -> tuple:
        return self.gset.orbit_partition

    def __eq__(self, other) -> bool:
        return isinstance(other, PermRep) and self.gset == other.gset

    def __hash__(self) -> int:
        return hash(self.gset)

    def __repr__(self) -> str:
        return f"PermRep({self.name or '?'}, dim={self.dim})"


def perm_matrix(x: GSetObj, g: int) -> RatMatrix:
    return RatMatrix.from_entries(x.size, x.size, {(x.action[g][p], p): 1 for p in range(x.size)})


def regular_rep(g: Group) -> PermRep:
    return PermRep(regular_gset(g), "regular")


def natural_rep(g: Group) -> PermRep:
    return PermRep(natural_gset(g), "natural")


def trivial_rep(g: Group) -> PermRep:
    return PermRep(trivial_gset(g), "trivial")


def coset_rep(g: Group, h: Subgroup) -> PermRep:
    return PermRep(gset_from_cosets(cosets(g, h)), f"cosets[{len(h)}]")


def power_rep(g: Group, k: int) -> PermRep:
    """[n]^k under the diagonal action, n the degree of g."""
    return PermRep(gset_power(natural_gset(g), k), f"power({g.degree},{k})")


def sum_rep(*reps: PermRep) -> PermRep:
    x = reps[0].gset
    for r in reps[1:]:
        x = gset_disjoint_union(x, r.gset)
    return PermRep(x, "+".join(r.name for r in reps))


def mult_rep(v: PermRep, f: int) -> PermRep:
    """V tensor R^f, realised as f stacked copies of V."""
    if f < 1:
        raise ArchitectureError("multiplicity must be at least 1")
    return PermRep(sum_rep(*([v] * f)).gset, f"{v.name}^{f}")


# ---------------------------------------------------------------------------
# Invariants and equivariant maps


def indicator(n: int, part) -> tuple:
    s = set(part)
    return tuple(ONE if i in s else ZERO for i in range(n))


def invariant_basis(rep: PermRep) -> list:
    """One orbit indicator per orbit."""
    return [indicator(rep.dim, o) for o in rep.orbits]


@dataclass(frozen=True, eq=False)
class EquivariantBasis:
    source: PermRep
    target: PermRep
    generators: tuple  # of RatMatrix, target.dim x source.dim

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def span_rref(self) -> tuple:
        return _dense_rows(_rref_sparse(m.vec() for m in self.generators),
                           self.source.dim * self.target.dim)


def is_equivariant(phi: RatMatrix, v: PermRep, w: PermRep) -> bool:
    for g in v.group.generators:
        if phi @ v.matrix(g) != w.matrix(g) @ phi:
            return False
    return True


def commutant_basis(v: PermRep, w: PermRep) -> EquivariantBasis:
    """Basis of Hom_G(V, W) from the kernel of the stacked commutation equations.

    phi rho_V(g) = rho_W(g) phi reads phi[w, g v] = phi[g^-1 w, v] entrywise; one
    row per (generator, w, v) in the unknowns vec(phi) (row-major).
    """
    if v.group != w.group:
        raise ArchitectureError("representations over different groups")
    n, m = v.dim, w.dim
    g = v.group
    rows = []
    for a in g.generators:
        av = v.gset.action[a]
        ainv = w.gset.action[g.inv(a)]
        for wi in range(m):
            for vi in range(n):
                lhs, rhs = wi * n + av[vi], ainv[wi] * n + vi
                if lhs != rhs:
                    rows.append({lhs: ONE, rhs: -ONE})
    cons = _dense_rows(_rref_sparse(rows), n * m)
    gens = []
    for vecd in _kernel_basis(cons, n * m):
        gens.append(RatMatrix(m, n, tuple(tuple(vecd[r * n:(r + 1) * n]) for r in range(m))))
    return EquivariantBasis(v, w, tuple(gens))


def double_coset_basis(k: Subgroup, h: Subgroup) -> EquivariantBasis:
    """Basis of Hom_G(R^{G/K}, R^{G/H}), one map per double coset HgK.

    The map for HgK sends e_{sK} to (1/|K|) sum_{t in K} e_{s t g^-1 H}.
    """
    g = k.parent
    if h.parent != g:
        raise ArchitectureError("subgroups of different groups")
    src_cs, tgt_cs = cosets(g, k), cosets(g, h)
    source = PermRep(gset_from_cosets(src_cs), f"cosets[{len(k)}]")
    target = PermRep(gset_from_cosets(tgt_cs), f"cosets[{len(h)}]")
    weight = mpq(1, len(k))
    tgt_of = tgt_cs.coset_of
    gens = []
    for rep in double_cosets(h, g, k).representatives:
        ginv = g.inv(rep)
        entries: dict = {}
        for col, s in enumerate(src_cs.representatives):
            for t in k.members:
                row = tgt_of[g.mul(g.mul(s, t), ginv)]
                entries[(row, col)] = entries.get((row, col), ZERO) + weight
        gens.append(RatMatrix.from_entries(len(tgt_cs), len(src_cs), entries))
    return EquivariantBasis(source, target, tuple(gens))


# ---------------------------------------------------------------------------
# Layer spaces


@dataclass(frozen=True)
class BiasSpec:
    """Complete bias subordinate to ``partition``, or null bias (partition None)."""

    partition: tuple | None

    @classmethod
    def null(cls) -> "BiasSpec":
        return cls(None)

    @classmethod
    def complete(cls, partition) -> "BiasSpec":
        parts = tuple(sorted(tuple(sorted(p)) for p in partition))
        return cls(parts)

    @property
    def is_null(self) -> bool:
        return self.partition is None

    @property
    def kind(self) -> str:
        return "null" if self.is_null else "complete"

    def __len__(self) -> int:
        return 0 if self.is_null else len(self.partition)


@dataclass(frozen=True, eq=False)
class LayerSpace:
    source: PermRep
    target: PermRep
    generators: tuple  # of RatMatrix
    bias: BiasSpec
    label: str = ""

    def __post_init__(self):
        validate_layer(self)

    @property
    def linear_generators(self) -> EquivariantBasis:
        return EquivariantBasis(self.source, self.target, self.generators)

    def bias_vectors(self) -> list:
        if self.bias.is_null:
            return []
        return [indicator(self.target.dim, p) for p in self.bias.partition]

    def canonical(self) -> dict:
        return {
            "label": self.label,
            "source": _rep_canonical(self.source),
            "target": _rep_canonical(self.target),
            "generators": [m.to_json() for m in self.generators],
            "bias": None if self.bias.is_null else [list(p) for p in self.bias.partition],
        }


def _rep_canonical(rep: PermRep) -> dict:
    return {"dim": rep.dim, "action": [list(rep.gset.action[g]) for g in rep.group.generators]}


def validate_layer(layer: LayerSpace, check_equivariance: bool = True) -> None:
    src, tgt = layer.source, layer.target
    if src.group != tgt.group:
        raise ArchitectureError("layer source and target use different groups")
    for m in layer.generators:
        if m.shape != (tgt.dim, src.dim):
            raise ArchitectureError(f"generator shape {m.shape} != {(tgt.dim, src.dim)}")
        if check_equivariance and not is_equivariant(m, src, tgt):
            raise ArchitectureError("a linear generator is not equivariant")
    if layer.generators and rank(RatMatrix(len(layer.generators), src.dim * tgt.dim,
                                           tuple(m.vec() for m in layer.generators))) != len(layer.generators):
        raise ArchitectureError("linear generators are linearly dependent")
    if not layer.bias.is_null:
        parts = layer.bias.partition
        pts = [p for part in parts for p in part]
        if sorted(pts) != list(range(tgt.dim)) or any(not part for part in parts):
            raise ArchitectureError("bias partition must cover the target points exactly once")
        owner = {p: i for i, part in enumerate(parts) for p in part}
        for orbit in tgt.orbits:
            if len({owner[p] for p in orbit}) != 1:
                raise ArchitectureError(
                    "bias part splits a target orbit; complete bias needs unions of orbits")


def full_layer(v: PermRep, w: PermRep, bias: str | Sequence = "orbit") -> LayerSpace:
    """Aff_G(V, W): the whole commutant plus the orbit (or coarser) bias."""
    gens = commutant_basis(v, w).generators
    return LayerSpace(v, w, gens, _bias_from(bias, w), label="full")


def double_coset_layer(k: Subgroup, h: Subgroup, bias: str | Sequence = "orbit") -> LayerSpace:
    basis = double_coset_basis(k, h)
    return LayerSpace(basis.source, basis.target, basis.generators,
                      _bias_from(bias, basis.target), label="double_coset")


def _bias_from(bias, w: PermRep) -> BiasSpec:
    if bias == "orbit":
        return BiasSpec.complete(w.orbits)
    if bias == "null" or bias is None:
        return BiasSpec.null()
    return BiasSpec.complete(bias)


def circulant(n: int, i: int) -> RatMatrix:
    """C(e_i) for 1-based i: ones where row - col = i - 1 (mod n)."""
    return RatMatrix.from_entries(n, n, {(r, (r - (i - 1)) % n): 1 for r in range(n)})


def circular_layer(n: int, k: int, group: Group | None = None) -> LayerSpace:
    """Circular convolution with filter size k on Z_n, plus one bias part."""
    from .groups import cyclic

    if not 1 <= k <= n:
        raise ArchitectureError(f"filter size {k} outside 1..{n}")
    g = group if group is not None else cyclic(n)
    rep = natural_rep(g)
    return LayerSpace(rep, rep, tuple(circulant(n, i) for i in range(1, k + 1)),
                      BiasSpec.complete([range(n)]), label=f"circular({k})")


DEFAULT_IGN_LIMIT = 2048


def ign_layer(n: int, order: int, mult_in: int, mult_out: int, group: Group | None = None,
              limit: int = DEFAULT_IGN_LIMIT) -> LayerSpace:
    """Full S_n-equivariant layer on ([n]^order) x R^f."""
    from .groups import symmetric

    if n < 1 or order < 1 or mult_in < 1 or mult_out < 1:
        raise ArchitectureError("ign_layer needs positive n, order and multiplicities")
    size = n ** order * max(mult_in, mult_out)
    if size > limit:
        raise ResourceError(f"IGN layer dimension {size} exceeds limit {limit}")
    g = group if group is not None else symmetric(n)
    base = power_rep(g, order)
    src, tgt = mult_rep(base, mult_in), mult_rep(base, mult_out)
    d = base.dim
    gens = []
    for phi in commutant_basis(base, base).generators:
        for a in range(mult_out):
            for b in range(mult_in):
                entries = {(a * d + r, b * d + c): phi.data[r][c]
                           for r in range(d) for c in range(d) if phi.data[r][c]}
                gens.append(RatMatrix.from_entries(tgt.dim, src.dim, entries))
    return LayerSpace(src, tgt, tuple(gens), BiasSpec.complete(tgt.orbits), label="ign")


# ---------------------------------------------------------------------------
# Architectures


@dataclass(frozen=True, eq=False)
class Architecture:
    layers: tuple
    activation_tag: str = "relu"

    def __post_init__(self):
        validate_architecture(self)

    @property
    def input_rep(self) -> PermRep:
        return self.layers[0].source

    @property
    def group(self) -> Group:
        return self.input_rep.group

    @property
    def depth(self) -> int:
        return len(self.layers)

    def canonical(self) -> dict:
        return {"group": [list(p) for p in self.group.elements],
                "layers": [l.canonical() for l in self.layers]}

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def replace_layer(self, i: int, *new: LayerSpace) -> "Architecture":
        layers = list(self.layers)
        layers[i:i + 1] = new
        return Architecture(tuple(layers), self.activation_tag)


def validate_architecture(arch: Architecture) -> None:
    if not arch.layers:
        raise ArchitectureError("an architecture needs at least one layer")
    g = arch.layers[0].source.group
    for i, layer in enumerate(arch.layers):
        if layer.source.group != g:
            raise ArchitectureError(f"layer {i} uses a different group")
        if i and layer.source != arch.layers[i - 1].target:
            raise ArchitectureError(f"layer {i} source does not match layer {i - 1} target")
        if i < len(arch.layers) - 1 and layer.bias.is_null:
            raise ArchitectureError(
                f"intermediate layer {i} has null bias; the zero-locus recursion requires "
                "complete bias (a partition of the layer's output points) in every hidden layer")


def network(input_rep: PermRep, *reps: PermRep, activation: str = "relu") -> Architecture:
    """The usual N(V_0, ..., V_d): full equivariant affine layers between consecutive reps."""
    chain = (input_rep,) + reps
    return Architecture(tuple(full_layer(a, b) for a, b in zip(chain, chain[1:])), activation)
