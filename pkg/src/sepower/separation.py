"""Identification relations of equivariant networks, computed exactly.

The pair space of an architecture with input V_0 is V_0 + V_0, coordinates
(alpha, beta). ``rho`` builds the twin network (alpha, beta) -> eta(alpha) -
eta(beta), whose zero locus is the identification relation, and evaluates that
zero locus with the recursive union/intersection formula over zero-sum
partitions of each output row.
"""

from __future__ import annotations

import enum
import logging
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .equivariant import (
    Architecture,
    ArchitectureError,
    BiasSpec,
    LayerSpace,
    PermRep,
    ResourceError,
    full_layer,
    mult_rep,
    sum_rep,
)
from .exactlin import (
    ONE,
    ZERO,
    RatMatrix,
    Subspace,
    SubspaceUnion,
    as_rational,
    block_diag,
    hstack,
    rank,
    solve,
    subspace_intersect,
    union_contains_subspace,
    union_eq,
    union_intersect,
    union_member,
    union_normalize,
    union_permute,
    union_subset,
    union_union,
)
from .groups import Group, Subgroup, all_permutations
from .partitions import DEFAULT_MAX_BLOCK, SetPartition, duplicate_partition, zero_sum_partitions

log = logging.getLogger(__name__)

DEFAULT_MAX_MEMBERS = 10_000


@dataclass(frozen=True)
class Limits:
    max_union_members: int = DEFAULT_MAX_MEMBERS
    max_block_size: int = DEFAULT_MAX_BLOCK


# ---------------------------------------------------------------------------
# Twin transform


@dataclass(frozen=True, eq=False)
class TwinArchitecture:
    layers: tuple  # LayerSpace over doubled reps, complete bias on duplicate partitions
    final_generators: tuple  # RatMatrix, null bias
    input_dim: int  # 2 * dim V_0


def _bias_partition(layer: LayerSpace) -> SetPartition:
    return SetPartition.of(layer.bias.partition, range(layer.target.dim))


def twin_transform(arch: Architecture) -> TwinArchitecture:
    for i, layer in enumerate(arch.layers[:-1]):
        if layer.bias.is_null:
            raise ArchitectureError(f"layer {i}: hidden layers need complete bias")
    layers = []
    for layer in arch.layers[:-1]:
        src2, tgt2 = sum_rep(layer.source, layer.source), sum_rep(layer.target, layer.target)
        gens = tuple(block_diag(m, m) for m in layer.generators)
        dup = duplicate_partition(_bias_partition(layer))
        layers.append(LayerSpace(src2, tgt2, gens, BiasSpec.complete(dup.blocks),
                                 label=f"twin:{layer.label}"))
    last = arch.layers[-1]
    final = tuple(hstack(m, -m) for m in last.generators)
    return TwinArchitecture(tuple(layers), final, 2 * arch.input_rep.dim)


# ---------------------------------------------------------------------------
# Zero-locus engine


@dataclass
class EngineStats:
    nodes: int = 0
    memo_hits: int = 0
    memo_entries: int = 0
    row_cache_hits: int = 0
    partitions: int = 0
    max_members: int = 0
    wall_seconds: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _normalize_row(row: Sequence) -> tuple | None:
    """Scale so the first nonzero entry is 1; None for the zero row."""
    lead = next((a for a in row if a), None)
    if lead is None:
        return None
    inv = 1 / lead
    return tuple(a * inv for a in row)


class ZeroLocus:
    """Memoised evaluation of the zero locus of a twin-shaped network.

    ``layers`` are the hidden layers (complete bias), ``final`` the rows of the
    null-bias output maps. The memo table is keyed by (prefix depth, {i, j}).
    """

    def __init__(self, layers: Sequence[LayerSpace], input_dim: int,
                 limits: Limits = Limits(), star_pairs: bool = True):
        self.layers = tuple(layers)
        self.input_dim = input_dim
        self.limits = limits
        self.star_pairs = star_pairs
        self.memo: dict = {}
        self.row_cache: dict = {}
        self.stats = EngineStats()
        self._bases = [_bias_partition(l) for l in self.layers]
        for i, l in enumerate(self.layers):
            if l.bias.is_null:
                raise ArchitectureError(f"layer {i} has null bias")

    def _guard(self, u: SubspaceUnion) -> SubspaceUnion:
        n = len(u.members)
        if n > self.stats.max_members:
            self.stats.max_members = n
        if n > self.limits.max_union_members:
            raise ResourceError(
                f"subspace union grew to {n} members (limit {self.limits.max_union_members})",
                self.stats.as_dict())
        return u

    def evaluate(self, rows: Sequence[Sequence]) -> SubspaceUnion:
        return self._locus(len(self.layers), [tuple(as_rational(a) for a in r) for r in rows])

    def pair_locus(self, depth: int, i: int, j: int) -> SubspaceUnion:
        """Zero locus of the prefix whose last layer is replaced by row_i - row_j."""
        key = (depth, min(i, j), max(i, j))
        hit = self.memo.get(key)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        layer = self.layers[depth - 1]
        rows = [tuple(a - b for a, b in zip(m.data[i], m.data[j])) for m in layer.generators]
        out = self._locus(depth - 1, rows)
        self.memo[key] = out
        self.stats.memo_entries = len(self.memo)
        return out

    def _locus(self, depth: int, rows: list) -> SubspaceUnion:
        self.stats.nodes += 1
        if depth == 0:
            nz = [r for r in rows if any(r)]
            if not nz:
                return SubspaceUnion.full(self.input_dim)
            return SubspaceUnion(self.input_dim,
                                 (Subspace.from_constraints(nz, self.input_dim),))
        normalized = []
        seen = set()
        for r in rows:
            nr = _normalize_row(r)
            if nr is not None and nr not in seen:
                seen.add(nr)
                normalized.append(nr)
        if not normalized:
            return SubspaceUnion.full(self.input_dim)
        per_row = []
        for a in normalized:
            u = self._row_union(depth, a)
            if u.is_empty:
                return u
            per_row.append(u)
        per_row.sort(key=len)
        acc = per_row[0]
        for u in per_row[1:]:
            acc = self._guard(union_intersect(acc, u))
            if acc.is_empty:
                break
        return acc

    def _row_union(self, depth: int, a: tuple) -> SubspaceUnion:
        key = (depth, a)
        hit = self.row_cache.get(key)
        if hit is not None:
            self.stats.row_cache_hits += 1
            return hit
        base = self._bases[depth - 1]
        parts = zero_sum_partitions(a, base, self.limits.max_block_size)
        self.stats.partitions += len(parts)
        full = SubspaceUnion.full(self.input_dim)
        members = []
        for q in parts:
            s = full
            for block in q.blocks:
                if len(block) < 2:
                    continue
                if self.star_pairs:
                    pairs = [(block[0], j) for j in block[1:]]
                else:
                    pairs = [(x, y) for k, x in enumerate(block) for y in block[k + 1:]]
                for i, j in pairs:
                    s = union_intersect(s, self.pair_locus(depth, i, j))
                    if s.is_empty:
                        break
                if s.is_empty:
                    break
            members.extend(s.members)
            if len(members) > 4 * self.limits.max_union_members:
                members = list(self._guard(union_normalize(members, self.input_dim)).members)
        out = self._guard(union_normalize(members, self.input_dim))
        self.row_cache[key] = out
        return out


def zero_locus(layers: Sequence[LayerSpace], final: Sequence[RatMatrix], input_dim: int | None = None,
               limits: Limits = Limits(), engine: ZeroLocus | None = None) -> SubspaceUnion:
    """Zero locus of N(layers..., final) with null-bias ``final`` maps.

    With no hidden layers this is the common kernel of the final maps.
    """
    if input_dim is None:
        if layers:
            input_dim = layers[0].source.dim
        elif final:
            input_dim = final[0].ncols
        else:
            raise ValueError("input_dim required when there are no layers or maps")
    eng = engine or ZeroLocus(layers, input_dim, limits)
    rows = [r for m in final for r in m.data]
    return eng.evaluate(rows)


@dataclass(frozen=True, eq=False)
class IdentificationRelation:
    relation: SubspaceUnion
    architecture_digest: str
    stats: dict = field(default_factory=dict)

    @property
    def input_dim(self) -> int:
        return self.relation.ambient_dim // 2

    def to_json(self) -> dict:
        out = self.relation.to_json()
        out["stats"] = {k: v for k, v in self.stats.items() if k != "wall_seconds"}
        out["architecture_digest"] = self.architecture_digest
        return out


def rho(arch: Architecture, limits: Limits = Limits()) -> IdentificationRelation:
    """The identification relation of ``arch``. The activation tag is never read."""
    twin = twin_transform(arch)
    t0 = time.perf_counter()
    eng = ZeroLocus(twin.layers, twin.input_dim, limits)
    rel = zero_locus(twin.layers, twin.final_generators, twin.input_dim, engine=eng)
    eng.stats.wall_seconds = time.perf_counter() - t0
    log.debug("rho %s: %d members, stats %s", arch.digest()[:12], len(rel), eng.stats)
    return IdentificationRelation(rel, arch.digest(), eng.stats.as_dict())


# ---------------------------------------------------------------------------
# Reference relations


def graph_subspace(matrix: RatMatrix) -> Subspace:
    """{(a, b) : b = matrix a}."""
    n = matrix.ncols
    neg_id = RatMatrix.identity(matrix.nrows).scale(-1)
    return Subspace.from_constraints(hstack(matrix, neg_id).data, n + matrix.nrows)


def diagonal(n: int) -> Subspace:
    return graph_subspace(RatMatrix.identity(n))


def h_orbit_relation(g: Group, h: Subgroup, rep: PermRep) -> SubspaceUnion:
    """Pairs related by some element of H: union over h of graph(rho(h))."""
    if h.parent != g or rep.group != g:
        raise ArchitectureError("subgroup or representation over a different group")
    return union_normalize((graph_subspace(rep.matrix(x)) for x in h.member_indices), 2 * rep.dim)


def permutation_relation(n: int, limit: int = 6) -> SubspaceUnion:
    """Pairs whose coordinates agree up to some permutation in S_n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > limit:
        raise ResourceError(f"permutation_relation({n}) would build {n}! members (limit n <= {limit})")
    members = []
    for p in all_permutations(n):
        m = RatMatrix.from_entries(n, n, {(p[i], i): 1 for i in range(n)})
        members.append(graph_subspace(m))
    return union_normalize(members, 2 * n)


# ---------------------------------------------------------------------------
# Queries


def identifies(rel: IdentificationRelation | SubspaceUnion, alpha: Sequence, beta: Sequence) -> bool:
    u = rel.relation if isinstance(rel, IdentificationRelation) else rel
    n = u.ambient_dim // 2
    if len(alpha) != n or len(beta) != n:
        raise ValueError(f"inputs must have length {n}")
    return union_member(u, tuple(alpha) + tuple(beta))


class Comparison(str, enum.Enum):
    EQUAL = "Equal"
    STRICT_SUBSET = "StrictSubset"
    STRICT_SUPERSET = "StrictSuperset"
    INCOMPARABLE = "Incomparable"


def compare(a, b) -> Comparison:
    ua = a.relation if isinstance(a, IdentificationRelation) else a
    ub = b.relation if isinstance(b, IdentificationRelation) else b
    sub, sup = union_subset(ua, ub), union_subset(ub, ua)
    if sub and sup:
        return Comparison.EQUAL
    if sub:
        return Comparison.STRICT_SUBSET
    if sup:
        return Comparison.STRICT_SUPERSET
    return Comparison.INCOMPARABLE


# ---------------------------------------------------------------------------
# Relation invariants


def _union_of(rel) -> SubspaceUnion:
    return rel.relation if isinstance(rel, IdentificationRelation) else rel


def is_reflexive(rel) -> bool:
    u = _union_of(rel)
    return union_contains_subspace(u, diagonal(u.ambient_dim // 2))


def swap_perm(n: int) -> list:
    return [i + n for i in range(n)] + list(range(n))


def is_swap_symmetric(rel) -> bool:
    u = _union_of(rel)
    return union_eq(union_permute(u, swap_perm(u.ambient_dim // 2)), u)


def is_equivariant(rel, rep: PermRep) -> bool:
    u = _union_of(rel)
    n = rep.dim
    for g in rep.group.generators:
        act = rep.gset.action[g]
        perm = list(act) + [n + x for x in act]
        if not union_eq(union_permute(u, perm), u):
            return False
    return True


def _random_point(s: Subspace, rng: random.Random, spread: int = 5) -> tuple:
    v = [ZERO] * s.ambient_dim
    for b in s.basis:
        c = rng.randint(-spread, spread)
        if c:
            for k, x in enumerate(b):
                if x:
                    v[k] += c * x
    return tuple(v)


def _random_partner(u: SubspaceUnion, beta: tuple, rng: random.Random) -> tuple | None:
    """Some gamma with (beta, gamma) in u, chosen at random among solvable members."""
    n = len(beta)
    members = list(u.members)
    rng.shuffle(members)
    for m in members:
        if not m.constraints:
            return tuple(as_rational(rng.randint(-5, 5)) for _ in range(n))
        left = RatMatrix(len(m.constraints), n, tuple(r[:n] for r in m.constraints))
        right = RatMatrix(len(m.constraints), n, tuple(r[n:] for r in m.constraints))
        rhs = [-x for x in left.apply(beta)]
        part = solve(right, rhs)
        if part is None:
            continue
        ker = Subspace.from_constraints(right.data, n) if right.nrows else Subspace.full(n)
        shift = _random_point(ker, rng)
        return tuple(a + b for a, b in zip(part, shift))
    return None


def sampled_transitivity(rel, trials: int = 100, seed: int = 0) -> bool:
    u = _union_of(rel)
    if u.is_empty:
        return True
    n = u.ambient_dim // 2
    rng = random.Random(seed)
    for _ in range(trials):
        m = rng.choice(u.members)
        p = _random_point(m, rng)
        alpha, beta = p[:n], p[n:]
        gamma = _random_partner(u, beta, rng)
        if gamma is None:
            continue
        if not union_member(u, alpha + gamma):
            return False
    return True


def relation_properties(rel, rep: PermRep, trials: int = 100, seed: int = 0) -> dict:
    return {
        "reflexive": is_reflexive(rel),
        "swap_symmetric": is_swap_symmetric(rel),
        "equivariant": is_equivariant(rel, rep),
        "transitive_sampled": sampled_transitivity(rel, trials, seed),
    }


# ---------------------------------------------------------------------------
# Depth, width and subgroup drivers


@dataclass
class Stabilization:
    threshold: int | None
    relations: list
    monotone: bool

    @property
    def status(self) -> str:
        if self.threshold is None:
            return f"not stabilized by {len(self.relations)} repetitions"
        return f"stabilized at R={self.threshold}"


def _contains_identity(layer: LayerSpace) -> bool:
    if layer.source != layer.target:
        return False
    ident = RatMatrix.identity(layer.source.dim).vec()
    vecs = [m.vec() for m in layer.generators]
    r = rank(RatMatrix(len(vecs), len(ident), tuple(vecs))) if vecs else 0
    return rank(RatMatrix(len(vecs) + 1, len(ident), tuple(vecs) + (ident,))) == r


def repeat_layer(arch: Architecture, index: int, times: int) -> Architecture:
    layer = arch.layers[index]
    return arch.replace_layer(index, *([layer] * times))


def depth_stabilization_threshold(arch: Architecture, repeat_index: int, max_reps: int,
                                  limits: Limits = Limits()) -> Stabilization:
    """Empirical repetition threshold for layer ``repeat_index`` (0-based)."""
    if max_reps < 2:
        raise ValueError("max_reps must be at least 2")
    layer = arch.layers[repeat_index]
    if not _contains_identity(layer):
        raise ArchitectureError("repeated layer must map a representation to itself and span the identity")
    rels = [rho(repeat_layer(arch, repeat_index, m), limits) for m in range(1, max_reps + 1)]
    monotone = all(union_subset(b.relation, a.relation) for a, b in zip(rels, rels[1:]))
    threshold = None
    for m in range(len(rels) - 1):
        if union_eq(rels[m].relation, rels[m + 1].relation):
            threshold = m + 1
            break
    return Stabilization(threshold, rels, monotone)


def _rep_chain(arch: Architecture) -> list:
    for i, l in enumerate(arch.layers):
        if l.label != "full":
            raise ArchitectureError(
                f"layer {i} is '{l.label}'; width checks rebuild full layers and need a full architecture")
    return [arch.layers[0].source] + [l.target for l in arch.layers]


def _full_arch(reps: Sequence[PermRep], activation: str) -> Architecture:
    return Architecture(tuple(full_layer(a, b) for a, b in zip(reps, reps[1:])), activation)


@dataclass
class WidthCheck:
    equal: bool
    split_law: bool | None
    base: IdentificationRelation
    widened: IdentificationRelation


def verify_width_invariance(arch: Architecture, layer_index: int, mult: int,
                            split: tuple | None = None, limits: Limits = Limits()) -> WidthCheck:
    """Compare rho with hidden V_i against V_i tensor R^f (i = layer_index, 1..d-1).

    With ``split = (V', V'')`` decomposing V_i, also checks
    rho(V' + V'') = rho(V') & rho(V'').
    """
    reps = _rep_chain(arch)
    if not 1 <= layer_index <= len(reps) - 2:
        raise ValueError(f"layer_index must name a hidden representation (1..{len(reps) - 2})")
    base = rho(arch, limits)
    widened_reps = list(reps)
    widened_reps[layer_index] = mult_rep(reps[layer_index], mult)
    widened = rho(_full_arch(widened_reps, arch.activation_tag), limits)
    split_ok = None
    if split is not None:
        va, vb = split
        rs = []
        for v in (sum_rep(va, vb), va, vb):
            r = list(reps)
            r[layer_index] = v
            rs.append(rho(_full_arch(r, arch.activation_tag), limits).relation)
        split_ok = union_eq(rs[0], union_intersect(rs[1], rs[2]))
    return WidthCheck(union_eq(base.relation, widened.relation), split_ok, base, widened)


def verify_subgroup_hierarchy(g: Group, k: Subgroup, h: Subgroup,
                              arch_template: Callable[[PermRep], Architecture],
                              limits: Limits = Limits()) -> tuple:
    """For K <= H <= G, check rho(hidden R^{G/K}) is inside rho(hidden R^{G/H})."""
    from .equivariant import coset_rep

    if k.parent != g or h.parent != g or not k.is_subgroup_of(h):
        raise ArchitectureError("need K <= H <= G")
    rk = rho(arch_template(coset_rep(g, k)), limits)
    rh = rho(arch_template(coset_rep(g, h)), limits)
    verdict = compare(rk, rh)
    return verdict in (Comparison.EQUAL, Comparison.STRICT_SUBSET), verdict, rk, rh
