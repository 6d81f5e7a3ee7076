"""Finite permutation groups, cosets, double cosets and G-sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations as _iter_perms
from typing import Iterable, Sequence


class GroupError(ValueError):
    pass


class InvalidSubgroupError(GroupError):
    pass


def check_perm(images: Sequence[int]) -> tuple:
    images = tuple(int(i) for i in images)
    if sorted(images) != list(range(len(images))):
        raise GroupError(f"{list(images)} is not a bijection of 0..{len(images) - 1}")
    return images


def compose(p: tuple, q: tuple) -> tuple:
    """(p*q)(x) = p(q(x))."""
    return tuple(p[i] for i in q)


def inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Group:
    """A concrete permutation group on {0..degree-1}.

    Elements are sorted lexicographically by their image tuples; element 0 is
    therefore always the identity.
    """

    elements: tuple
    generators: tuple  # element indices
    name: str = ""

    @cached_property
    def degree(self) -> int:
        return len(self.elements[0])

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.elements)}

    @cached_property
    def mul_table(self) -> tuple:
        idx = self.index
        return tuple(tuple(idx[compose(a, b)] for b in self.elements) for a in self.elements)

    @cached_property
    def inverse_table(self) -> tuple:
        idx = self.index
        return tuple(idx[inverse(a)] for a in self.elements)

    @property
    def identity_index(self) -> int:
        return 0

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse_table[a]

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        label = self.name or "Group"
        return f"<{label} order={self.order} degree={self.degree}>"

    # subgroups -----------------------------------------------------------

    def subgroup(self, members: Iterable[int]) -> "Subgroup":
        return Subgroup(self, frozenset(members))

    def generated_subgroup(self, gens: Iterable[Sequence[int]]) -> "Subgroup":
        gens = [check_perm(g) for g in gens]
        for g in gens:
            if g not in self.index:
                raise InvalidSubgroupError(f"{list(g)} is not an element of {self!r}")
        sub = generate_group(gens, degree=self.degree) if gens else None
        if sub is None:
            return self.trivial_subgroup()
        return self.subgroup(self.index[p] for p in sub.elements)

    def trivial_subgroup(self) -> "Subgroup":
        return self.subgroup([0])

    def full_subgroup(self) -> "Subgroup":
        return self.subgroup(range(self.order))

    def alternating_subgroup(self) -> "Subgroup":
        return self.subgroup(i for i, p in enumerate(self.elements) if perm_sign(p) == 1)

    def all_subgroups(self) -> list:
        """Every subgroup, found as closures of element subsets (small groups only)."""
        seen = {}
        frontier = [self.trivial_subgroup()]
        seen[frontier[0].members] = frontier[0]
        while frontier:
            nxt = []
            for s in frontier:
                for g in range(self.order):
                    if g in s.members:
                        continue
                    t = _closure(self, s.members | {g})
                    if t not in seen:
                        seen[t] = self.subgroup(t)
                        nxt.append(seen[t])
            frontier = nxt
        return sorted(seen.values(), key=lambda s: (len(s), sorted(s.members)))


def _closure(g: Group, members: Iterable[int]) -> frozenset:
    out = set(members) | {0}
    frontier = list(out)
    while frontier:
        new = []
        for a in frontier:
            for b in list(out):
                for c in (g.mul(a, b), g.mul(b, a)):
                    if c not in out:
                        out.add(c)
                        new.append(c)
        frontier = new
    return frozenset(out)


def perm_sign(p: tuple) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def generate_group(gens: Iterable[Sequence[int]], degree: int | None = None, name: str = "") -> Group:
    """Close a set of permutations under composition."""
    gens = [check_perm(g) for g in gens]
    if degree is None:
        if not gens:
            raise GroupError("degree required when no generators are given")
        degree = len(gens[0])
    if any(len(g) != degree for g in gens):
        raise GroupError("generators act on ground sets of different sizes")
    ident = tuple(range(degree))
    elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                c = compose(g, a)
                if c not in elems:
                    elems.add(c)
                    new.append(c)
        frontier = new
    ordered = tuple(sorted(elems))
    index = {p: i for i, p in enumerate(ordered)}
    gen_idx = tuple(sorted({index[g] for g in gens if g != ident}))
    return Group(ordered, gen_idx, name)


def cyclic(n: int) -> Group:
    if n < 1:
        raise GroupError("cyclic(n) needs n >= 1")
    return generate_group([tuple((i + 1) % n for i in range(n))], degree=n, name=f"Z{n}")


def symmetric(n: int) -> Group:
    if n < 1:
        raise GroupError("symmetric(n) needs n >= 1")
    gens = []
    if n > 1:
        gens.append(tuple([1, 0] + list(range(2, n))))
        gens.append(tuple((i + 1) % n for i in range(n)))
    return generate_group(gens, degree=n, name=f"S{n}")


def dihedral(n: int) -> Group:
    """Symmetries of the n-gon acting on its vertices (order 2n)."""
    if n < 3:
        raise GroupError("dihedral(n) needs n >= 3")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return generate_group([rot, ref], degree=n, name=f"D{n}")


def direct_product(a: Group, b: Group) -> Group:
    """A x B acting on the disjoint union of their ground sets."""
    na = a.degree
    gens = []
    for i in a.generators:
        gens.append(a.elements[i] + tuple(range(na, na + b.degree)))
    for i in b.generators:
        gens.append(tuple(range(na)) + tuple(na + x for x in b.elements[i]))
    return generate_group(gens, degree=na + b.degree, name=f"{a.name}x{b.name}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    parent: Group = field(compare=True)
    members: frozenset = frozenset()

    def __post_init__(self):
        g = self.parent
        if 0 not in self.members:
            raise InvalidSubgroupError("subgroup does not contain the identity")
        for a in self.members:
            if not 0 <= a < g.order:
                raise InvalidSubgroupError(f"index {a} is not an element of the group")
            for b in self.members:
                if g.mul(a, b) not in self.members:
                    raise InvalidSubgroupError("subset is not closed under multiplication")
        if g.order % len(self.members):
            raise InvalidSubgroupError("subgroup order does not divide the group order")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def member_indices(self) -> tuple:
        return tuple(sorted(self.members))

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return self.parent == other.parent and self.members <= other.members

    def __repr__(self) -> str:
        return f"<Subgroup order={len(self)} of {self.parent!r}>"


def _check_parent(g: Group, h: Subgroup) -> None:
    if h.parent != g:
        raise InvalidSubgroupError("subgroup belongs to a different group")


@dataclass(frozen=True)
class CosetSpace:
    """Left cosets gH, ordered by smallest member."""

    parent: Group
    subgroup: Subgroup
    cosets: tuple  # tuple of frozensets of element indices
    representatives: tuple
    action: tuple  # action[g][c] = index of g*(coset c)

    @cached_property
    def coset_of(self) -> dict:
        return {e: c for c, cs in enumerate(self.cosets) for e in cs}

    def __len__(self) -> int:
        return len(self.cosets)


def cosets(g: Group, h: Subgroup) -> CosetSpace:
    _check_parent(g, h)
    seen, classes = set(), []
    for s in range(g.order):
        if s in seen:
            continue
        c = frozenset(g.mul(s, x) for x in h.members)
        seen |= c
        classes.append(c)
    classes.sort(key=min)
    reps = tuple(min(c) for c in classes)
    lookup = {e: i for i, c in enumerate(classes) for e in c}
    action = tuple(tuple(lookup[g.mul(a, r)] for r in reps) for a in range(g.order))
    return CosetSpace(g, h, tuple(classes), reps, action)


@dataclass(frozen=True)
class DoubleCosetSpace:
    parent: Group
    left: Subgroup
    right: Subgroup
    classes: tuple
    representatives: tuple

    def __len__(self) -> int:
        return len(self.classes)


def double_cosets(h: Subgroup, g: Group, k: Subgroup) -> DoubleCosetSpace:
    """H\\G/K as the classes {h x k}."""
    _check_parent(g, h)
    _check_parent(g, k)
    seen, classes = set(), []
    for x in range(g.order):
        if x in seen:
            continue
        c = frozenset(g.mul(g.mul(a, x), b) for a in h.members for b in k.members)
        seen |= c
        classes.append(c)
    classes.sort(key=min)
    return DoubleCosetSpace(g, h, k, tuple(classes), tuple(min(c) for c in classes))


# ---------------------------------------------------------------------------
# G-sets


@dataclass(frozen=True, eq=False)
class GSetObj:
    """A finite set {0..size-1} with a left action of ``group``.

    ``action[g][x]`` is the image of point x under element index g.
    """

    group: Group
    size: int
    action: tuple
    labels: tuple | None = None

    def __post_init__(self):
        if len(self.action) != self.group.order:
            raise GroupError("one permutation per group element required")
        for p in self.action:
            if len(p) != self.size or sorted(p) != list(range(self.size)):
                raise GroupError("action rows must be permutations of the point set")

    def act(self, g: int, x: int) -> int:
        return self.action[g][x]

    @cached_property
    def orbit_partition(self) -> tuple:
        return orbits(self)

    def check_action_laws(self, exhaustive_limit: int = 10_000) -> bool:
        g = self.group
        if self.action[0] != tuple(range(self.size)):
            return False
        elems = range(g.order)
        if g.order * self.size > exhaustive_limit:
            pairs = [(a, b) for a in g.generators for b in elems]
        else:
            pairs = [(a, b) for a in elems for b in elems]
        for a, b in pairs:
            ab = g.mul(a, b)
            for x in range(self.size):
                if self.action[a][self.action[b][x]] != self.action[ab][x]:
                    return False
        return True

    def key(self) -> tuple:
        return (self.group.elements, self.action)

    def __eq__(self, other) -> bool:
        return isinstance(other, GSetObj) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"<GSet size={self.size} orbits={len(self.orbit_partition)} over {self.group!r}>"


def orbits(x: GSetObj) -> tuple:
    """Orbit partition, as sorted tuples ordered by smallest point."""
    gens = x.group.generators
    seen = [False] * x.size
    parts = []
    for start in range(x.size):
        if seen[start]:
            continue
        seen[start] = True
        part, stack = [start], [start]
        while stack:
            p = stack.pop()
            for g in gens:
                q = x.action[g][p]
                if not seen[q]:
                    seen[q] = True
                    part.append(q)
                    stack.append(q)
        parts.append(tuple(sorted(part)))
    return tuple(parts)


def natural_gset(g: Group) -> GSetObj:
    """The defining action on {0..degree-1}."""
    return GSetObj(g, g.degree, g.elements)


def regular_gset(g: Group) -> GSetObj:
    return GSetObj(g, g.order, g.mul_table)


def trivial_gset(g: Group, size: int = 1) -> GSetObj:
    return GSetObj(g, size, (tuple(range(size)),) * g.order)


def gset_product(x: GSetObj, y: GSetObj) -> GSetObj:
    """Componentwise action on X x Y; point (a, b) has index a*|Y| + b."""
    if x.group != y.group:
        raise GroupError("G-sets over different groups")
    ny = y.size
    action = tuple(tuple(px[a] * ny + py[b] for a in range(x.size) for b in range(ny))
                   for px, py in zip(x.action, y.action))
    labels = None
    if x.labels and y.labels:
        labels = tuple(f"({a},{b})" for a in x.labels for b in y.labels)
    return GSetObj(x.group, x.size * ny, action, labels)


def gset_power(x: GSetObj, k: int) -> GSetObj:
    if k < 1:
        raise GroupError("power needs k >= 1")
    out = x
    for _ in range(k - 1):
        out = gset_product(out, x)
    return out


def gset_disjoint_union(x: GSetObj, y: GSetObj) -> GSetObj:
    if x.group != y.group:
        raise GroupError("G-sets over different groups")
    n = x.size
    action = tuple(px + tuple(n + q for q in py) for px, py in zip(x.action, y.action))
    return GSetObj(x.group, n + y.size, action)


def gset_from_cosets(cs: CosetSpace) -> GSetObj:
    return GSetObj(cs.parent, len(cs), cs.action)


def all_permutations(n: int) -> list:
    return [tuple(p) for p in _iter_perms(range(n))]
