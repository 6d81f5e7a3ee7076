"""Named verification suites: small exact instances of the separation laws.

Each suite returns a :class:`SuiteResult` listing individual checks; the first
failing check carries a serialisable counterexample.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .empirical import mc_separation
from .equivariant import (
    Architecture,
    PermRep,
    circular_layer,
    commutant_basis,
    coset_rep,
    double_coset_basis,
    full_layer,
    ign_layer,
    natural_rep,
    network,
    power_rep,
    regular_rep,
    trivial_rep,
)
from .exactlin import RatMatrix, rational_str, rref, union_eq, union_member
from .groups import Group, cyclic, symmetric
from .separation import (
    Comparison,
    Limits,
    compare,
    depth_stabilization_threshold,
    h_orbit_relation,
    permutation_relation,
    relation_properties,
    rho,
    verify_subgroup_hierarchy,
    verify_width_invariance,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)
    # (label, IdentificationRelation, input rep) for the relation-property suite
    relations: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def add(self, name: str, passed: bool, **detail) -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_json(self) -> dict:
        fail = self.first_failure
        return {"suite": self.suite, "passed": self.passed,
                "checks": [c.to_json() for c in self.checks],
                "counterexample": fail.to_json() if fail else None}


def _timed(fn: Callable) -> Callable:
    def run(*args, **kwargs) -> SuiteResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def small_groups() -> list:
    """(name, group, [(subgroup label, subgroup)]) for Z_2, Z_3 and S_3."""
    out = []
    for name, g in (("Z2", cyclic(2)), ("Z3", cyclic(3)), ("S3", symmetric(3))):
        subs = [("trivial", g.trivial_subgroup()), ("full", g.full_subgroup())]
        if name == "S3":
            subs.insert(1, ("A3", g.alternating_subgroup()))
        out.append((name, g, subs))
    return out


def regular_architecture(g: Group, h) -> Architecture:
    return network(regular_rep(g), regular_rep(g), coset_rep(g, h))


def cnn_architecture(n: int, k: int) -> Architecture:
    z = cyclic(n)
    return Architecture((circular_layer(n, k, z), full_layer(natural_rep(z), trivial_rep(z))), "relu")


@_timed
def suite_regular(limits: Limits = Limits()) -> SuiteResult:
    """Regular input, regular hidden layer, R^{G/H} output: rho is the H-orbit relation."""
    res = SuiteResult("regular")
    for name, g, subs in small_groups():
        for label, h in subs:
            arch = regular_architecture(g, h)
            r = rho(arch, limits)
            ok = union_eq(r.relation, h_orbit_relation(g, h, regular_rep(g)))
            res.add(f"{name}/H={label}", ok, members=len(r.relation))
            res.relations.append((f"regular {name}/H={label}", r, regular_rep(g)))
    return res


@_timed
def suite_cnn(limits: Limits = Limits()) -> SuiteResult:
    """Circular filters of size 1..3 on Z_3: a strictly shrinking chain of relations."""
    res = SuiteResult("cnn")
    z3 = cyclic(3)
    rels = {k: rho(cnn_architecture(3, k), limits) for k in (1, 2, 3)}
    for k, r in rels.items():
        res.relations.append((f"{k}-CNN Z3", r, natural_rep(z3)))
    res.add("1-CNN = permutation relation", union_eq(rels[1].relation, permutation_relation(3)))
    for a, b in ((3, 2), (2, 1)):
        v = compare(rels[a], rels[b])
        res.add(f"rho({a}-CNN) within rho({b}-CNN)", v in (Comparison.EQUAL, Comparison.STRICT_SUBSET),
                verdict=v.value)
    v = compare(rels[3], rels[1])
    res.add("rho(3-CNN) strictly inside rho(1-CNN)", v is Comparison.STRICT_SUBSET, verdict=v.value)
    return res


@_timed
def suite_depth(limits: Limits = Limits(), max_reps: int = 3) -> SuiteResult:
    """Repeating a regular hidden layer on Z_3 stabilises immediately and never grows rho."""
    res = SuiteResult("depth")
    z3 = cyclic(3)
    arch = network(regular_rep(z3), regular_rep(z3), trivial_rep(z3))
    st = depth_stabilization_threshold(arch, 0, max_reps, limits)
    res.add("threshold R = 1", st.threshold == 1, status=st.status)
    res.add(f"monotone up to {max_reps} repetitions", st.monotone)
    for m, r in enumerate(st.relations, 1):
        res.relations.append((f"depth Z3 x{m}", r, regular_rep(z3)))
    return res


@_timed
def suite_width(limits: Limits = Limits(), mults=(1, 2, 3)) -> SuiteResult:
    """Hidden R^G tensor R^f on Z_3 gives the same rho for every f; the split law holds."""
    res = SuiteResult("width")
    z3 = cyclic(3)
    arch = network(regular_rep(z3), regular_rep(z3), trivial_rep(z3))
    for f in mults:
        w = verify_width_invariance(arch, 1, f, split=(regular_rep(z3), regular_rep(z3)) if f == 1 else None,
                                    limits=limits)
        res.add(f"f={f} invariant", w.equal)
        if w.split_law is not None:
            res.add("split law V'=V''=R^G", w.split_law)
        res.relations.append((f"width Z3 f={f}", w.widened, regular_rep(z3)))
    return res


@_timed
def suite_hierarchy(limits: Limits = Limits()) -> SuiteResult:
    """On S_3, {e} < A_3 < G gives nested relations for hidden R^{G/K}."""
    res = SuiteResult("hierarchy")
    s3 = symmetric(3)

    def template(hid: PermRep) -> Architecture:
        return network(regular_rep(s3), hid, trivial_rep(s3))

    chain = [("e", s3.trivial_subgroup()), ("A3", s3.alternating_subgroup()), ("G", s3.full_subgroup())]
    for (kl, k), (hl, h) in zip(chain, chain[1:]):
        ok, verdict, rk, rh = verify_subgroup_hierarchy(s3, k, h, template, limits)
        res.add(f"rho(R^G/{kl}) within rho(R^G/{hl})", ok, verdict=verdict.value)
        res.relations.append((f"hierarchy S3 hidden G/{kl}", rk, regular_rep(s3)))
        if hl == "G":
            res.relations.append((f"hierarchy S3 hidden G/{hl}", rh, regular_rep(s3)))
    return res


def _span_rref(mats) -> RatMatrix:
    vecs = [m.vec() for m in mats]
    m, r = rref(RatMatrix(len(vecs), len(vecs[0]), tuple(vecs)))
    return RatMatrix(r, m.ncols, m.data[:r])


@_timed
def suite_bases() -> SuiteResult:
    """Dimension counts of equivariant layer spaces and double-coset spanning."""
    res = SuiteResult("bases")
    s4 = symmetric(4)
    n = len(commutant_basis(power_rep(s4, 2), power_rep(s4, 2)))
    res.add("S4 pairs -> pairs has 15 generators", n == 15, count=n)
    for k in range(2, 7):
        z = cyclic(k)
        c = len(commutant_basis(regular_rep(z), regular_rep(z)))
        res.add(f"Z{k} regular commutant has {k} generators", c == k, count=c)
        circ = circular_layer(k, k, z)
        same = _span_rref(circ.generators).data == _span_rref(commutant_basis(natural_rep(z), natural_rep(z)).generators).data
        res.add(f"Z{k} circulants span the commutant", same)
    s3 = symmetric(3)
    subs = s3.all_subgroups()
    for k in subs:
        for h in subs:
            dc = double_coset_basis(k, h)
            cb = commutant_basis(coset_rep(s3, k), coset_rep(s3, h))
            same = _span_rref(dc.generators).data == _span_rref(cb.generators).data
            res.add(f"S3 |K|={len(k.members)} |H|={len(h.members)} double cosets span the commutant", same,
                    k=sorted(k.members), h=sorted(h.members))
    return res


# ---------------------------------------------------------------------------
# Symbolic versus sampled agreement


def _point_in(member, rng: random.Random) -> tuple:
    v = [0] * member.ambient_dim
    for b in member.basis:
        c = rng.randint(-3, 3)
        v = [x + c * y for x, y in zip(v, b)]
    return tuple(v)


def sample_pairs(rel, count: int, seed: int = 0) -> tuple:
    """``count // 2`` identified and ``count - count // 2`` separated pairs (alpha, beta)."""
    u = rel.relation
    n = u.ambient_dim // 2
    rng = random.Random(seed)
    ident, sep = [], []
    while len(ident) < count // 2:
        p = _point_in(rng.choice(u.members), rng)
        ident.append((p[:n], p[n:]))
    tries = 0
    while len(sep) < count - count // 2:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not sample separated pairs")
        a = tuple(rng.randint(-3, 3) for _ in range(n))
        b = tuple(rng.randint(-3, 3) for _ in range(n))
        if not union_member(u, a + b):
            sep.append((a, b))
    return ident, sep


def agreement_architectures() -> list:
    out = [(f"regular {name}/H={label}", regular_architecture(g, h))
           for name, g, subs in small_groups() for label, h in subs]
    out += [(f"{k}-CNN Z3", cnn_architecture(3, k)) for k in (1, 2, 3)]
    return out


@_timed
def suite_activations(limits: Limits = Limits(), pairs: int = 50, samples: int = 1000,
                      tol_sep: float = 1e-4, tol_id: float = 1e-7, seed: int = 0,
                      min_witness_rate: float = 0.95) -> SuiteResult:
    """ReLU and tanh samplers against the exact relation on the regular and CNN instances."""
    res = SuiteResult("activations")
    for label, arch in agreement_architectures():
        r = rho(arch, limits)
        ident, sep = sample_pairs(r, pairs, seed)
        false_sep, found, decided, agree = [], 0, 0, 0
        for kind, batch in (("identified", ident), ("separated", sep)):
            for a, b in batch:
                verdicts = {act: mc_separation(arch, act, a, b, samples, tol_sep, tol_id, seed)
                            for act in ("relu", "tanh")}
                if kind == "identified":
                    false_sep += [{"alpha": [rational_str(x) for x in a], "beta": [rational_str(x) for x in b],
                                   "activation": act, "gap": v.gap}
                                  for act, v in verdicts.items() if v.separated]
                else:
                    found += sum(v.separated for v in verdicts.values())
                if all(v.decided for v in verdicts.values()):
                    decided += 1
                    agree += verdicts["relu"].separated == verdicts["tanh"].separated
        rate = found / (2 * len(sep)) if sep else 1.0
        res.add(f"{label}: no false separation", not false_sep, examples=false_sep[:1])
        res.add(f"{label}: witness rate >= {min_witness_rate}", rate >= min_witness_rate, rate=rate)
        res.add(f"{label}: relu/tanh agree on decided pairs", agree == decided, agree=agree, decided=decided)
    return res


# ---------------------------------------------------------------------------
# 2-IGN smoke test


TRIANGLE = [(0, 1), (1, 2), (0, 2)]
PATH3 = [(0, 1), (1, 2)]


def ign_architecture() -> Architecture:
    s3 = symmetric(3)
    layer = ign_layer(3, 2, 1, 1, s3)
    return Architecture((layer, full_layer(layer.target, trivial_rep(s3))), "relu")


@_timed
def suite_ign(limits: Limits = Limits(), samples: int = 200, seed: int = 0) -> SuiteResult:
    """2-IGN on 3 nodes: exact relation properties and triangle-vs-path separation."""
    from .empirical import adjacency, graph_vector, wl_colors

    res = SuiteResult("ign")
    s3 = symmetric(3)
    arch = ign_architecture()
    r = rho(arch, limits)
    props = relation_properties(r, power_rep(s3, 2))
    res.add("relation computed in pair space of dim 18", r.relation.ambient_dim == 18,
            members=len(r.relation))
    res.add("contains the diagonal", props["reflexive"])
    res.add("S3-equivariant", props["equivariant"])
    tri, path = adjacency(3, TRIANGLE), adjacency(3, PATH3)
    a, b = graph_vector(tri), graph_vector(path)
    v = mc_separation(arch, "relu", a, b, samples=samples, seed=seed)
    wl = wl_colors(tri, 2) != wl_colors(path, 2)
    res.add("sampled 2-IGNs separate triangle and path", v.separated, gap=v.gap)
    res.add("2-WL agrees", wl or not v.separated)
    res.add("exact relation separates triangle and path", not union_member(r.relation, tuple(a + b)))
    return res


SUITES = {
    "regular": suite_regular,
    "cnn": suite_cnn,
    "depth": suite_depth,
    "width": suite_width,
    "hierarchy": suite_hierarchy,
    "activations": suite_activations,
    "bases": suite_bases,
    "ign": suite_ign,
}


def run_suite(name: str, limits: Limits = Limits()) -> list:
    """Run one named suite, or every suite for ``all``."""
    if name == "all":
        return [run_suite(n, limits)[0] for n in SUITES]
    if name not in SUITES:
        raise KeyError(name)
    fn = SUITES[name]
    return [fn() if name == "bases" else fn(limits=limits)]
