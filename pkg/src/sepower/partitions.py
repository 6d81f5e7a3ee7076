"""Set partitions, refinement, and minimal zero-sum partition families."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

from .equivariant import ResourceError
from .exactlin import as_rational

DEFAULT_ENUM_LIMIT = 10
DEFAULT_MAX_BLOCK = 12


@dataclass(frozen=True)
class SetPartition:
    """Blocks sorted by minimum, elements sorted within blocks."""

    ground: tuple
    blocks: tuple

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]], ground: Iterable[int] | None = None) -> "SetPartition":
        bl = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in bl):
            raise ValueError("empty block")
        pts = sorted(p for b in bl for p in b)
        if len(set(pts)) != len(pts):
            raise ValueError("blocks overlap")
        g = tuple(sorted(ground)) if ground is not None else tuple(pts)
        if tuple(pts) != g:
            raise ValueError("blocks do not cover the ground set")
        return cls(g, tuple(sorted(bl)))

    @classmethod
    def singletons(cls, ground: Iterable[int]) -> "SetPartition":
        g = tuple(sorted(ground))
        return cls(g, tuple((p,) for p in g))

    @classmethod
    def single_block(cls, ground: Iterable[int]) -> "SetPartition":
        g = tuple(sorted(ground))
        return cls(g, (g,) if g else ())

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def block_of(self) -> dict:
        return {p: i for i, b in enumerate(self.blocks) for p in b}


def refines(q: SetPartition, p: SetPartition) -> bool:
    """True iff q is finer than (or equal to) p."""
    if q.ground != p.ground:
        raise ValueError("partitions of different ground sets")
    owner = p.block_of()
    return all(len({owner[x] for x in b}) == 1 for b in q.blocks)


def duplicate_partition(p: SetPartition) -> SetPartition:
    """Each block Y becomes Y + Y', primed points offset by the ground size."""
    n = len(p.ground)
    return SetPartition.of((b + tuple(x + n for x in b) for b in p.blocks),
                           p.ground + tuple(x + n for x in p.ground))


def all_partitions(ground: Sequence[int], limit: int = DEFAULT_ENUM_LIMIT) -> Iterator[SetPartition]:
    """Every partition of ``ground`` once, via restricted growth strings."""
    g = tuple(ground)
    if len(g) > limit:
        raise ResourceError(f"refusing to enumerate partitions of {len(g)} > {limit} points")
    n = len(g)
    if n == 0:
        yield SetPartition((), ())
        return
    rgs = [0] * n

    def rec(i: int, m: int):
        if i == n:
            blocks = [[] for _ in range(m + 1)]
            for x, b in zip(g, rgs):
                blocks[b].append(x)
            yield SetPartition.of(blocks, g)
            return
        for b in range(m + 2):
            rgs[i] = b
            yield from rec(i + 1, max(m, b))

    rgs[0] = 0
    yield from rec(1, 0)


@lru_cache(maxsize=65536)
def _minimal_zero_sum_local(values: tuple) -> tuple:
    """Finest partitions of positions 0..len-1 into zero-sum blocks (values all nonzero).

    Such a partition is finest exactly when every block is a minimal zero-sum
    set, so we repeatedly pick the smallest uncovered position and branch on the
    minimal zero-sum sets that contain it.
    """
    n = len(values)
    if sum(values) != 0:
        return ()
    out = []

    def rec(remaining: tuple, acc: list):
        if not remaining:
            out.append(tuple(acc))
            return
        e, rest = remaining[0], remaining[1:]
        ve = values[e]
        k = len(rest)
        # subset sums over rest, incremental by lowest set bit
        sums = [0] * (1 << k)
        zero_masks = []
        for mask in range(1, 1 << k):
            low = mask & -mask
            sums[mask] = sums[mask ^ low] + values[rest[low.bit_length() - 1]]
            if sums[mask] + ve == 0:
                zero_masks.append(mask)
        zs = set(zero_masks)
        for mask in zero_masks:
            # minimal iff no proper nonempty submask also closes to zero with e
            sub = (mask - 1) & mask
            minimal = True
            while sub:
                if sub in zs:
                    minimal = False
                    break
                sub = (sub - 1) & mask
            if not minimal:
                continue
            block = (e,) + tuple(rest[i] for i in range(k) if mask >> i & 1)
            left = tuple(rest[i] for i in range(k) if not mask >> i & 1)
            acc.append(block)
            rec(left, acc)
            acc.pop()

    rec(tuple(range(n)), [])
    return tuple(out)


def _canonical_coeffs(coeffs: Sequence) -> list:
    return [as_rational(c) for c in coeffs]


def zero_sum_partitions(coeffs: Sequence, base: SetPartition,
                        max_block: int = DEFAULT_MAX_BLOCK) -> list:
    """The finest partitions Q <= base whose blocks all have coefficient sum zero.

    ``coeffs`` is indexed by position in ``base.ground``. Zero-coefficient points are
    singletons in every finest partition. The family factorises over the blocks of
    ``base``; an empty list means no such partition exists.
    """
    a = _canonical_coeffs(coeffs)
    if len(a) != len(base.ground):
        raise ValueError(f"{len(a)} coefficients for a ground set of {len(base.ground)}")
    pos = {p: i for i, p in enumerate(base.ground)}
    per_block = []
    for block in base.blocks:
        nz = [p for p in block if a[pos[p]]]
        zeros = [(p,) for p in block if not a[pos[p]]]
        if len(nz) > max_block:
            raise ResourceError(
                f"block with {len(nz)} nonzero coefficients exceeds max block size {max_block}",
                {"block_size": len(nz)})
        # scale to integers so the cached enumerator sees a small hashable key
        den = 1
        for p in nz:
            den = den * a[pos[p]].denominator // _gcd(den, a[pos[p]].denominator)
        vals = tuple(int(a[pos[p]] * den) for p in nz)
        local = _minimal_zero_sum_local(vals)
        if not local:
            return []
        per_block.append([tuple(tuple(nz[i] for i in b) for b in q) + tuple(zeros) for q in local])
    return [SetPartition.of((b for part in choice for b in part), base.ground)
            for choice in product(*per_block)]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def is_zero_sum(q: SetPartition, coeffs: Sequence, ground: Sequence[int]) -> bool:
    a = _canonical_coeffs(coeffs)
    pos = {p: i for i, p in enumerate(ground)}
    return all(sum(a[pos[x]] for x in b) == 0 for b in q.blocks)


def brute_force_minimal_zero_sum(coeffs: Sequence, base: SetPartition,
                                 limit: int = DEFAULT_ENUM_LIMIT) -> list:
    """Reference answer: filter all partitions, then keep the refinement-minimal ones."""
    psi = [q for q in all_partitions(base.ground, limit)
           if refines(q, base) and is_zero_sum(q, coeffs, base.ground)]
    minimal = []
    for q in psi:
        if not any(r != q and refines(r, q) for r in psi):
            minimal.append(q)
    return minimal


def all_zero_sum_partitions(coeffs: Sequence, base: SetPartition,
                            limit: int = DEFAULT_ENUM_LIMIT) -> list:
    return [q for q in all_partitions(base.ground, limit)
            if refines(q, base) and is_zero_sum(q, coeffs, base.ground)]
