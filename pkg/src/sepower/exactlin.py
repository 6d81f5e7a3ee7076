"""Exact rational linear algebra and finite unions of linear subspaces.

Scalars are ``gmpy2.mpq`` values (exact, arbitrary precision). A
:class:`Subspace` is stored by its constraint matrix in reduced row-echelon
form, so two subspaces are equal exactly when their constraint rows are
equal. A :class:`SubspaceUnion` is kept in absorbed canonical form: no member
is contained in another and members are sorted by (dimension descending,
constraint rows).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


class DimensionError(ValueError):
    """Operands live in different ambient spaces."""


def as_rational(x) -> mpq:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass a Fraction or string")
    if isinstance(x, str):
        return mpq(x.strip())
    return mpq(x)


def rational_str(q) -> str:
    """``"p/q"``, or ``"p"`` when the denominator is one."""
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Matrices


@dataclass(frozen=True)
class RatMatrix:
    nrows: int
    ncols: int
    data: tuple  # tuple of row tuples of mpq

    def __post_init__(self):
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], ncols: int | None = None) -> "RatMatrix":
        data = tuple(tuple(as_rational(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols required for an empty matrix")
            ncols = len(data[0])
        return cls(len(data), ncols, data)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RatMatrix":
        return cls(nrows, ncols, tuple((ZERO,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: dict) -> "RatMatrix":
        """Build from a sparse ``{(r, c): value}`` mapping."""
        rows = [[ZERO] * ncols for _ in range(nrows)]
        for (r, c), v in entries.items():
            rows[r][c] = as_rational(v)
        return cls(nrows, ncols, tuple(tuple(r) for r in rows))

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def row(self, i: int) -> tuple:
        return self.data[i]

    def __getitem__(self, idx):
        r, c = idx
        return self.data[r][c]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.ncols, self.nrows,
                         tuple(tuple(r[c] for r in self.data) for c in range(self.ncols)))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.data)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * col[k] for k, a in nz), ZERO) for col in cols))
        return RatMatrix(self.nrows, other.ncols, tuple(out))

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return RatMatrix(self.nrows, self.ncols,
                         tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.nrows, self.ncols, tuple(tuple(-a for a in r) for r in self.data))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = as_rational(c)
        return RatMatrix(self.nrows, self.ncols, tuple(tuple(c * a for a in r) for r in self.data))

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for {self.ncols} columns")
        v = [as_rational(x) for x in v]
        return tuple(sum((a * b for a, b in zip(r, v) if a), ZERO) for r in self.data)

    def vec(self) -> tuple:
        """Row-major flattening."""
        return tuple(a for r in self.data for a in r)

    def is_zero(self) -> bool:
        return not any(a for r in self.data for a in r)

    def to_json(self) -> list:
        return [[rational_str(a) for a in r] for r in self.data]

    def __repr__(self) -> str:
        return f"RatMatrix({self.to_json()})"


def hstack(*ms: RatMatrix) -> RatMatrix:
    n = ms[0].nrows
    if any(m.nrows != n for m in ms):
        raise DimensionError("row counts differ")
    return RatMatrix(n, sum(m.ncols for m in ms),
                     tuple(sum((m.data[i] for m in ms), ()) for i in range(n)))


def vstack(*ms: RatMatrix) -> RatMatrix:
    c = ms[0].ncols
    if any(m.ncols != c for m in ms):
        raise DimensionError("column counts differ")
    return RatMatrix(sum(m.nrows for m in ms), c, sum((m.data for m in ms), ()))


def block_diag(*ms: RatMatrix) -> RatMatrix:
    total = sum(m.ncols for m in ms)
    rows = []
    offset = 0
    for m in ms:
        for r in m.data:
            rows.append((ZERO,) * offset + r + (ZERO,) * (total - offset - m.ncols))
        offset += m.ncols
    return RatMatrix(len(rows), total, tuple(rows))


# ---------------------------------------------------------------------------
# Row reduction


def _rref_sparse(rows: Iterable, pivots: dict | None = None) -> dict:
    """Incremental sparse Gauss-Jordan elimination.

    ``pivots`` maps pivot column -> row dict (pivot entry 1, zero in every other
    pivot column). Rows are folded in one at a time; the invariant is kept after
    each insertion, so the final table is exactly the RREF of all rows seen.
    """
    pivots = {} if pivots is None else dict(pivots)
    for raw in rows:
        if isinstance(raw, dict):
            row = {c: v for c, v in raw.items() if v}
        else:
            row = {c: mpq(v) for c, v in enumerate(raw) if v}
        for c in [c for c in row if c in pivots]:
            f = row.get(c)
            if not f:
                continue
            for cc, pv in pivots[c].items():
                nv = row.get(cc, ZERO) - f * pv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if not row:
            continue
        p = min(row)
        inv = 1 / row[p]
        row = {c: v * inv for c, v in row.items()}
        for q, prow in pivots.items():
            f = prow.get(p)
            if f:
                for cc, v in row.items():
                    nv = prow.get(cc, ZERO) - f * v
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        pivots[p] = row
    return pivots


def _dense_rows(pivots: dict, ncols: int) -> tuple:
    out = []
    for p in sorted(pivots):
        r = [ZERO] * ncols
        for c, v in pivots[p].items():
            r[c] = v
        out.append(tuple(r))
    return tuple(out)


def rref(m: RatMatrix) -> tuple:
    """Reduced row-echelon form with zero rows dropped, and the rank."""
    rows = _dense_rows(_rref_sparse(m.data), m.ncols)
    return RatMatrix(len(rows), m.ncols, rows), len(rows)


def rank(m: RatMatrix) -> int:
    return len(_rref_sparse(m.data))


def _kernel_basis(constraints: tuple, n: int) -> tuple:
    pivot_cols = []
    for r in constraints:
        pivot_cols.append(next(c for c, v in enumerate(r) if v))
    pivot_set = set(pivot_cols)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for r, pc in zip(constraints, pivot_cols):
            if r[f]:
                v[pc] = -r[f]
        basis.append(tuple(v))
    return tuple(basis)


# ---------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n given by RREF constraint rows.

    Build through the classmethods; the raw constructor trusts its input.
    """

    ambient_dim: int
    constraints: tuple

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, RatMatrix.identity(n).data)

    @classmethod
    def from_constraints(cls, rows: Iterable[Sequence], n: int) -> "Subspace":
        rows = list(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError(f"constraint rows must have length {n}")
        return cls(n, _dense_rows(_rref_sparse(rows), n))

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int) -> "Subspace":
        vectors = list(vectors)
        if any(len(v) != n for v in vectors):
            raise DimensionError(f"spanning vectors must have length {n}")
        row_space = _dense_rows(_rref_sparse(vectors), n)
        return cls.from_constraints(_kernel_basis(row_space, n), n)

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.constraints)

    @cached_property
    def basis(self) -> tuple:
        return _kernel_basis(self.constraints, self.ambient_dim)

    @cached_property
    def _sparse_constraints(self) -> tuple:
        return tuple(tuple((c, v) for c, v in enumerate(r) if v) for r in self.constraints)

    @cached_property
    def _pivots(self) -> dict:
        return {next(c for c, v in r): dict(r) for r in self._sparse_constraints}

    def contains_vector(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(v)} in ambient {self.ambient_dim}")
        v = [as_rational(x) for x in v]
        return all(not sum((a * v[c] for c, a in r), ZERO) for r in self._sparse_constraints)

    def sort_key(self) -> tuple:
        return (-self.dim, self.constraints)

    def to_json(self) -> list:
        return [[rational_str(a) for a in r] for r in self.constraints]

    @classmethod
    def from_json(cls, rows: list, n: int) -> "Subspace":
        return cls.from_constraints([[as_rational(a) for a in r] for r in rows], n)

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient_dim}, dim={self.dim})"


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"ambient dimensions differ: {a} vs {b}")


def nullspace(m: RatMatrix) -> Subspace:
    """The kernel {v : m v = 0}."""
    return Subspace(m.ncols, _dense_rows(_rref_sparse(m.data), m.ncols))


def subspace_intersect(s: Subspace, t: Subspace) -> Subspace:
    _check_dims(s.ambient_dim, t.ambient_dim)
    if not s.constraints or s == t:
        return t
    if not t.constraints:
        return s
    if len(s.constraints) < len(t.constraints):
        s, t = t, s
    piv = _rref_sparse((dict(r) for r in t._sparse_constraints),
                       {p: dict(r) for p, r in s._pivots.items()})
    return Subspace(s.ambient_dim, _dense_rows(piv, s.ambient_dim))


def subspace_contains(s: Subspace, t: Subspace) -> bool:
    """True iff t is a subset of s."""
    _check_dims(s.ambient_dim, t.ambient_dim)
    if t.dim > s.dim:
        return False
    if not s.constraints or t.dim == 0:
        return True
    if t.dim == s.dim:
        return s == t
    for vec in t.basis:
        for r in s._sparse_constraints:
            if sum((a * vec[c] for c, a in r), ZERO):
                return False
    return True


# ---------------------------------------------------------------------------
# Unions of subspaces


@dataclass(frozen=True)
class SubspaceUnion:
    """A finite union of subspaces in absorbed canonical form.

    No members means the empty set; the whole space is the single member with
    no constraints.
    """

    ambient_dim: int
    members: tuple

    @classmethod
    def empty(cls, n: int) -> "SubspaceUnion":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "SubspaceUnion":
        return cls(n, (Subspace.full(n),))

    @classmethod
    def of(cls, *members: Subspace, ambient_dim: int | None = None) -> "SubspaceUnion":
        if ambient_dim is None:
            if not members:
                raise ValueError("ambient_dim required for an empty union")
            ambient_dim = members[0].ambient_dim
        return union_normalize(list(members), ambient_dim)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def is_empty(self) -> bool:
        return not self.members

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "members": [m.to_json() for m in self.members]}

    @classmethod
    def from_json(cls, obj: dict) -> "SubspaceUnion":
        n = obj["ambient_dim"]
        return union_normalize([Subspace.from_json(m, n) for m in obj["members"]], n)

    def __and__(self, other: "SubspaceUnion") -> "SubspaceUnion":
        return union_intersect(self, other)

    def __or__(self, other: "SubspaceUnion") -> "SubspaceUnion":
        return union_union(self, other)

    def __contains__(self, v) -> bool:
        return union_member(self, v)

    def __repr__(self) -> str:
        dims = ",".join(str(m.dim) for m in self.members)
        return f"SubspaceUnion(ambient={self.ambient_dim}, dims=[{dims}])"


def union_normalize(members: Iterable[Subspace], ambient_dim: int | None = None) -> SubspaceUnion:
    """Drop members contained in others, then sort canonically."""
    uniq = {}
    for m in members:
        if ambient_dim is None:
            ambient_dim = m.ambient_dim
        _check_dims(ambient_dim, m.ambient_dim)
        uniq.setdefault(m.constraints, m)
    if ambient_dim is None:
        raise ValueError("ambient_dim required for an empty union")
    kept: list = []
    for m in sorted(uniq.values(), key=Subspace.sort_key):
        if not any(k.dim > m.dim and subspace_contains(k, m) for k in kept):
            kept.append(m)
    return SubspaceUnion(ambient_dim, tuple(kept))


def union_intersect(u: SubspaceUnion, v: SubspaceUnion) -> SubspaceUnion:
    _check_dims(u.ambient_dim, v.ambient_dim)
    if u.is_empty or v.is_empty:
        return SubspaceUnion.empty(u.ambient_dim)
    if len(u.members) == 1 and not u.members[0].constraints:
        return v
    if len(v.members) == 1 and not v.members[0].constraints:
        return u
    return union_normalize((subspace_intersect(a, b) for a in u.members for b in v.members),
                           u.ambient_dim)


def union_union(u: SubspaceUnion, v: SubspaceUnion) -> SubspaceUnion:
    _check_dims(u.ambient_dim, v.ambient_dim)
    return union_normalize(u.members + v.members, u.ambient_dim)


def union_contains_subspace(u: SubspaceUnion, s: Subspace) -> bool:
    # A subspace covered by finitely many subspaces lies inside one of them.
    _check_dims(u.ambient_dim, s.ambient_dim)
    return any(subspace_contains(m, s) for m in u.members)


def union_subset(u: SubspaceUnion, v: SubspaceUnion) -> bool:
    _check_dims(u.ambient_dim, v.ambient_dim)
    return all(union_contains_subspace(v, m) for m in u.members)


def union_eq(u: SubspaceUnion, v: SubspaceUnion) -> bool:
    return union_subset(u, v) and union_subset(v, u)


def union_member(u: SubspaceUnion, v: Sequence) -> bool:
    if len(v) != u.ambient_dim:
        raise DimensionError(f"vector of length {len(v)} in ambient {u.ambient_dim}")
    return any(m.contains_vector(v) for m in u.members)


def subspace_permute(s: Subspace, perm: Sequence[int]) -> Subspace:
    """Image of s under the coordinate permutation x -> y with y[perm[i]] = x[i]."""
    n = s.ambient_dim
    if len(perm) != n:
        raise DimensionError("permutation length differs from the ambient dimension")
    rows = []
    for r in s.constraints:
        new = [ZERO] * n
        for i, v in enumerate(r):
            new[perm[i]] = v
        rows.append(new)
    return Subspace.from_constraints(rows, n)


def union_permute(u: SubspaceUnion, perm: Sequence[int]) -> SubspaceUnion:
    return union_normalize((subspace_permute(m, perm) for m in u.members), u.ambient_dim)


def solve(m: RatMatrix, rhs: Sequence):
    """A particular solution of m x = rhs, or None when inconsistent."""
    if len(rhs) != m.nrows:
        raise DimensionError("right-hand side length differs from the row count")
    aug = [tuple(r) + (as_rational(b),) for r, b in zip(m.data, rhs)]
    piv = _rref_sparse(aug)
    if m.ncols in piv:
        return None
    x = [ZERO] * m.ncols
    for p, row in piv.items():
        x[p] = row.get(m.ncols, ZERO)
    return tuple(x)
