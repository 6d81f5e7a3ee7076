"""Floating-point sampling of equivariant networks and a Monte Carlo separation oracle.

Also hosts Weisfeiler-Leman colour refinement, used as an external yardstick for
2-IGN separation on small graphs.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .equivariant import Architecture


class ActivationKind(str, enum.Enum):
    RELU = "relu"
    TANH = "tanh"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"

    @property
    def polynomial(self) -> bool:
        return self is ActivationKind.IDENTITY

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self is ActivationKind.RELU:
            return np.maximum(x, 0.0)
        if self is ActivationKind.TANH:
            return np.tanh(x)
        if self is ActivationKind.SIGMOID:
            return 0.5 * (1.0 + np.tanh(0.5 * x))
        return x


class OracleUnreliable(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Float view of an architecture


@dataclass(frozen=True, eq=False)
class _FloatLayer:
    gens: np.ndarray  # (s, out, in)
    bias: np.ndarray  # (p, out) part indicators


def _float_layers(arch: Architecture) -> list:
    out = []
    for layer in arch.layers:
        d_out, d_in = layer.target.dim, layer.source.dim
        if layer.generators:
            gens = np.array([[[float(a) for a in r] for r in m.data] for m in layer.generators])
        else:
            gens = np.zeros((0, d_out, d_in))
        bias = np.array([[float(a) for a in v] for v in layer.bias_vectors()]).reshape(-1, d_out)
        out.append(_FloatLayer(gens, bias))
    return out


def _rng(seed: int, layer: int, index: int) -> np.random.Generator:
    # counter-based: the stream depends only on (seed, layer, index)
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, (layer << 40) | index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class FloatNetwork:
    """A concrete network: generator and bias-part coefficients per layer."""

    layers: tuple  # of (linear coeffs, bias coeffs) numpy arrays
    activation: ActivationKind
    _float: tuple

    def coefficient_counts(self) -> list:
        return [(len(x), len(y)) for x, y in self.layers]


def sample_network(arch: Architecture, activation: ActivationKind | str, seed: int,
                   index: int = 0) -> FloatNetwork:
    act = ActivationKind(activation)
    fl = _float_layers(arch)
    layers = []
    for l, f in enumerate(fl):
        z = _rng(seed, l, index).standard_normal(len(f.gens) + len(f.bias))
        layers.append((z[:len(f.gens)], z[len(f.gens):]))
    return FloatNetwork(tuple(layers), act, tuple(fl))


def evaluate(net: FloatNetwork, x: Sequence[float]) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (net._float[0].gens.shape[2],):
        raise ValueError(f"input of shape {v.shape}, expected ({net._float[0].gens.shape[2]},)")
    last = len(net._float) - 1
    for l, (f, (c, y)) in enumerate(zip(net._float, net.layers)):
        v = np.einsum("s,soi,i->o", c, f.gens, v) + y @ f.bias
        if l < last:
            v = net.activation(v)
    return v


class _BatchSampler:
    """Coefficients for sample indices [start, start+count), cached per architecture."""

    def __init__(self, arch: Architecture, seed: int):
        self.fl = _float_layers(arch)
        self.seed = seed
        self._cache: dict = {}

    def coeffs(self, start: int, count: int) -> list:
        key = (start, count)
        if key not in self._cache:
            per_layer = []
            for l, f in enumerate(self.fl):
                width = len(f.gens) + len(f.bias)
                z = np.stack([_rng(self.seed, l, i).standard_normal(width)
                              for i in range(start, start + count)]) if width else np.zeros((count, 0))
                per_layer.append((z[:, :len(f.gens)], z[:, len(f.gens):]))
            self._cache[key] = per_layer
        return self._cache[key]

    def outputs(self, coeffs: list, x: np.ndarray, act: ActivationKind, scale: float) -> np.ndarray:
        """Batched forward pass; x has shape (in,), result (count, out)."""
        v = np.broadcast_to(x, (coeffs[0][0].shape[0], x.shape[0]))
        last = len(self.fl) - 1
        for l, (f, (c, y)) in enumerate(zip(self.fl, coeffs)):
            w = np.einsum("ns,soi->noi", c * scale, f.gens)
            v = np.einsum("noi,ni->no", w, v) + (y * scale) @ f.bias
            if l < last:
                v = act(v)
        return v


@dataclass(frozen=True)
class OracleVerdict:
    kind: str  # "Separated" | "LikelyIdentified" | "Undecided"
    gap: float
    seed: int
    sample_index: int | None = None
    scale: float | None = None
    discarded: int = 0
    evaluated: int = 0

    @property
    def separated(self) -> bool:
        return self.kind == "Separated"

    @property
    def decided(self) -> bool:
        return self.kind != "Undecided"

    def to_json(self) -> dict:
        return dict(self.__dict__)


DEFAULT_SCALES = (0.1, 1.0, 10.0)


def mc_separation(arch: Architecture, activation: ActivationKind | str, alpha, beta,
                  samples: int = 1000, tol_sep: float = 1e-4, tol_id: float = 1e-7, seed: int = 0,
                  scales: Sequence[float] = DEFAULT_SCALES, resample_rounds: int = 2,
                  allow_polynomial: bool = False, sampler: _BatchSampler | None = None) -> OracleVerdict:
    """Search sampled networks for one with |eta(alpha) - eta(beta)|_inf > tol_sep.

    Gaps in (tol_id, tol_sep] draw further batches; if they persist the verdict is
    Undecided rather than LikelyIdentified.
    """
    act = ActivationKind(activation)
    if act.polynomial and not allow_polynomial:
        raise ValueError("polynomial activations give no verdict on non-polynomial separation")
    if not tol_id < tol_sep:
        raise ValueError("tol_id must be below tol_sep")
    sampler = sampler or _BatchSampler(arch, seed)
    a = np.asarray([float(x) for x in alpha])
    b = np.asarray([float(x) for x in beta])
    max_gap, discarded, evaluated, gray = 0.0, 0, 0, False
    for scale in scales:
        start = 0
        for _ in range(resample_rounds + 1):
            coeffs = sampler.coeffs(start, samples)
            with np.errstate(all="ignore"):
                gaps = np.max(np.abs(sampler.outputs(coeffs, a, act, scale)
                                     - sampler.outputs(coeffs, b, act, scale)), axis=1)
            ok = np.isfinite(gaps)
            discarded += int((~ok).sum())
            evaluated += len(gaps)
            gaps = np.where(ok, gaps, 0.0)
            hit = np.flatnonzero(gaps > tol_sep)
            if hit.size:
                i = int(hit[0])
                return OracleVerdict("Separated", float(gaps[i]), seed, start + i, scale,
                                     discarded, evaluated)
            max_gap = max(max_gap, float(gaps.max(initial=0.0)))
            if not np.any(gaps > tol_id):
                break
            gray = True
            start += samples
    if evaluated and discarded * 2 > evaluated:
        raise OracleUnreliable(f"{discarded} of {evaluated} samples overflowed")
    kind = "Undecided" if gray else "LikelyIdentified"
    return OracleVerdict(kind, max_gap, seed, None, None, discarded, evaluated)


# ---------------------------------------------------------------------------
# Weisfeiler-Leman


def _h64(obj) -> int:
    return int.from_bytes(hashlib.blake2b(repr(obj).encode(), digest_size=8).digest(), "little")


def adjacency(n: int, edges) -> list:
    adj = [[0] * n for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise ValueError("self-loops are not supported")
        adj[u][v] = adj[v][u] = 1
    return adj


def wl_colors(adj: Sequence[Sequence[int]], k: int = 1, rounds: int | None = None,
              limit: int = 12) -> tuple:
    """Stable colour multiset of 1-WL (k=1) or pair refinement (k=2) as a sorted tuple.

    The pair refinement recolours (u, v) by the multiset of (c(u, w), c(w, v)) over w,
    i.e. the folklore variant.
    """
    n = len(adj)
    if n > limit:
        raise ValueError(f"graph with {n} nodes exceeds limit {limit}")
    if k == 1:
        colors = [_h64(("deg0",))] * n
        for _ in range(rounds if rounds is not None else n):
            colors = [_h64((colors[u], tuple(sorted(colors[w] for w in range(n) if adj[u][w]))))
                      for u in range(n)]
        return tuple(sorted(colors))
    if k == 2:
        col = {(u, v): _h64(("eq" if u == v else ("edge" if adj[u][v] else "non"),))
               for u in range(n) for v in range(n)}
        for _ in range(rounds if rounds is not None else n * n):
            col = {(u, v): _h64((col[u, v], tuple(sorted((col[u, w], col[w, v]) for w in range(n)))))
                   for u in range(n) for v in range(n)}
        return tuple(sorted(col.values()))
    raise ValueError("k must be 1 or 2")


def read_edge_list(path) -> tuple:
    """Parse ``u v`` lines (``#`` comments; ``# nodes N`` fixes the node count)."""
    edges, n = [], 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if s.startswith("#"):
                parts = s[1:].split()
                if len(parts) == 2 and parts[0] == "nodes":
                    n = max(n, int(parts[1]))
                continue
            if not s:
                continue
            try:
                u, v = (int(t) for t in s.split())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {s!r}") from None
            edges.append((u, v))
            n = max(n, u + 1, v + 1)
    return n, edges


def graph_vector(adj: Sequence[Sequence[int]]) -> list:
    """Row-major adjacency, matching the index order of power(n, 2)."""
    return [x for row in adj for x in row]
