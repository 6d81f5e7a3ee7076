"""Text grammar for groups, subgroups and representations, and JSON architecture configs.

Expressions are parsed with :mod:`ast` (never evaluated)::

    group     := cyclic(n) | symmetric(n) | dihedral(n) | product(group, group)
               | generated([perm, ...])
    subgroup  := trivial | full | alternating | generated_subgroup([perm, ...])
    rep       := regular | natural | trivial | cosets(subgroup) | power(n, k)
               | sum(rep, rep, ...) | mult(rep, f)

Permutations use one-line image notation, e.g. ``[1, 2, 0]``.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from pathlib import Path

from .equivariant import (
    Architecture,
    ArchitectureError,
    BiasSpec,
    LayerSpace,
    PermRep,
    circulant,
    commutant_basis,
    coset_rep,
    double_coset_basis,
    mult_rep,
    natural_rep,
    power_rep,
    regular_rep,
    sum_rep,
    trivial_rep,
)
from .exactlin import RatMatrix
from .groups import Group, GroupError, Subgroup, cyclic, dihedral, direct_product, generate_group, symmetric
from .separation import Limits

ACTIVATIONS = ("relu", "tanh", "sigmoid", "identity")


class ConfigError(ValueError):
    """Malformed config; the message names the offending field."""


def _parse(text: str, where: str) -> ast.expr:
    try:
        return ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ConfigError(f"{where}: cannot parse {text!r}: {exc.msg}") from None


def _literal(node: ast.expr, where: str):
    try:
        return ast.literal_eval(node)
    except ValueError:
        raise ConfigError(f"{where}: expected a literal, got {ast.unparse(node)!r}") from None


def _int(node: ast.expr, where: str) -> int:
    v = _literal(node, where)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    return v


def _call(node: ast.expr) -> tuple:
    if isinstance(node, ast.Name):
        return node.id, []
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        return node.func.id, node.args
    return None, None


def _perm_list(node: ast.expr, where: str) -> list:
    v = _literal(node, where)
    if not isinstance(v, list) or not all(isinstance(p, list) for p in v):
        raise ConfigError(f"{where}: expected a list of permutations like [[1,0,2]]")
    return v


def parse_group(text: str, where: str = "group") -> Group:
    return _group(_parse(text, where), where)


def _group(node: ast.expr, where: str) -> Group:
    name, args = _call(node)
    try:
        if name in ("cyclic", "symmetric", "dihedral") and len(args) == 1:
            n = _int(args[0], where)
            return {"cyclic": cyclic, "symmetric": symmetric, "dihedral": dihedral}[name](n)
        if name == "product" and len(args) == 2:
            return direct_product(_group(args[0], where), _group(args[1], where))
        if name == "generated" and len(args) == 1:
            return generate_group(_perm_list(args[0], where), name="generated")
    except GroupError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown group expression {ast.unparse(node)!r}")


def parse_subgroup(text: str, g: Group, where: str = "subgroup") -> Subgroup:
    return _subgroup(_parse(text, where), g, where)


def _subgroup(node: ast.expr, g: Group, where: str) -> Subgroup:
    name, args = _call(node)
    try:
        if name == "trivial" and not args:
            return g.trivial_subgroup()
        if name == "full" and not args:
            return g.full_subgroup()
        if name == "alternating" and not args:
            return g.alternating_subgroup()
        if name == "generated_subgroup" and len(args) == 1:
            return g.generated_subgroup(_perm_list(args[0], where))
    except GroupError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown subgroup expression {ast.unparse(node)!r}")


@dataclass(frozen=True)
class ParsedRep:
    rep: PermRep
    subgroup: Subgroup | None  # set when the rep is R^{G/H}


def parse_rep(text: str, g: Group, where: str = "rep") -> ParsedRep:
    return _rep(_parse(text, where), g, where)


def _rep(node: ast.expr, g: Group, where: str) -> ParsedRep:
    name, args = _call(node)
    try:
        if name == "regular" and not args:
            return ParsedRep(regular_rep(g), g.trivial_subgroup())
        if name == "trivial" and not args:
            return ParsedRep(trivial_rep(g), g.full_subgroup())
        if name == "natural" and not args:
            return ParsedRep(natural_rep(g), None)
        if name == "cosets" and len(args) == 1:
            h = _subgroup(args[0], g, where)
            return ParsedRep(coset_rep(g, h), h)
        if name == "power" and len(args) == 2:
            n, k = _int(args[0], where), _int(args[1], where)
            if n != g.degree:
                raise ConfigError(f"{where}: power({n}, {k}) needs a group acting on {n} points, "
                                  f"this one acts on {g.degree}")
            return ParsedRep(power_rep(g, k), None)
        if name == "sum" and len(args) >= 2:
            return ParsedRep(sum_rep(*(_rep(a, g, where).rep for a in args)), None)
        if name == "mult" and len(args) == 2:
            return ParsedRep(mult_rep(_rep(args[0], g, where).rep, _int(args[1], where)), None)
    except (GroupError, ArchitectureError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown representation expression {ast.unparse(node)!r}")


# ---------------------------------------------------------------------------
# Architecture configs


@dataclass(frozen=True)
class LoadedConfig:
    architecture: Architecture
    group: Group
    limits: Limits
    raw: dict


def _generators(spec, src: ParsedRep, tgt: ParsedRep, where: str) -> tuple:
    if isinstance(spec, dict) and "matrices" in spec:
        try:
            mats = tuple(RatMatrix.from_rows(m, src.rep.dim) for m in spec["matrices"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.matrices: {exc}") from None
        return mats, "explicit"
    if not isinstance(spec, str):
        raise ConfigError(f"{where}: expected 'full', 'circular(k)', 'double_coset' or {{'matrices': ...}}")
    name, args = _call(_parse(spec, where))
    if name == "full" and not args:
        return commutant_basis(src.rep, tgt.rep).generators, "full"
    if name == "circular" and len(args) == 1:
        k = _int(args[0], where)
        n = src.rep.dim
        if src.rep != tgt.rep or not 1 <= k <= n:
            raise ConfigError(f"{where}: circular({k}) needs equal source/target and 1 <= k <= {n}")
        return tuple(circulant(n, i) for i in range(1, k + 1)), f"circular({k})"
    if name == "double_coset" and not args:
        if src.subgroup is None or tgt.subgroup is None:
            raise ConfigError(f"{where}: double_coset needs coset representations on both sides")
        return double_coset_basis(src.subgroup, tgt.subgroup).generators, "double_coset"
    raise ConfigError(f"{where}: unknown generator spec {spec!r}")


def _bias(spec, tgt: PermRep, where: str) -> BiasSpec:
    if spec in (None, "orbit"):
        return BiasSpec.complete(tgt.orbits)
    if spec == "null":
        return BiasSpec.null()
    if isinstance(spec, list) and all(isinstance(p, list) for p in spec):
        return BiasSpec.complete(spec)
    raise ConfigError(f"{where}: expected 'orbit', 'null' or a list of parts")


def build_architecture(obj: dict) -> LoadedConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config: expected a JSON object")
    for key in ("group", "layers"):
        if key not in obj:
            raise ConfigError(f"config: missing field '{key}'")
    g = parse_group(str(obj["group"]), "group")
    layers_cfg = obj["layers"]
    if not isinstance(layers_cfg, list) or not layers_cfg:
        raise ConfigError("layers: expected a non-empty list")
    prev = parse_rep(obj["input"], g, "input") if "input" in obj else None
    layers = []
    for i, lc in enumerate(layers_cfg):
        where = f"layers[{i}]"
        if not isinstance(lc, dict):
            raise ConfigError(f"{where}: expected an object")
        if "source" in lc:
            src = parse_rep(lc["source"], g, f"{where}.source")
        elif prev is not None:
            src = prev
        else:
            raise ConfigError(f"{where}.source: required for the first layer when 'input' is absent")
        if "target" not in lc:
            raise ConfigError(f"{where}.target: missing")
        tgt = parse_rep(lc["target"], g, f"{where}.target")
        gens, label = _generators(lc.get("generators", "full"), src, tgt, f"{where}.generators")
        bias = _bias(lc.get("bias", "orbit"), tgt.rep, f"{where}.bias")
        try:
            layers.append(LayerSpace(src.rep, tgt.rep, gens, bias, label=label))
        except ArchitectureError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        prev = tgt
    activation = obj.get("activation", "relu")
    if activation not in ACTIVATIONS:
        raise ConfigError(f"activation: expected one of {ACTIVATIONS}, got {activation!r}")
    lim = obj.get("limits", {}) or {}
    try:
        limits = Limits(int(lim.get("max_union_members", Limits.max_union_members)),
                        int(lim.get("max_block_size", Limits.max_block_size)))
    except (TypeError, ValueError):
        raise ConfigError("limits: expected integer values") from None
    try:
        arch = Architecture(tuple(layers), activation)
    except ArchitectureError as exc:
        raise ConfigError(f"layers: {exc}") from None
    return LoadedConfig(arch, g, limits, obj)


def load_config(path) -> LoadedConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    return build_architecture(obj)
