"""Command-line interface: ``sepower <command> ...``.

Exit codes: 0 success, 1 a checked property failed, 2 input error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ConfigError, LoadedConfig, load_config, parse_group, parse_rep
from .empirical import OracleUnreliable, adjacency, graph_vector, mc_separation, read_edge_list, wl_colors
from .equivariant import ArchitectureError, ResourceError, commutant_basis
from .exactlin import as_rational, rational_str
from .groups import GroupError
from .separation import (
    Comparison,
    Limits,
    compare,
    depth_stabilization_threshold,
    identifies,
    rho,
)
from .suites import SUITES, run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("sepower")


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise _ArgError(message)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _vector(text: str, name: str) -> tuple:
    try:
        return tuple(as_rational(t.strip()) for t in text.split(","))
    except (ValueError, TypeError, ZeroDivisionError):
        raise ConfigError(f"--{name}: expected comma-separated rationals, got {text!r}") from None


def _limits(args, cfg: LoadedConfig | None = None) -> Limits:
    base = cfg.limits if cfg is not None else Limits()
    return Limits(args.max_union_members if args.max_union_members is not None else base.max_union_members,
                  args.max_block_size if args.max_block_size is not None else base.max_block_size)


def _limits_json(lim: Limits) -> dict:
    return {"max_union_members": lim.max_union_members, "max_block_size": lim.max_block_size}


def _strip_timing(stats: dict) -> dict:
    return {k: v for k, v in stats.items() if k != "wall_seconds"}


# ---------------------------------------------------------------------------
# Commands. Each returns (exit code, inputs, result, stats).


def cmd_rho(args):
    cfg = load_config(args.config)
    lim = _limits(args, cfg)
    r = rho(cfg.architecture, lim)
    inputs = {"architecture": cfg.architecture.digest(), "limits": _limits_json(lim)}
    out = r.to_json()
    stats = out.pop("stats")
    return EXIT_OK, inputs, out, stats


def cmd_identify(args):
    cfg = load_config(args.config)
    lim = _limits(args, cfg)
    a, b = _vector(args.alpha, "alpha"), _vector(args.beta, "beta")
    r = rho(cfg.architecture, lim)
    try:
        ident = identifies(r, a, b)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    inputs = {"architecture": cfg.architecture.digest(), "alpha": [rational_str(x) for x in a],
              "beta": [rational_str(x) for x in b], "limits": _limits_json(lim)}
    result = {"identified": ident}
    code = EXIT_OK
    if args.expect is not None:
        result["expected"] = args.expect
        code = EXIT_OK if ident == (args.expect == "identified") else EXIT_FAILED
    return code, inputs, result, _strip_timing(r.stats)


_EXPECT = {
    "equal": {Comparison.EQUAL},
    "subset": {Comparison.EQUAL, Comparison.STRICT_SUBSET},
    "superset": {Comparison.EQUAL, Comparison.STRICT_SUPERSET},
    "strict-subset": {Comparison.STRICT_SUBSET},
    "strict-superset": {Comparison.STRICT_SUPERSET},
    "incomparable": {Comparison.INCOMPARABLE},
}


def cmd_compare(args):
    ca, cb = load_config(args.config_a), load_config(args.config_b)
    if ca.architecture.input_rep.dim != cb.architecture.input_rep.dim:
        raise ConfigError("compare: architectures have different input dimensions")
    la, lb = _limits(args, ca), _limits(args, cb)
    ra, rb = rho(ca.architecture, la), rho(cb.architecture, lb)
    verdict = compare(ra, rb)
    inputs = {"a": ca.architecture.digest(), "b": cb.architecture.digest(),
              "limits": [_limits_json(la), _limits_json(lb)]}
    result = {"verdict": verdict.value, "members": [len(ra.relation), len(rb.relation)]}
    code = EXIT_OK
    if args.expect is not None:
        result["expected"] = args.expect
        code = EXIT_OK if verdict in _EXPECT[args.expect] else EXIT_FAILED
    return code, inputs, result, {"a": _strip_timing(ra.stats), "b": _strip_timing(rb.stats)}


def cmd_stabilize(args):
    cfg = load_config(args.config)
    lim = _limits(args, cfg)
    n_layers = cfg.architecture.depth
    if not 0 <= args.layer < n_layers:
        raise ConfigError(f"--layer: expected 0..{n_layers - 1}, got {args.layer}")
    try:
        st = depth_stabilization_threshold(cfg.architecture, args.layer, args.max, lim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    inputs = {"architecture": cfg.architecture.digest(), "layer": args.layer, "max": args.max,
              "limits": _limits_json(lim)}
    result = {"threshold": st.threshold, "status": st.status, "monotone": st.monotone,
              "members": [len(r.relation) for r in st.relations]}
    stats = [_strip_timing(r.stats) for r in st.relations]
    return (EXIT_OK if st.monotone else EXIT_FAILED), inputs, result, {"repetitions": stats}


def _graph_inputs(args) -> tuple:
    graphs = []
    for path in (args.graph_a, args.graph_b):
        try:
            n, edges = read_edge_list(path)
            graphs.append(adjacency(n, edges))
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if len(graphs[0]) != len(graphs[1]):
        raise ConfigError("graphs have different node counts")
    return graphs


def cmd_empirical(args):
    cfg = load_config(args.config)
    extra = {}
    if args.graph_a or args.graph_b:
        if not (args.graph_a and args.graph_b) or args.alpha or args.beta:
            raise ConfigError("give either --alpha/--beta or both --graph-a/--graph-b")
        ga, gb = _graph_inputs(args)
        a, b = tuple(graph_vector(ga)), tuple(graph_vector(gb))
        extra["wl2_separates"] = wl_colors(ga, 2) != wl_colors(gb, 2)
    else:
        if not (args.alpha and args.beta):
            raise ConfigError("--alpha and --beta are required")
        a, b = _vector(args.alpha, "alpha"), _vector(args.beta, "beta")
    if len(a) != cfg.architecture.input_rep.dim or len(b) != len(a):
        raise ConfigError(f"inputs must have length {cfg.architecture.input_rep.dim}")
    try:
        scales = tuple(float(s) for s in args.scales.split(","))
    except ValueError:
        raise ConfigError(f"--scales: expected comma-separated floats, got {args.scales!r}") from None
    activation = args.activation or cfg.architecture.activation_tag
    try:
        v = mc_separation(cfg.architecture, activation, a, b, samples=args.samples, tol_sep=args.tol_sep,
                          tol_id=args.tol_id, seed=args.seed, scales=scales)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    inputs = {"architecture": cfg.architecture.digest(), "alpha": [rational_str(x) for x in a],
              "beta": [rational_str(x) for x in b], "activation": activation, "samples": args.samples,
              "tol_sep": args.tol_sep, "tol_id": args.tol_id, "seed": args.seed, "scales": list(scales)}
    result = v.to_json() | extra
    stats = {"evaluated": v.evaluated, "discarded": v.discarded}
    return EXIT_OK, inputs, result, stats


def cmd_basis(args):
    g = parse_group(args.group)
    src = parse_rep(args.source, g, "source").rep
    tgt = parse_rep(args.target or args.source, g, "target").rep
    basis = commutant_basis(src, tgt)
    inputs = {"group": args.group, "source": args.source, "target": args.target or args.source}
    result = {"generators": len(basis), "source_dim": src.dim, "target_dim": tgt.dim}
    if args.matrices:
        result["matrices"] = [m.to_json() for m in basis.generators]
    code = EXIT_OK
    if args.expect is not None:
        result["expected"] = args.expect
        code = EXIT_OK if len(basis) == args.expect else EXIT_FAILED
    return code, inputs, result, {}


def cmd_verify(args):
    if args.suite != "all" and args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; expected one of {sorted(SUITES) + ['all']}")
    lim = _limits(args)
    results = run_suite(args.suite, lim)
    ok = all(r.passed for r in results)
    first = next((r.first_failure for r in results if not r.passed), None)
    result = {"passed": ok, "suites": [r.to_json() for r in results],
              "counterexample": first.to_json() if first else None}
    inputs = {"suite": args.suite, "limits": _limits_json(lim)}
    stats = {"checks": sum(len(r.checks) for r in results),
             "failed": sum(not c.passed for r in results for c in r.checks)}
    return (EXIT_OK if ok else EXIT_FAILED), inputs, result, stats


COMMANDS = {
    "rho": cmd_rho,
    "identify": cmd_identify,
    "compare": cmd_compare,
    "stabilize": cmd_stabilize,
    "empirical": cmd_empirical,
    "basis": cmd_basis,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# Argument parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    g = common.add_argument_group("global options")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                   help="worker cap (computation is single-threaded; accepted for compatibility)")
    g.add_argument("--max-union-members", type=int, default=argparse.SUPPRESS)
    g.add_argument("--max-block-size", type=int, default=argparse.SUPPRESS)
    g.add_argument("--output", "-o", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    g.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    g.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="sepower", parents=[common],
                description="Exact identification relations of equivariant networks.")
    p.add_argument("--version", action="version", version=f"sepower {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("rho", parents=[common], help="compute the identification relation")
    s.add_argument("config")

    s = sub.add_parser("identify", parents=[common], help="is (alpha, beta) identified?")
    s.add_argument("config")
    s.add_argument("--alpha", required=True)
    s.add_argument("--beta", required=True)
    s.add_argument("--expect", choices=("identified", "separated"))

    s = sub.add_parser("compare", parents=[common], help="compare two relations")
    s.add_argument("config_a")
    s.add_argument("config_b")
    s.add_argument("--expect", choices=sorted(_EXPECT))

    s = sub.add_parser("stabilize", parents=[common], help="depth stabilisation threshold")
    s.add_argument("config")
    s.add_argument("--layer", type=int, required=True, help="0-based index of the layer to repeat")
    s.add_argument("--max", type=int, default=3)

    s = sub.add_parser("empirical", parents=[common], help="Monte Carlo separation oracle")
    s.add_argument("config")
    s.add_argument("--alpha")
    s.add_argument("--beta")
    s.add_argument("--graph-a")
    s.add_argument("--graph-b")
    s.add_argument("--activation", choices=("relu", "tanh", "sigmoid"))
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--tol-sep", type=float, default=1e-4)
    s.add_argument("--tol-id", type=float, default=1e-7)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scales", default="0.1,1,10")

    s = sub.add_parser("basis", parents=[common], help="count equivariant linear maps")
    s.add_argument("--group", required=True)
    s.add_argument("source")
    s.add_argument("target", nargs="?")
    s.add_argument("--matrices", action="store_true")
    s.add_argument("--expect", type=int)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", help=f"one of {', '.join(sorted(SUITES))}, all")
    return p


_DEFAULTS = {"threads": 1, "max_union_members": None, "max_block_size": None, "output": None,
             "format": "json", "verbose": False}


def _text(report: dict) -> str:
    lines = [f"sepower {report['tool_version']} {report['command']}: exit {report['exit_code']}"]

    def walk(prefix: str, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}{k}.", v)
        elif isinstance(obj, list) and obj and all(not isinstance(x, (dict, list)) for x in obj):
            lines.append(f"  {prefix[:-1]} = {', '.join(map(str, obj))}")
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}{i}.", v)
        else:
            lines.append(f"  {prefix[:-1]} = {obj}")

    walk("", {"result": report.get("result"), "stats": report.get("stats")})
    if report.get("error"):
        lines.append(f"  error = {report['error']}")
    return "\n".join(lines) + "\n"


def _emit(report: dict, args) -> None:
    if args.format == "text":
        data = _text(report)
    else:
        data = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(data)
    else:
        sys.stdout.write(data)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        parser.print_usage(sys.stderr)
        print(f"sepower: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for k, v in _DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "tool": "sepower", "tool_version": __version__,
              "command": args.command}
    try:
        code, inputs, result, stats = COMMANDS[args.command](args)
        report |= {"inputs": inputs, "inputs_digest": _digest(inputs), "result": result, "stats": stats}
    except (ConfigError, ArchitectureError, GroupError) as exc:
        print(f"sepower: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        code = EXIT_RESOURCE
        report |= {"result": None, "error": str(exc), "stats": _strip_timing(getattr(exc, "stats", {}) or {})}
        print(f"sepower: resource limit: {exc}", file=sys.stderr)
    except OracleUnreliable as exc:
        code = EXIT_RESOURCE
        report |= {"result": None, "error": str(exc), "stats": {}}
        print(f"sepower: {exc}", file=sys.stderr)
    report["exit_code"] = code
    # excluded from the deterministic part of the report
    report["timing"] = {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                        "wall_seconds": round(time.perf_counter() - t0, 6)}
    report["report_digest"] = _digest({k: v for k, v in report.items() if k != "timing"})
    try:
        _emit(report, args)
    except OSError as exc:
        print(f"sepower: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
