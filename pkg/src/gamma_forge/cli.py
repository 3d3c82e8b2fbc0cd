"""Command-line entry point.

Exit status: 0 success, 1 mathematical negative, 2 unknown or budget
exhausted, 3 usage or input error.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from typing import Optional

from . import io
from .conn import edge_blocks, t_cores
from .decomp import (
    check_converse,
    set_value,
    structure_decompose,
    theorem_t,
    to_dot,
    verify_structure,
)
from .errors import BudgetExceeded, GammaForgeError
from .flower import generating_flower, plain_flower, rich_flower
from .group import parse_group_name
from .immerse import DEFAULT_BUDGET, find_immersion
from .lgraph import sorted_vertices
from .pack import erdos_posa

EXIT_OK, EXIT_NEGATIVE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
BUDGET_ENV = "GAMMA_FORGE_BUDGET"


@dataclass(frozen=True)
class RunConfig:
    budget: int
    seed: int = 0
    override_t: Optional[int] = None
    output: Optional[str] = None


class UsageError(GammaForgeError):
    pass


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise UsageError(f"{BUDGET_ENV} must be positive")
    return value


def _emit(cfg: RunConfig, payload) -> None:
    text = payload if isinstance(payload, str) else io.dumps(payload)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _vertex_lookup(g, token: str):
    """Resolve a command-line vertex name against the graph's vertices."""
    for v in g.vertices:
        if v == token or str(v) == token:
            return v
    raise UsageError(f"unknown vertex {token!r}")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# --- subcommands -----------------------------------------------------------------


def cmd_make_flower(args, cfg):
    G = parse_group_name(args.group)
    if args.kind == "plain":
        g = plain_flower(args.k, args.n, G)
    elif args.kind == "rich":
        g = rich_flower(G, args.k, args.n)
    else:
        if not args.generators:
            raise UsageError("--generators is required for a generating flower")
        g = generating_flower(G, _int_list(args.generators), args.k, args.n)
    _emit(cfg, io.graph_to_json(g))
    return EXIT_OK


def cmd_find_immersion(args, cfg):
    g = io.read_graph(args.host)
    h = io.read_graph(args.pattern)
    res = find_immersion(g, h, cfg.budget)
    if res.status == "found":
        _emit(cfg, {"result": "found", "immersion": io.immersion_to_json(res.immersion)})
        return EXIT_OK
    _emit(cfg, {"result": res.status})
    return EXIT_NEGATIVE if res.status == "none" else EXIT_UNKNOWN


def cmd_pack_circuits(args, cfg):
    g = io.read_graph(args.graph)
    x = _vertex_lookup(g, args.center)
    H = io.subgroup_from_json(g.group, _int_list(args.subgroup), "--subgroup")
    res = erdos_posa(g, x, H, args.r, cfg.budget)
    _emit(cfg, io.pack_to_json(res))
    return EXIT_OK


def cmd_tcores(args, cfg):
    g = io.read_graph(args.graph)
    part = t_cores(g, args.t)
    _emit(cfg, {"t": part.t, "cores": [[io.vertex_to_json(v) for v in sorted_vertices(c)] for c in part.cores]})
    return EXIT_OK


def cmd_edge_blocks(args, cfg):
    g = io.read_graph(args.graph)
    _emit(cfg, {"blocks": [[io.vertex_to_json(v) for v in b] for b in edge_blocks(g)]})
    return EXIT_OK


def cmd_value(args, cfg):
    g = io.read_graph(args.graph)
    B = [_vertex_lookup(g, tok.strip()) for tok in args.bag.split(",") if tok.strip()]
    value, cert = set_value(g, B)
    _emit(cfg, {
        "bag": [io.vertex_to_json(v) for v in sorted_vertices(B)],
        "value": value,
        "edges": sorted(cert.edges),
        "shift": io._pairs(cert.shift),
        "subgroup": io.subgroup_to_json(cert.subgroup),
    })
    return EXIT_OK


def cmd_decompose(args, cfg):
    g = io.read_graph(args.graph)
    res = structure_decompose(g, args.k, args.n, cfg.override_t, args.bound, cfg.budget)
    _emit(cfg, io.structure_to_json(res))
    return EXIT_OK if res.kind == "decomposition" else EXIT_NEGATIVE


def _load_decomposition(path):
    x = io.read_json(path)
    d = io.decomposition_from_json(x, path)
    shift = io.shift_from_json(x.get("gamma_shift", []), path, "/gamma_shift")
    return x, d, shift


def _parameter(args, x, name, path):
    value = getattr(args, name)
    if value is None:
        value = x.get(name)
    if not isinstance(value, int) or isinstance(value, bool):
        raise UsageError(f"--{name} is required (not present in {path})")
    return value


def _override_flag(x, t, g, k, n) -> bool:
    stored = x.get("override_t")
    if isinstance(stored, bool) and t == x.get("t"):
        return stored
    return t != theorem_t(g.group, k, n)


def cmd_verify(args, cfg):
    g = io.read_graph(args.graph)
    x, d, shift = _load_decomposition(args.decomp)
    t = _parameter(args, x, "t", args.decomp)
    bound = _parameter(args, x, "bound", args.decomp)
    report = verify_structure(g, shift, d, t, bound)
    out = io.report_to_json(report)
    out["override_t"] = _override_flag(x, t, g, args.k, args.n)
    _emit(cfg, out)
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_check_converse(args, cfg):
    g = io.read_graph(args.graph)
    x, d, shift = _load_decomposition(args.decomp)
    t = _parameter(args, x, "t", args.decomp)
    result = check_converse(g, shift, d, t, args.n, cfg.budget)
    out = {"t": t, "n": args.n, "forbids": result, "override_t": _override_flag(x, t, g, 1, args.n)}
    if result is False:
        out["contradiction"] = "found a rich flower despite a verified decomposition"
    _emit(cfg, out)
    return {True: EXIT_OK, False: EXIT_NEGATIVE, None: EXIT_UNKNOWN}[result]


def cmd_export_dot(args, cfg):
    x, d, shift = _load_decomposition(args.decomp)
    report = None
    if args.graph:
        g = io.read_graph(args.graph)
        report = verify_structure(g, shift, d, _parameter(args, x, "t", args.decomp),
                                  _parameter(args, x, "bound", args.decomp))
    _emit(cfg, to_dot(d, report))
    return EXIT_OK


def cmd_selftest(args, cfg):
    from .selftest import run_selftest

    failures = run_selftest(random.Random(cfg.seed), log=sys.stderr)
    _emit(cfg, {"failures": failures, "ok": not failures, "seed": cfg.seed})
    return EXIT_OK if not failures else EXIT_NEGATIVE


# --- argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None,
                        help=f"node-expansion cap per search (default: ${BUDGET_ENV} or {DEFAULT_BUDGET})")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized fixtures")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")

    p = _Parser(prog="gamma-forge", description="Group-labeled graph immersions, packings and decompositions.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    s = sub.add_parser("make-flower", parents=[common], help="emit a flower graph")
    s.add_argument("--kind", choices=["plain", "rich", "generating"], required=True)
    s.add_argument("--group", required=True, help="z<m>, s<m> or trivial")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--generators", help="comma-separated elements (generating flowers)")
    s.set_defaults(func=cmd_make_flower)

    s = sub.add_parser("find-immersion", parents=[common], help="search for an immersion of a pattern")
    s.add_argument("--host", required=True)
    s.add_argument("--pattern", required=True)
    s.set_defaults(func=cmd_find_immersion)

    s = sub.add_parser("pack-circuits", parents=[common], help="packing or cover of circuits at a vertex")
    s.add_argument("--graph", required=True)
    s.add_argument("--center", required=True)
    s.add_argument("--subgroup", required=True, help="comma-separated elements of the proper subgroup")
    s.add_argument("--r", type=int, required=True)
    s.set_defaults(func=cmd_pack_circuits)

    s = sub.add_parser("tcores", parents=[common], help="t-core partition")
    s.add_argument("--graph", required=True)
    s.add_argument("--t", type=int, required=True)
    s.set_defaults(func=cmd_tcores)

    s = sub.add_parser("edge-blocks", parents=[common], help="maximal bridgeless connected pieces")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_edge_blocks)

    s = sub.add_parser("value", parents=[common], help="least certificate value of a vertex set")
    s.add_argument("--graph", required=True)
    s.add_argument("--bag", required=True, help="comma-separated vertex names")
    s.set_defaults(func=cmd_value)

    s = sub.add_parser("decompose", parents=[common], help="shift and tree-cut decomposition")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--override-t", type=int, dest="override_t")
    s.add_argument("--bound", type=int, help="high-degree torso vertices allowed (default n|group|)")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify", parents=[common], help="check every bag of a decomposition")
    s.add_argument("--graph", required=True)
    s.add_argument("--decomp", required=True)
    s.add_argument("--t", type=int, help="defaults to the value stored in the decomposition")
    s.add_argument("--bound", type=int, help="defaults to the value stored in the decomposition")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("check-converse", parents=[common], help="check that a decomposed graph forbids the rich flower")
    s.add_argument("--graph", required=True)
    s.add_argument("--decomp", required=True)
    s.add_argument("--t", type=int)
    s.add_argument("--n", type=int, default=1)
    s.set_defaults(func=cmd_check_converse)

    s = sub.add_parser("export-dot", parents=[common], help="Graphviz view of a decomposition tree")
    s.add_argument("--decomp", required=True)
    s.add_argument("--graph", help="annotate bags with their outcome")
    s.add_argument("--t", type=int)
    s.add_argument("--bound", type=int)
    s.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    s.set_defaults(func=cmd_selftest)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        budget = args.budget if args.budget is not None else default_budget()
        if budget <= 0:
            raise UsageError("--budget must be positive")
        cfg = RunConfig(budget, args.seed, getattr(args, "override_t", None), args.output)
        return args.func(args, cfg)
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"gamma-forge: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except GammaForgeError as exc:
        print(f"gamma-forge: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
