"""Deterministic JSON for groups, graphs, immersions, packings and decompositions.

Vertices may be strings, integers or (nested) tuples of those; tuples are
written as JSON arrays.  Every mapping is written as a list of pairs sorted by
key, so identical values always produce identical text.
"""
from __future__ import annotations

import json
from typing import Any

from .decomp import StructureResult, TreeCutDecomposition
from .errors import GammaForgeError, ParseError
from .group import FiniteGroup, Subgroup, group_from_table, make_cyclic, make_symmetric, subgroup_from_elements
from .immerse import Immersion
from .lgraph import Dart, LabeledGraph, Trail, sorted_vertices, vkey
from .pack import PackOrCover, SimpleFlower


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, location: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{location}:{exc.lineno}:{exc.colno}") from None


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read(), path)
    except OSError as exc:
        raise ParseError(exc.strerror or str(exc), path) from None


class _Reader:
    """Typed field access that reports the JSON path of a bad value."""

    def __init__(self, where: str):
        self.where = where

    def fail(self, message: str, path: str = ""):
        raise ParseError(message, self.where + path)

    def field(self, obj, key, path, kind=None):
        if not isinstance(obj, dict):
            self.fail("expected an object", path)
        if key not in obj:
            self.fail(f"missing field {key!r}", path)
        value = obj[key]
        if kind is not None and not _is(value, kind):
            self.fail(f"expected {kind.__name__}", f"{path}/{key}")
        return value

    def expect(self, value, kind, path):
        if not _is(value, kind):
            self.fail(f"expected {kind.__name__}", path)
        return value


def _is(value, kind) -> bool:
    if kind is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, kind)


# --- vertices and trails -------------------------------------------------------


def vertex_to_json(v):
    if isinstance(v, tuple):
        return [vertex_to_json(x) for x in v]
    if isinstance(v, (str, int)) and not isinstance(v, bool):
        return v
    raise GammaForgeError(f"vertex {v!r} has no JSON form")


def vertex_from_json(x, rd: _Reader, path: str):
    if isinstance(x, list):
        return tuple(vertex_from_json(y, rd, f"{path}/{i}") for i, y in enumerate(x))
    if isinstance(x, str) or _is(x, int):
        return x
    rd.fail("a vertex must be a string, an integer or an array", path)


def _pairs(mapping, key_fn=vertex_to_json, value_fn=lambda v: v) -> list:
    return [[key_fn(k), value_fn(mapping[k])] for k in sorted(mapping, key=vkey)]


def trail_to_json(t: Trail) -> list:
    return [[d.edge, d.forward] for d in t.steps]


def trail_from_json(x, rd: _Reader, path: str) -> Trail:
    rd.expect(x, list, path)
    steps = []
    for i, s in enumerate(x):
        if not (isinstance(s, list) and len(s) == 2 and _is(s[0], int) and isinstance(s[1], bool)):
            rd.fail("a step is [edge id, forward flag]", f"{path}/{i}")
        steps.append(Dart(s[0], s[1]))
    try:
        return Trail(tuple(steps))
    except GammaForgeError as exc:
        rd.fail(str(exc), path)


# --- groups and graphs -----------------------------------------------------------


def group_to_json(G: FiniteGroup) -> dict:
    out = {"order": G.order, "table": [list(row) for row in G.table]}
    if G.name:
        out["name"] = G.name
    return out


def group_from_json(x, where: str = "<group>", path: str = "") -> FiniteGroup:
    rd = _Reader(where)
    rd.expect(x, dict, path)
    try:
        if "cyclic" in x:
            return make_cyclic(rd.field(x, "cyclic", path, int))
        if "symmetric" in x:
            return make_symmetric(rd.field(x, "symmetric", path, int))
        table = rd.field(x, "table", path, list)
        for i, row in enumerate(table):
            rd.expect(row, list, f"{path}/table/{i}")
            for j, a in enumerate(row):
                rd.expect(a, int, f"{path}/table/{i}/{j}")
        if "order" in x and rd.field(x, "order", path, int) != len(table):
            rd.fail("order does not match the table size", f"{path}/order")
        name = x.get("name")
        if name is not None:
            rd.expect(name, str, f"{path}/name")
        return group_from_table(table, name)
    except ParseError:
        raise
    except GammaForgeError as exc:
        raise ParseError(str(exc), where + path) from None


def subgroup_to_json(H: Subgroup) -> list:
    return sorted(H.elements)


def subgroup_from_json(G: FiniteGroup, x, where: str = "<subgroup>", path: str = "") -> Subgroup:
    rd = _Reader(where)
    rd.expect(x, list, path)
    for i, a in enumerate(x):
        rd.expect(a, int, f"{path}/{i}")
    try:
        return subgroup_from_elements(G, x)
    except GammaForgeError as exc:
        raise ParseError(str(exc), where + path) from None


def graph_to_json(g: LabeledGraph) -> dict:
    return {
        "group": group_to_json(g.group),
        "vertices": [vertex_to_json(v) for v in g.vertices],
        "edges": [
            {"id": e, "tail": vertex_to_json(u), "head": vertex_to_json(v), "label": lab}
            for e, (u, v, lab) in sorted(g.edges.items())
        ],
    }


def graph_from_json(x, where: str = "<graph>", path: str = "") -> LabeledGraph:
    rd = _Reader(where)
    G = group_from_json(rd.field(x, "group", path), where, f"{path}/group")
    verts = rd.field(x, "vertices", path, list)
    vertices = [vertex_from_json(v, rd, f"{path}/vertices/{i}") for i, v in enumerate(verts)]
    edges = {}
    for i, e in enumerate(rd.field(x, "edges", path, list)):
        p = f"{path}/edges/{i}"
        eid = rd.field(e, "id", p, int)
        if eid in edges:
            rd.fail(f"duplicate edge id {eid}", f"{p}/id")
        tail = vertex_from_json(rd.field(e, "tail", p), rd, f"{p}/tail")
        head = vertex_from_json(rd.field(e, "head", p), rd, f"{p}/head")
        edges[eid] = (tail, head, rd.field(e, "label", p, int))
    try:
        return LabeledGraph(G, tuple(vertices), edges)
    except GammaForgeError as exc:
        raise ParseError(str(exc), where + path) from None


def read_graph(path: str) -> LabeledGraph:
    return graph_from_json(read_json(path), path)


# --- immersions and packings -------------------------------------------------------


def immersion_to_json(im: Immersion) -> dict:
    return {
        "vertex_map": _pairs(im.vertex_map, value_fn=vertex_to_json),
        "trail_map": [{"edge": e, "trail": trail_to_json(im.trail_map[e])} for e in sorted(im.trail_map)],
        "shift": _pairs(im.shift),
    }


def _pair_list(x, rd: _Reader, path: str, value_fn) -> dict:
    rd.expect(x, list, path)
    out = {}
    for i, item in enumerate(x):
        if not (isinstance(item, list) and len(item) == 2):
            rd.fail("expected a [key, value] pair", f"{path}/{i}")
        out[vertex_from_json(item[0], rd, f"{path}/{i}/0")] = value_fn(item[1], f"{path}/{i}/1")
    return out


def immersion_from_json(x, where: str = "<immersion>", path: str = "") -> Immersion:
    rd = _Reader(where)
    vmap = _pair_list(rd.field(x, "vertex_map", path), rd, f"{path}/vertex_map",
                      lambda v, p: vertex_from_json(v, rd, p))
    trails = {}
    for i, item in enumerate(rd.field(x, "trail_map", path, list)):
        p = f"{path}/trail_map/{i}"
        trails[rd.field(item, "edge", p, int)] = trail_from_json(rd.field(item, "trail", p), rd, f"{p}/trail")
    shift = _pair_list(x.get("shift", []), rd, f"{path}/shift", lambda v, p: rd.expect(v, int, p))
    return Immersion(vmap, trails, shift)


def _plain(value):
    """Certificate transcripts: sets become sorted lists, tuples become lists."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def pack_to_json(res: PackOrCover) -> dict:
    out = {"r": res.r, "kind": res.kind, "certificate": _plain(res.certificate)}
    if res.packing is not None:
        sf = res.packing
        out["center"] = vertex_to_json(sf.center)
        out["subgroup"] = subgroup_to_json(sf.forbidden)
        out["circuits"] = [trail_to_json(c) for c in sf.circuits]
    else:
        out["cover"] = sorted(res.cover)
    return out


def pack_from_json(G: FiniteGroup, x, where: str = "<pack>", path: str = "") -> PackOrCover:
    rd = _Reader(where)
    r = rd.field(x, "r", path, int)
    cert = rd.field(x, "certificate", path, dict)
    kind = rd.field(x, "kind", path, str)
    if kind == "packing":
        center = vertex_from_json(rd.field(x, "center", path), rd, f"{path}/center")
        H = subgroup_from_json(G, rd.field(x, "subgroup", path), where, f"{path}/subgroup")
        circuits = tuple(
            trail_from_json(c, rd, f"{path}/circuits/{i}")
            for i, c in enumerate(rd.field(x, "circuits", path, list))
        )
        return PackOrCover(r, packing=SimpleFlower(center, H, circuits), certificate=cert)
    if kind == "cover":
        cover = rd.field(x, "cover", path, list)
        for i, e in enumerate(cover):
            rd.expect(e, int, f"{path}/cover/{i}")
        return PackOrCover(r, cover=frozenset(cover), certificate=cert)
    rd.fail("kind must be 'packing' or 'cover'", f"{path}/kind")


# --- decompositions --------------------------------------------------------------


def decomposition_to_json(d: TreeCutDecomposition) -> dict:
    return {
        "nodes": list(d.nodes),
        "edges": [list(e) for e in d.tree_edges],
        "bags": [[node, [vertex_to_json(v) for v in sorted_vertices(d.bags[node])]] for node in d.nodes],
    }


def decomposition_from_json(x, where: str = "<decomposition>", path: str = "") -> TreeCutDecomposition:
    rd = _Reader(where)
    nodes = rd.field(x, "nodes", path, list)
    for i, v in enumerate(nodes):
        rd.expect(v, int, f"{path}/nodes/{i}")
    edges = []
    for i, e in enumerate(rd.field(x, "edges", path, list)):
        if not (isinstance(e, list) and len(e) == 2 and all(_is(a, int) for a in e)):
            rd.fail("a tree edge is a pair of node ids", f"{path}/edges/{i}")
        edges.append(tuple(e))
    bags = _pair_list(rd.field(x, "bags", path), rd, f"{path}/bags",
                      lambda v, p: frozenset(vertex_from_json(u, rd, f"{p}/{j}") for j, u in enumerate(rd.expect(v, list, p))))
    return TreeCutDecomposition(tuple(nodes), tuple(edges), bags)


def structure_to_json(res: StructureResult) -> dict:
    out = {
        "kind": res.kind,
        "t": res.t,
        "bound": res.bound,
        "hypothesis": res.hypothesis,
        "override_t": res.override_t,
        "notes": list(res.notes),
    }
    if res.kind == "rich-flower":
        out["witness"] = {
            "pattern": graph_to_json(res.witness.pattern),
            "immersion": immersion_to_json(res.witness.immersion),
        }
        return out
    out["gamma_shift"] = _pairs(res.shift)
    out["containers"] = [[vertex_to_json(v) for v in sorted_vertices(C)] for C in res.containers]
    out.update(decomposition_to_json(res.decomposition))
    out["outcomes"] = [[r.node, r.outcome] for r in res.report.bags]
    return out


def shift_from_json(x, where: str = "<shift>", path: str = "") -> dict:
    rd = _Reader(where)
    return _pair_list(x, rd, path, lambda v, p: rd.expect(v, int, p))


def report_to_json(report) -> dict:
    bags = []
    for r in report.bags:
        bags.append({
            "node": r.node,
            "bag": [vertex_to_json(v) for v in sorted_vertices(r.bag)],
            "outcome": r.outcome,
            "high_degree": [vertex_to_json(v) for v in r.high_degree],
            "new_high_degree": [vertex_to_json(v) for v in r.new_high_degree],
            "value": r.value,
            "cover": sorted(r.cover) if r.cover is not None else None,
            "subgroup": subgroup_to_json(r.subgroup) if r.subgroup is not None else None,
        })
    return {"ok": report.ok, "t": report.t, "bound": report.bound, "bags": bags}
