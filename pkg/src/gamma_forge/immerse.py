"""Immersions between group-labeled graphs: verification, composition and bounded search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, Mapping, Optional

from .balance import frustration
from .conn import boundary, edge_connectivity, min_cut
from .errors import BudgetExceeded, InvalidParameter, MalformedImmersion
from .lgraph import Dart, LabeledGraph, Trail, inverse, sorted_vertices, vkey

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class Immersion:
    """``vertex_map``: pattern vertex -> host vertex; ``trail_map``: pattern edge id -> host trail
    for the pattern edge's stored orientation; ``shift``: host shift assignment (identity elsewhere).
    """

    vertex_map: Mapping
    trail_map: Mapping
    shift: Mapping = field(default_factory=dict)
    audit: tuple = ()

    def branch_trail(self, eid: int, forward: bool = True) -> Trail:
        t = self.trail_map[eid]
        return t if forward else inverse(t)

    @property
    def used_edges(self) -> frozenset:
        return frozenset(e for t in self.trail_map.values() for e in t.edges)


@dataclass(frozen=True)
class ImmersionReport:
    ok: bool
    condition: Optional[str] = None
    message: str = ""

    def __bool__(self):
        return self.ok


def verify_immersion(g: LabeledGraph, h: LabeledGraph, im: Immersion, ignore_labels: bool = False) -> ImmersionReport:
    """Check injectivity, endpoints, edge-disjointness, inverse pairing and (optionally) labels.

    The report names the first violated condition.  References to vertices or
    edges that do not exist raise ``MalformedImmersion``.
    """
    for hv, gv in im.vertex_map.items():
        if not h.has_vertex(hv):
            raise MalformedImmersion(f"pattern vertex {hv!r} does not exist")
        if not g.has_vertex(gv):
            raise MalformedImmersion(f"host vertex {gv!r} does not exist")
    for v in im.shift:
        if not g.has_vertex(v):
            raise MalformedImmersion(f"shift assigned at unknown host vertex {v!r}")
    for eid, t in im.trail_map.items():
        if eid not in h.edges:
            raise MalformedImmersion(f"pattern edge {eid} does not exist")
        if not isinstance(t, Trail):
            raise MalformedImmersion(f"image of pattern edge {eid} is not a trail")
        for d in t.steps:
            if d.edge not in g.edges:
                raise MalformedImmersion(f"trail for pattern edge {eid} uses unknown host edge {d.edge}")

    missing = [v for v in h.vertices if v not in im.vertex_map]
    if missing:
        return ImmersionReport(False, "injectivity", f"pattern vertices {missing} are unmapped")
    images = list(im.vertex_map.values())
    if len(set(images)) != len(images):
        return ImmersionReport(False, "injectivity", "two pattern vertices share a branch vertex")
    missing = [e for e in h.edges if e not in im.trail_map]
    if missing:
        return ImmersionReport(False, "endpoints", f"pattern edges {missing} have no branch trail")

    for eid, t in im.trail_map.items():
        try:
            g.check_trail(t)
        except InvalidParameter as exc:
            return ImmersionReport(False, "inverse-pairing", f"pattern edge {eid}: {exc}")
        back = inverse(t)
        if inverse(back) != t or g.trail_tail(back) != g.trail_head(t):
            return ImmersionReport(False, "inverse-pairing", f"pattern edge {eid}: reverse trail mismatch")

    owner = {}
    for eid in sorted(im.trail_map):
        for e in im.trail_map[eid].edges:
            if e in owner:
                return ImmersionReport(
                    False, "edge-disjointness", f"branch trails of pattern edges {owner[e]} and {eid} share host edge {e}"
                )
            owner[e] = eid

    G = g.group
    for eid, (a, b, lab) in h.edges.items():
        t = im.trail_map[eid]
        if g.trail_tail(t) != im.vertex_map[a] or g.trail_head(t) != im.vertex_map[b]:
            return ImmersionReport(False, "endpoints", f"branch trail of pattern edge {eid} has the wrong ends")
        if ignore_labels:
            continue
        if G != h.group:
            raise MalformedImmersion("pattern and host use different groups")
        got = G.product(g.label(d) for d in t.steps)
        sa = im.shift.get(im.vertex_map[a], G.identity)
        sb = im.shift.get(im.vertex_map[b], G.identity)
        if G.mul(G.mul(sa, got), G.inv(sb)) != lab:
            return ImmersionReport(False, "label", f"pattern edge {eid}: shifted trail label differs from {lab}")
    return ImmersionReport(True)


def identity_immersion(g: LabeledGraph) -> Immersion:
    return Immersion({v: v for v in g.vertices}, {e: Trail((Dart(e, True),)) for e in g.edges}, {})


def compose(outer: Immersion, inner: Immersion, mid: LabeledGraph) -> Immersion:
    """Immersion of ``inner``'s pattern into ``outer``'s host, through the graph ``mid``.

    Each edge of an inner trail is replaced by the outer branch trail of that
    edge (inverted for backward steps).  Shifts compose at branch vertices.
    """
    G = mid.group
    vmap = {v: outer.vertex_map[w] for v, w in inner.vertex_map.items()}
    trails = {}
    for eid, t in inner.trail_map.items():
        steps = []
        for d in t.steps:
            steps.extend(outer.branch_trail(d.edge, d.forward).steps)
        trails[eid] = Trail(tuple(steps))
    shift = dict(outer.shift)
    for w in mid.vertices:
        tau = inner.shift.get(w, G.identity)
        gv = outer.vertex_map[w]
        val = G.mul(tau, outer.shift.get(gv, G.identity))
        if val == G.identity:
            shift.pop(gv, None)
        else:
            shift[gv] = val
    return Immersion(vmap, trails, shift, outer.audit + inner.audit)


# --- search ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """``status`` is ``"found"``, ``"none"`` (definitive) or ``"unknown"`` (budget exhausted)."""

    status: str
    immersion: Optional[Immersion] = None
    expanded: int = 0


class Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def tick(self, n=1):
        self.used += n
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded(f"search budget of {self.limit} expansions exhausted")


def edge_classes(g: LabeledGraph) -> dict:
    """Interchangeable edges: same ends and the same label in a common orientation.

    Loops labeled ``a`` and ``a^-1`` at one vertex are interchangeable too.
    """
    G = g.group
    key_of = {}
    for e, (u, v, lab) in g.edges.items():
        if u == v:
            key_of[e] = (vkey(u), vkey(u), min(lab, G.inv(lab)))
        elif vkey(u) <= vkey(v):
            key_of[e] = (vkey(u), vkey(v), lab)
        else:
            key_of[e] = (vkey(v), vkey(u), G.inv(lab))
    return key_of


class TrailEnumerator:
    """Enumerates trails between two vertices avoiding a set of used edges.

    Symmetry breaking: when an edge of an interchangeable class is first
    used, it is the least unused edge of that class.  Every solution of a
    routing problem maps to one respecting this rule by permuting unused edges
    within classes, so searches built on it stay complete.
    """

    def __init__(self, g: LabeledGraph, budget: Optional[Budget] = None):
        self.g = g
        self.budget = budget
        self.key_of = edge_classes(g)
        self.classes = {}
        for e in sorted(g.edges):
            self.classes.setdefault(self.key_of[e], []).append(e)

    def _allowed(self, e, used) -> bool:
        for f in self.classes[self.key_of[e]]:
            if f == e:
                return True
            if f not in used:
                return False
        return True

    def trails(self, a, b, used: set, label: Optional[int] = None, max_len: Optional[int] = None) -> Iterator[Trail]:
        """Trails from ``a`` to ``b`` in order of increasing length, filtered by ``label``."""
        limit = len(self.g.edges) - len(used) if max_len is None else max_len
        for length in range(1, limit + 1):
            found_longer = [False]
            yield from self._dfs(a, b, set(used), [], self.g.group.identity, label, length, found_longer)
            if not found_longer[0]:
                return

    def _dfs(self, u, b, used, steps, acc, label, length, found_longer):
        g = self.g
        if len(steps) == length:
            found_longer[0] = True
            if u == b and (label is None or acc == label):
                yield Trail(tuple(steps))
            return
        for d in g.darts_from(u):
            e = d.edge
            if e in used or not self._allowed(e, used):
                continue
            if self.budget is not None:
                self.budget.tick()
            used.add(e)
            steps.append(d)
            yield from self._dfs(g.head(d), b, used, steps, g.group.mul(acc, g.label(d)), label, length, found_longer)
            steps.pop()
            used.discard(e)


def find_immersion(g: LabeledGraph, h: LabeledGraph, budget: Optional[int] = DEFAULT_BUDGET) -> SearchResult:
    """Search for an immersion of ``h`` into ``g``.

    Branch vertices are mapped in order of decreasing edge-ends in ``h``; shifts
    are only chosen at branch vertices (one free value per pattern component,
    forced elsewhere by the routed trails); trails are tried shortest-first.
    """
    if g.group != h.group:
        raise InvalidParameter("host and pattern must be labeled over the same group")
    if len(h.vertices) > len(g.vertices):
        return SearchResult("none")
    b = Budget(budget)
    try:
        im = _Search(g, h, b).run()
    except BudgetExceeded:
        return SearchResult("unknown", None, b.used)
    if im is None:
        return SearchResult("none", None, b.used)
    assert verify_immersion(g, h, im), "search produced an invalid immersion"
    return SearchResult("found", im, b.used)


def forbids(g: LabeledGraph, h: LabeledGraph, budget: Optional[int] = DEFAULT_BUDGET) -> Optional[bool]:
    """``True`` if ``g`` has no immersion of ``h``, ``False`` if it has one, ``None`` if undecided."""
    res = find_immersion(g, h, budget)
    return {"found": False, "none": True}.get(res.status)


class _Search:
    def __init__(self, g: LabeledGraph, h: LabeledGraph, budget: Budget):
        self.g, self.h, self.budget = g, h, budget
        self.G = g.group
        self.enum = TrailEnumerator(g, budget)
        ends = {v: h.end_count(v) for v in h.vertices}
        self.active = sorted((v for v in h.vertices if ends[v] > 0), key=lambda v: (-ends[v], vkey(v)))
        self.isolated = [v for v in h.vertices if ends[v] == 0]
        self.h_ends = ends
        self._host_lambda = {}
        self._balance = None
        self._pattern_value = {}
        self.pattern_lambda = {}
        for i, a in enumerate(self.active):
            for b in self.active[i + 1:]:
                lam = edge_connectivity(h, a, b)
                self.pattern_lambda[a, b] = self.pattern_lambda[b, a] = lam

    def _connected_enough(self, hv, gv, vmap) -> bool:
        """Edge-disjoint paths between branch vertices survive as edge-disjoint trails."""
        for hw, gw in vmap.items():
            need = self.pattern_lambda.get((hv, hw), 0)
            if need == 0:
                continue
            key = (gv, gw) if vkey(gv) <= vkey(gw) else (gw, gv)
            if key not in self._host_lambda:
                self._host_lambda[key] = edge_connectivity(self.g, gv, gw)
            if self._host_lambda[key] < need:
                return False
        return True

    def _balance_tables(self):
        """Host sets with their boundary-plus-twice-frustration value per proper subgroup."""
        g, G = self.g, self.G
        subgroups = [H for H in G.subgroups if H.order < G.order]
        sets = {frozenset(g.vertices)}
        verts = sorted_vertices(g.vertices)
        lam = {}
        for i, u in enumerate(verts):
            for w in verts[i + 1:]:
                lam[u, w] = lam[w, u] = edge_connectivity(g, u, w)
        for level in sorted(set(self.pattern_lambda.values()) - {0}):
            classes = []
            for v in verts:
                for c in classes:
                    if lam[c[0], v] >= level:
                        c.append(v)
                        break
                else:
                    classes.append([v])
            for c in classes:
                sets.add(frozenset(c))
                for w in verts:
                    if w not in c:
                        sets.add(frozenset(min_cut(g, c, {w})[1]))
        table = []
        for B in sorted(sets, key=lambda B: (len(B), [vkey(v) for v in sorted_vertices(B)])):
            cut = len(boundary(g, B))
            table.append((B, {H: cut + 2 * frustration(g, B, H)[0] for H in subgroups}))
        return subgroups, table

    def _balance_ok(self, vmap) -> bool:
        """Trails labeled outside a subgroup need an internal edge outside it or two boundary edges."""
        if self._balance is None:
            self._balance = self._balance_tables()
        subgroups, table = self._balance
        inverse_map = {gv: hv for hv, gv in vmap.items()}
        for B, host_value in table:
            P = frozenset(inverse_map[v] for v in B if v in inverse_map)
            if not P:
                continue
            for H in subgroups:
                key = (P, H)
                if key not in self._pattern_value:
                    self._pattern_value[key] = len(boundary(self.h, P)) + 2 * frustration(self.h, P, H)[0]
                if self._pattern_value[key] > host_value[H]:
                    return False
        return True

    def run(self) -> Optional[Immersion]:
        for vmap in self._vertex_maps({}, 0):
            self.budget.tick()
            if not self._balance_ok(vmap):
                continue
            result = self._route(vmap)
            if result is not None:
                trails, sigma = result
                free = [v for v in self.g.vertices if v not in vmap.values()]
                full = dict(vmap)
                for hv, gv in zip(self.isolated, free):
                    full[hv] = gv
                shift = {v: a for v, a in sigma.items() if a != self.G.identity}
                return Immersion(full, trails, shift)
        return None

    def _vertex_maps(self, vmap, i):
        if i == len(self.active):
            if len(self.g.vertices) - len(vmap) >= len(self.isolated):
                yield dict(vmap)
            return
        hv = self.active[i]
        taken = set(vmap.values())
        for gv in self.g.vertices:
            self.budget.tick()
            if gv in taken or self.g.end_count(gv) < self.h_ends[hv]:
                continue
            if not self._connected_enough(hv, gv, vmap):
                continue
            vmap[hv] = gv
            yield from self._vertex_maps(vmap, i + 1)
            del vmap[hv]

    def _route(self, vmap):
        h, G = self.h, self.G
        order = []
        seen = set()
        roots = []
        for root in self.active:
            if root in seen:
                continue
            roots.append(root)
            seen.add(root)
            queue = [root]
            for u in queue:
                for d in h.darts_from(u):
                    w = h.head(d)
                    if d.edge not in {o[0] for o in order}:
                        order.append((d.edge, d.forward))
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
        self.twin_before = self._twins(order)
        root_choices = [[G.identity] if G.is_abelian else list(G.elements) for _ in roots]
        for vals in itertools.product(*root_choices):
            sigma = dict(zip(roots, vals))
            res = self._route_edges(vmap, order, 0, sigma, set(), {})
            if res is not None:
                return res
        return None

    def _twins(self, order) -> dict:
        """Position of the previous interchangeable pattern edge (same oriented ends and label)."""
        h = self.h
        last, out = {}, {}
        for i, (eid, fwd) in enumerate(order):
            d = Dart(eid, fwd)
            if h.tail(d) == h.head(d):
                continue
            key = (h.tail(d), h.head(d), h.label(d))
            if key in last:
                out[i] = last[key]
            last[key] = i
        return out

    def _capacity_ok(self, vmap, order, i, used):
        need = {}
        for eid, _ in order[i:]:
            a, b, _ = self.h.edges[eid]
            need[a] = need.get(a, 0) + 1
            need[b] = need.get(b, 0) + 1
        for hv, n in need.items():
            gv = vmap[hv]
            free = sum(1 for d in self.g.darts_from(gv) if d.edge not in used)
            if free < n:
                return False
        return True

    def _route_edges(self, vmap, order, i, sigma, used, trails):
        if i == len(order):
            return dict(trails), {vmap[v]: a for v, a in sigma.items()}
        if not self._capacity_ok(vmap, order, i, used):
            return None
        G, h = self.G, self.h
        eid, fwd = order[i]
        d = Dart(eid, fwd)
        a, b = h.tail(d), h.head(d)
        want = h.label(d)
        # sigma(a) * label(T) * sigma(b)^-1 = want
        if b in sigma:
            need = G.mul(G.mul(G.inv(sigma[a]), want), sigma[b])
        else:
            need = None
        twin = self.twin_before.get(i)
        floor = None
        if twin is not None:
            prev = trails[order[twin][0]]
            floor = prev.steps[0].edge if order[twin][1] else prev.steps[-1].edge
        for t in self.enum.trails(vmap[a], vmap[b], used, need):
            # twins take trails in increasing order of their first edge
            if floor is not None and t.steps[0].edge < floor:
                continue
            new_sigma = sigma
            if b not in sigma:
                lab = G.product(self.g.label(s) for s in t.steps)
                new_sigma = dict(sigma)
                new_sigma[b] = G.mul(G.mul(G.inv(want), sigma[a]), lab)
            trails[eid] = t if fwd else inverse(t)
            res = self._route_edges(vmap, order, i + 1, new_sigma, used | t.edges, trails)
            if res is not None:
                return res
            del trails[eid]
        return None
