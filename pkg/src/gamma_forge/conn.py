"""Edge connectivity, edge-blocks, ear decompositions and t-cores.

Loops never count toward degrees, boundaries or cuts.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, List, Optional, Sequence

from .errors import InvalidParameter, PreconditionError
from .lgraph import Dart, LabeledGraph, Trail, sorted_vertices, vkey


# --- unit-capacity max-flow ----------------------------------------------


class FlowNetwork:
    """Arc-level max-flow.  Undirected arcs have capacity in both directions.

    Flow on arc ``i`` is ``flow[i]``, positive in the ``u -> v`` direction.
    """

    def __init__(self):
        self.arcs = []  # (u, v, cap_forward, cap_backward, tag)
        self.adj = {}
        self.flow = []

    def add_arc(self, u, v, cap_fwd, cap_bwd=0, tag=None):
        i = len(self.arcs)
        self.arcs.append((u, v, cap_fwd, cap_bwd, tag))
        self.flow.append(0)
        self.adj.setdefault(u, []).append((i, True))
        self.adj.setdefault(v, []).append((i, False))
        return i

    def _residual(self, i, fwd):
        _, _, cf, cb, _ = self.arcs[i]
        return cf - self.flow[i] if fwd else cb + self.flow[i]

    def max_flow(self, s, t, limit=None) -> int:
        if s == t:
            raise InvalidParameter("source and sink coincide")
        total = 0
        self.adj.setdefault(s, [])
        self.adj.setdefault(t, [])
        while limit is None or total < limit:
            parent = {s: None}
            queue = deque([s])
            while queue and t not in parent:
                u = queue.popleft()
                for i, fwd in self.adj[u]:
                    w = self.arcs[i][1] if fwd else self.arcs[i][0]
                    if w not in parent and self._residual(i, fwd) > 0:
                        parent[w] = (u, i, fwd)
                        queue.append(w)
            if t not in parent:
                break
            path, w = [], t
            while parent[w] is not None:
                u, i, fwd = parent[w]
                path.append((i, fwd))
                w = u
            push = min(self._residual(i, fwd) for i, fwd in path)
            if limit is not None:
                push = min(push, limit - total)
            for i, fwd in path:
                self.flow[i] += push if fwd else -push
            total += push
        return total

    def source_side(self, s) -> set:
        """Vertices reachable from ``s`` in the residual graph (the least min-cut side)."""
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for i, fwd in self.adj.get(u, ()):
                w = self.arcs[i][1] if fwd else self.arcs[i][0]
                if w not in seen and self._residual(i, fwd) > 0:
                    seen.add(w)
                    queue.append(w)
        return seen


def flow_walks(net: "FlowNetwork", source, sink_tag, value: int) -> list:
    """Split an integral flow of ``value`` into source-to-sink walks.

    Arcs tagged ``sink_tag`` enter the sink.  Returns ``(last vertex, [(arc tag, direction)])``
    pairs; each walk uses every arc at most once per unit of flow, so unit-capacity
    arcs give trails.  Leftover flow cycles are ignored.
    """
    out = {}
    for i, (u, v, _, _, tag) in enumerate(net.arcs):
        f = net.flow[i]
        if f > 0:
            out.setdefault(u, []).extend([(i, v, tag, True)] * f)
        elif f < 0:
            out.setdefault(v, []).extend([(i, u, tag, False)] * -f)
    for lst in out.values():
        lst.sort(key=lambda x: x[0])
    paths = []
    for _ in range(value):
        steps, u = [], source
        while True:
            i, w, tag, fwd = out[u].pop(0)
            if tag == sink_tag:
                paths.append((u, steps))
                break
            steps.append((tag, fwd))
            u = w
    return paths


class _Terminal:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"<{self.name}>"


def _network(g: LabeledGraph, rename=None) -> FlowNetwork:
    net = FlowNetwork()
    for eid, (u, v, _) in g.edges.items():
        if rename is not None:
            u, v = rename(u), rename(v)
        if u != v:
            net.add_arc(u, v, 1, 1, eid)
    return net


def min_cut(g: LabeledGraph, sources: Iterable, sinks: Iterable, limit=None):
    """Minimum edge cut between two disjoint vertex sets.

    Returns ``(value, side)`` where ``side`` is the inclusion-wise least
    source side of a minimum cut (residual reachability from the sources).
    With ``limit`` the flow stops early and ``side`` is meaningless.
    """
    S, T = set(sources), set(sinks)
    if not S or not T:
        raise InvalidParameter("both terminal sets must be nonempty")
    if S & T:
        raise InvalidParameter("terminal sets overlap")
    src, snk = _Terminal("source"), _Terminal("sink")

    def rename(v):
        return src if v in S else snk if v in T else v

    net = _network(g, rename)
    value = net.max_flow(src, snk, limit)
    side = net.source_side(src)
    side.discard(src)
    return value, (side - {snk}) | S


def edge_connectivity(g: LabeledGraph, u, v, limit=None) -> int:
    """Size of a minimum edge cut separating ``u`` from ``v``."""
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        raise InvalidParameter("edge connectivity needs two distinct vertices")
    net = _network(g)
    return net.max_flow(u, v, limit)


def degree(g: LabeledGraph, v) -> int:
    """``|delta(v)|``: non-loop incident edges, counted with multiplicity."""
    g.check_vertex(v)
    return sum(1 for d in g.darts_from(v) if g.head(d) != v)


def boundary(g: LabeledGraph, B: Iterable) -> set:
    """``delta(B)``: edges with exactly one end in ``B``."""
    B = set(B)
    return {e for e, (u, v, _) in g.edges.items() if (u in B) != (v in B)}


def internal_edges(g: LabeledGraph, B: Iterable) -> set:
    """``E(B)``: edges with both ends in ``B`` (loops included)."""
    B = set(B)
    return {e for e, (u, v, _) in g.edges.items() if u in B and v in B}


# --- bridges and edge-blocks -----------------------------------------------


def bridges(g: LabeledGraph) -> set:
    """Edge ids whose removal disconnects their endpoints (parallel edges are never bridges)."""
    index, low = {}, {}
    found = set()
    counter = 0
    for root in g.vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(g.darts_from(root)))]
        while stack:
            u, via, it = stack[-1]
            advanced = False
            for d in it:
                if d.edge == via:
                    continue
                w = g.head(d)
                if w == u:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append((w, d.edge, iter(g.darts_from(w))))
                    advanced = True
                    break
                low[u] = min(low[u], index[w])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > index[p]:
                        found.add(via)
    return found


def components(g: LabeledGraph, skip_edges: Iterable[int] = ()) -> list:
    skip = set(skip_edges)
    seen, comps = set(), []
    for root in g.vertices:
        if root in seen:
            continue
        comp = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for d in g.darts_from(u):
                if d.edge in skip:
                    continue
                w = g.head(d)
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def edge_blocks(g: LabeledGraph) -> list:
    """Vertex partition into edge-blocks, each block sorted, blocks ordered by least vertex."""
    blocks = components(g, bridges(g))
    return sorted((sorted_vertices(b) for b in blocks), key=lambda b: vkey(b[0]))


def edge_block_of(g: LabeledGraph, x) -> frozenset:
    g.check_vertex(x)
    br = bridges(g)
    for comp in components(g, br):
        if x in comp:
            return comp
    raise AssertionError("unreachable")


def block_subgraph(g: LabeledGraph, x) -> LabeledGraph:
    """The edge-block containing ``x`` as a subgraph: its vertices and all non-bridge edges among them."""
    block = edge_block_of(g, x)
    br = bridges(g)
    return LabeledGraph(
        g.group,
        tuple(v for v in g.vertices if v in block),
        {e: t for e, t in g.edges.items() if e not in br and t[0] in block and t[1] in block},
        g.next_id,
    )


def is_connected(g: LabeledGraph) -> bool:
    return len(components(g)) <= 1


def is_two_edge_connected(g: LabeledGraph) -> bool:
    """Connected and bridgeless.  A single vertex counts as 2-edge-connected."""
    return len(g.vertices) >= 1 and is_connected(g) and not bridges(g)


# --- ear decompositions ----------------------------------------------------


@dataclass(frozen=True)
class EarDecomposition:
    ears: tuple  # of Trail; ears[0] is a cycle


def _cycle_through(g: LabeledGraph, x) -> Trail:
    for d in g.darts_from(x):
        if g.head(d) == x:
            return Trail((d,))
    for d in g.darts_from(x):
        y = g.head(d)
        path = _bfs_path(g, y, lambda w: w == x, forbidden_edges={d.edge}, forbidden_vertices=set())
        if path is not None:
            return Trail((d,) + path)
    raise PreconditionError(f"no cycle through {x!r}: graph is not 2-edge-connected there")


def _bfs_path(g, start, is_target, forbidden_edges, forbidden_vertices):
    """Shortest path from ``start`` to a target vertex whose internal vertices avoid ``forbidden_vertices``."""
    if is_target(start):
        return ()
    parent = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for d in g.darts_from(u):
            if d.edge in forbidden_edges:
                continue
            w = g.head(d)
            if w in parent:
                continue
            parent[w] = (u, d)
            if is_target(w):
                steps = []
                while parent[w] is not None:
                    u2, d2 = parent[w]
                    steps.append(d2)
                    w = u2
                return tuple(reversed(steps))
            if w not in forbidden_vertices:
                queue.append(w)
    return None


def ear_decomposition(g: LabeledGraph, start=None, root=None) -> EarDecomposition:
    """An ear decomposition covering every edge of a 2-edge-connected graph.

    ``start`` fixes the initial cycle (a circuit whose vertices are distinct
    apart from its ends); otherwise a short cycle through ``root`` (default:
    the least vertex) is used.  Ears are paths with distinct ends in the
    covered part or cycles hanging from a covered vertex.
    """
    if not g.edges:
        raise PreconditionError("ear decomposition needs at least one edge")
    if not is_two_edge_connected(g):
        raise PreconditionError("graph is not 2-edge-connected")
    if start is None:
        root = g.vertices[0] if root is None else g.check_vertex(root)
        start = _cycle_through(g, root)
    else:
        g.check_trail(start)
        if not g.is_circuit(start):
            raise InvalidParameter("the starting ear must be a cycle")
    ears = [start]
    covered = set(g.trail_vertices(start))
    used = set(start.edges)
    for eid in g.edges:
        if eid in used:
            continue
        # grow from the least unused edge touching the covered part
        while eid not in used:
            ear = _next_ear(g, covered, used)
            ears.append(ear)
            used |= ear.edges
            covered.update(g.trail_vertices(ear))
    return EarDecomposition(tuple(ears))


def _next_ear(g: LabeledGraph, covered: set, used: set) -> Trail:
    for eid in sorted(g.edges):
        if eid in used:
            continue
        u, v, _ = g.edges[eid]
        if u in covered or v in covered:
            d = Dart(eid, u in covered)
            tail, head = g.tail(d), g.head(d)
            if head in covered:
                return Trail((d,))
            path = _bfs_path(g, head, lambda w: w in covered, forbidden_edges=used | {eid}, forbidden_vertices=covered)
            if path is None:
                raise PreconditionError("graph is not 2-edge-connected")
            return Trail((d,) + path)
    raise PreconditionError("graph is not connected")


def check_ear_decomposition(g: LabeledGraph, dec: EarDecomposition) -> Optional[str]:
    """Return ``None`` if ``dec`` is a valid ear decomposition of ``g``, else the violated invariant."""
    if not dec.ears:
        return "no ears"
    seen_edges = set()
    covered = set()
    for i, ear in enumerate(dec.ears):
        try:
            g.check_trail(ear)
        except InvalidParameter as exc:
            return f"ear {i} is not a trail: {exc}"
        if seen_edges & ear.edges:
            return f"ear {i} reuses an edge"
        seen_edges |= ear.edges
        vs = g.trail_vertices(ear)
        inner = vs[1:-1]
        if len(set(inner)) != len(inner):
            return f"ear {i} repeats an internal vertex"
        if i == 0:
            if vs[0] != vs[-1]:
                return "first ear is not a cycle"
            if vs[0] in inner:
                return "first ear is not a cycle"
        else:
            if vs[0] not in covered or vs[-1] not in covered:
                return f"ear {i} has an end outside earlier ears"
            if any(w in covered for w in inner):
                return f"ear {i} has an internal vertex in earlier ears"
            if vs[0] in inner or vs[-1] in inner:
                return f"ear {i} revisits an end"
        covered.update(vs)
    if seen_edges != set(g.edges):
        return "ears do not cover every edge"
    return None


# --- t-cores ---------------------------------------------------------------


@dataclass(frozen=True)
class CorePartition:
    t: int
    cores: tuple  # of frozenset


def t_cores(g: LabeledGraph, t: int) -> CorePartition:
    """Classes of the ``(t+1)``-edge-connectivity relation on vertices of degree at least ``t+1``.

    Cores are ordered by decreasing size, then by least vertex.
    """
    if t < 0:
        raise InvalidParameter("t must be nonnegative")
    high = [v for v in g.vertices if degree(g, v) >= t + 1]
    classes: List[list] = []
    for v in high:
        for cls in classes:
            if edge_connectivity(g, cls[0], v, limit=t + 1) >= t + 1:
                cls.append(v)
                break
        else:
            classes.append([v])
    cores = sorted((frozenset(c) for c in classes), key=lambda c: (-len(c), [vkey(v) for v in sorted_vertices(c)]))
    return CorePartition(t, tuple(cores))


def is_fully_connected(g: LabeledGraph, v, C: Iterable) -> bool:
    """Whether every ``A`` with ``v in A`` and ``A ⊆ C`` has ``|delta(A)| >= |delta(C)|``."""
    C = set(C)
    g.check_vertex(v)
    if v not in C:
        raise InvalidParameter(f"{v!r} is not in C")
    need = len(boundary(g, C))
    outside = set(g.vertices) - C
    if not outside or need == 0:
        return True
    value, _ = min_cut(g, {v}, outside, limit=need)
    return value >= need


def contract(g: LabeledGraph, C: Iterable, new_vertex) -> LabeledGraph:
    """Identify ``C`` to ``new_vertex``, dropping edges that become loops there."""
    C = set(C)
    if new_vertex in g.vertices and new_vertex not in C:
        raise InvalidParameter(f"{new_vertex!r} already names a vertex")
    verts = [v for v in g.vertices if v not in C] + [new_vertex]
    edges = {}
    for e, (u, v, lab) in g.edges.items():
        u2 = new_vertex if u in C else u
        v2 = new_vertex if v in C else v
        if u2 == new_vertex and v2 == new_vertex:
            continue
        edges[e] = (u2, v2, lab)
    return LabeledGraph(g.group, tuple(verts), edges, g.next_id)
