"""Group-labeled multigraphs, trails, shifting and split-off."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Hashable, Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import InvalidParameter, InvalidTransition
from .group import FiniteGroup, make_cyclic

Vertex = Hashable
ShiftAssignment = Dict[Vertex, int]


def vkey(v):
    """Sort key that orders ints numerically and keeps mixed vertex types comparable."""
    if isinstance(v, bool):
        return (3, repr(v))
    if isinstance(v, int):
        return (0, v, "")
    if isinstance(v, str):
        return (1, 0, v)
    if isinstance(v, tuple):
        return (2, len(v), tuple(vkey(x) for x in v))
    return (3, repr(v))


def sorted_vertices(vs: Iterable[Vertex]) -> list:
    return sorted(vs, key=vkey)


class Dart(NamedTuple):
    """An oriented edge: ``forward`` means tail-to-head as stored in the graph."""

    edge: int
    forward: bool = True

    def reversed(self) -> "Dart":
        return Dart(self.edge, not self.forward)


@dataclass(frozen=True)
class Trail:
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(Dart(*d) for d in self.steps))
        if not self.steps:
            raise InvalidParameter("a trail needs at least one oriented edge")
        if len({d.edge for d in self.steps}) != len(self.steps):
            raise InvalidParameter("trail repeats an underlying edge")

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    @property
    def edges(self) -> frozenset:
        return frozenset(d.edge for d in self.steps)

    @property
    def first(self) -> Dart:
        return self.steps[0]

    @property
    def last(self) -> Dart:
        return self.steps[-1]

    def __add__(self, other: "Trail") -> "Trail":
        return Trail(self.steps + other.steps)


def inverse(t: Trail) -> Trail:
    return Trail(tuple(d.reversed() for d in reversed(t.steps)))


def canonical_transition(a: Dart, b: Dart) -> tuple:
    """Transitions ``(a, b)`` and ``(b^-1, a^-1)`` are the same; keep the smaller."""
    return min((a, b), (b.reversed(), a.reversed()))


def transitions(t: Trail) -> set:
    s = t.steps
    return {canonical_transition(s[i], s[i + 1]) for i in range(len(s) - 1)}


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """An undirected multigraph whose edges carry a label in ``group`` for the stored orientation.

    ``edges`` maps an edge id to ``(tail, head, label)``; the reverse orientation
    carries the inverse label, so the inverse-label condition holds by construction.
    """

    group: FiniteGroup
    vertices: tuple
    edges: Mapping[int, tuple]
    next_id: int = 0

    def __post_init__(self):
        verts = tuple(sorted_vertices(set(self.vertices)))
        if len(verts) != len(self.vertices):
            raise InvalidParameter("duplicate vertex ids")
        vset = set(verts)
        edges = {}
        for eid, (u, v, lab) in sorted(self.edges.items()):
            if not isinstance(eid, int) or eid < 0:
                raise InvalidParameter(f"edge id {eid!r} must be a nonnegative integer")
            if u not in vset or v not in vset:
                raise InvalidParameter(f"edge {eid} has an endpoint outside the vertex set")
            edges[eid] = (u, v, self.group.check_element(lab))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "next_id", max(self.next_id, max(edges, default=-1) + 1))

    @classmethod
    def build(cls, group: FiniteGroup, vertices: Iterable[Vertex], edges: Iterable[tuple]) -> "LabeledGraph":
        """Build from ``(tail, head, label)`` triples; ids are assigned in order."""
        return cls(group, tuple(vertices), {i: tuple(e) for i, e in enumerate(edges)})

    @classmethod
    def unlabeled(cls, vertices: Iterable[Vertex], edges: Iterable[tuple], group: FiniteGroup = None):
        group = group or make_cyclic(1)
        return cls.build(group, vertices, [(u, v, group.identity) for u, v in edges])

    def __eq__(self, other):
        return (
            isinstance(other, LabeledGraph)
            and self.group == other.group
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.group, self.vertices, tuple(self.edges.items())))

    def __repr__(self):
        return f"LabeledGraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, group={self.group.name})"

    # --- accessors -------------------------------------------------------
    @property
    def edge_ids(self) -> list:
        return list(self.edges)

    def ends(self, eid: int) -> tuple:
        u, v, _ = self.edges[eid]
        return u, v

    def is_loop(self, eid: int) -> bool:
        u, v, _ = self.edges[eid]
        return u == v

    def tail(self, d: Dart) -> Vertex:
        u, v, _ = self.edges[d.edge]
        return u if d.forward else v

    def head(self, d: Dart) -> Vertex:
        u, v, _ = self.edges[d.edge]
        return v if d.forward else u

    def label(self, d: Dart) -> int:
        lab = self.edges[d.edge][2]
        return lab if d.forward else self.group.inv(lab)

    def label_from(self, eid: int, v: Vertex) -> int:
        """Label of edge ``eid`` oriented away from ``v`` (stored orientation for loops)."""
        u, w, lab = self.edges[eid]
        return lab if u == v else self.group.inv(lab)

    @cached_property
    def _out_darts(self) -> dict:
        out = {v: [] for v in self.vertices}
        for eid, (u, v, _) in self.edges.items():
            out[u].append(Dart(eid, True))
            out[v].append(Dart(eid, False))
        return out

    def darts_from(self, v: Vertex) -> list:
        """Oriented edges with tail ``v``; a loop contributes both orientations."""
        return self._out_darts[v]

    def end_count(self, v: Vertex) -> int:
        """Edge-ends at ``v``: loops count twice."""
        return len(self._out_darts[v])

    def has_vertex(self, v) -> bool:
        return v in self._vertex_set

    @cached_property
    def _vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def check_vertex(self, v) -> Vertex:
        if v not in self._vertex_set:
            raise InvalidParameter(f"unknown vertex {v!r}")
        return v

    def check_trail(self, t: Trail) -> Trail:
        for d in t.steps:
            if d.edge not in self.edges:
                raise InvalidParameter(f"trail uses unknown edge {d.edge}")
        for a, b in zip(t.steps, t.steps[1:]):
            if self.head(a) != self.tail(b):
                raise InvalidParameter(f"trail is discontinuous between edges {a.edge} and {b.edge}")
        return t

    def trail_tail(self, t: Trail) -> Vertex:
        return self.tail(t.first)

    def trail_head(self, t: Trail) -> Vertex:
        return self.head(t.last)

    def is_circuit(self, t: Trail) -> bool:
        return self.trail_tail(t) == self.trail_head(t)

    def trail_vertices(self, t: Trail) -> list:
        return [self.tail(t.first)] + [self.head(d) for d in t.steps]

    # --- derived graphs --------------------------------------------------
    def delete_edges(self, X: Iterable[int]) -> "LabeledGraph":
        X = set(X)
        return LabeledGraph(
            self.group, self.vertices, {e: t for e, t in self.edges.items() if e not in X}, self.next_id
        )

    def induced(self, B: Iterable[Vertex]) -> "LabeledGraph":
        B = set(B)
        return LabeledGraph(
            self.group,
            tuple(v for v in self.vertices if v in B),
            {e: (u, v, l) for e, (u, v, l) in self.edges.items() if u in B and v in B},
            self.next_id,
        )

    def restrict_edges(self, keep: Iterable[int]) -> "LabeledGraph":
        keep = set(keep)
        return LabeledGraph(
            self.group, self.vertices, {e: t for e, t in self.edges.items() if e in keep}, self.next_id
        )

    def with_labels(self, labels: Mapping[int, int]) -> "LabeledGraph":
        return LabeledGraph(
            self.group,
            self.vertices,
            {e: (u, v, labels.get(e, l)) for e, (u, v, l) in self.edges.items()},
            self.next_id,
        )


def trail_label(g: LabeledGraph, t: Trail) -> int:
    g.check_trail(t)
    return g.group.product(g.label(d) for d in t.steps)


def shifted_label(g: LabeledGraph, d: Dart, sigma: Mapping[Vertex, int]) -> int:
    """Label of ``d`` after shifting by ``sigma``: ``sigma(tail) * label * sigma(head)^-1``."""
    G = g.group
    a = sigma.get(g.tail(d), G.identity)
    b = sigma.get(g.head(d), G.identity)
    return G.mul(G.mul(a, g.label(d)), G.inv(b))


def shift_by(g: LabeledGraph, sigma: Mapping[Vertex, int]) -> LabeledGraph:
    """Apply a per-vertex shift assignment (identity where unspecified)."""
    G = g.group
    for v, a in sigma.items():
        g.check_vertex(v)
        G.check_element(a)
    new = {}
    for eid, (u, v, lab) in g.edges.items():
        a = sigma.get(u, G.identity)
        b = sigma.get(v, G.identity)
        new[eid] = (u, v, G.mul(G.mul(a, lab), G.inv(b)))
    return LabeledGraph(G, g.vertices, new, g.next_id)


def shift(g: LabeledGraph, v: Vertex, alpha: int) -> LabeledGraph:
    """Shift by ``alpha`` at ``v``: prepend ``alpha`` on out-edges and append ``alpha^-1`` on in-edges."""
    g.check_vertex(v)
    return shift_by(g, {v: alpha})


def compose_shifts(G: FiniteGroup, first: Mapping, then: Mapping) -> dict:
    """Assignment equal to applying ``first`` and then ``then``."""
    out = dict(first)
    for v, b in then.items():
        out[v] = G.mul(b, first.get(v, G.identity))
    return {v: a for v, a in out.items() if a != G.identity}


def cyclic_reorder(g: LabeledGraph, c: Trail, i: int) -> Trail:
    """The circuit starting at step ``i`` (1-based, as ``e_i ... e_n e_1 ... e_{i-1}``)."""
    g.check_trail(c)
    if not g.is_circuit(c):
        raise InvalidParameter("cyclic reordering needs a circuit")
    if not 1 <= i <= len(c):
        raise InvalidParameter(f"step index {i} out of range 1..{len(c)}")
    return Trail(c.steps[i - 1 :] + c.steps[: i - 1])


def _canonical_edge(g: LabeledGraph, u, v, lab) -> tuple:
    if vkey(v) < vkey(u):
        return v, u, g.group.inv(lab)
    if u == v:
        return u, v, min(lab, g.group.inv(lab))
    return u, v, lab


def split_off(g: LabeledGraph, a: Dart, b: Dart) -> LabeledGraph:
    """Replace the transition ``(a, b)`` by one edge labeled ``label(a) * label(b)``.

    The new edge gets id ``g.next_id`` and is stored in a canonical orientation,
    so splitting ``(a, b)`` and ``(b^-1, a^-1)`` yield equal graphs.
    """
    a, b = Dart(*a), Dart(*b)
    for d in (a, b):
        if d.edge not in g.edges:
            raise InvalidParameter(f"unknown edge {d.edge}")
    if a.edge == b.edge:
        raise InvalidTransition("split-off needs two distinct underlying edges")
    if g.head(a) != g.tail(b):
        raise InvalidTransition(f"head of edge {a.edge} is not the tail of edge {b.edge}")
    lab = g.group.mul(g.label(a), g.label(b))
    new = {e: t for e, t in g.edges.items() if e not in (a.edge, b.edge)}
    new[g.next_id] = _canonical_edge(g, g.tail(a), g.head(b), lab)
    return LabeledGraph(g.group, g.vertices, new, g.next_id + 1)


def same_underlying(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    if g1.vertices != g2.vertices or set(g1.edges) != set(g2.edges):
        return False
    for e, (u, v, _) in g1.edges.items():
        x, y, _ = g2.edges[e]
        if {u, v} != {x, y}:
            return False
    return True


def shifting_equivalent(g1: LabeledGraph, g2: LabeledGraph) -> Optional[ShiftAssignment]:
    """A total assignment ``sigma`` with ``sigma(u) g1(e) sigma(v)^-1 = g2(e)`` for every edge, or ``None``.

    Each connected component's root is tried with every group element (identity
    first); the remaining values are forced along a BFS spanning forest.
    """
    if g1.group != g2.group or not same_underlying(g1, g2):
        raise InvalidParameter("graphs must share the underlying graph and group")
    G = g1.group
    target = {e: g2.label_from(e, g1.ends(e)[0]) for e in g1.edges}
    sigma: dict = {}
    for root in g1.vertices:
        if root in sigma:
            continue
        component = _component(g1, root)
        for alpha in _elements_identity_first(G):
            trial = _propagate(g1, root, alpha, target)
            if trial is not None:
                sigma.update(trial)
                break
        else:
            return None
        assert component <= set(sigma)
    return sigma


def _elements_identity_first(G: FiniteGroup) -> list:
    return [G.identity] + [a for a in G.elements if a != G.identity]


def _component(g: LabeledGraph, root) -> set:
    seen, stack = {root}, [root]
    while stack:
        u = stack.pop()
        for d in g.darts_from(u):
            w = g.head(d)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _propagate(g: LabeledGraph, root, alpha: int, target: Mapping[int, int]) -> Optional[dict]:
    G = g.group
    sigma = {root: alpha}
    order = [root]
    for u in order:
        for d in g.darts_from(u):
            w = g.head(d)
            want = target[d.edge] if d.forward else G.inv(target[d.edge])
            if w not in sigma:
                # sigma(u) l sigma(w)^-1 = want  =>  sigma(w) = want^-1 sigma(u) l
                sigma[w] = G.mul(G.mul(G.inv(want), sigma[u]), g.label(d))
                order.append(w)
            elif G.mul(G.mul(sigma[u], g.label(d)), G.inv(sigma[w])) != want:
                return None
    return sigma
