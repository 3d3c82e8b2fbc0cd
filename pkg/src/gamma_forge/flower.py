"""Flowers and the universality immersions among them.

A flower has a center ``"x"`` and petals ``"y1" .. "yn"``; every edge joins the
center to a petal and is stored oriented away from the center.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import FrozenSet, Optional

from .conn import FlowNetwork, degree, edge_connectivity, flow_walks
from .errors import InvalidParameter, PreconditionError
from .group import FiniteGroup, Subgroup, generate_subgroup, make_cyclic, word_over_generators
from .immerse import Immersion, verify_immersion
from .lgraph import Dart, LabeledGraph, Trail, inverse, sorted_vertices, vkey

CENTER = "x"


def petal_name(i: int) -> str:
    return f"y{i}"


@dataclass(frozen=True)
class FlowerSpec:
    """``kind`` is ``"plain"``, ``"rich"`` or ``"generating"``.

    A rich flower may be restricted to the labels of ``subgroup``; a generating
    flower uses ``generators`` (which must contain the identity) and generates
    ``subgroup`` (default: the whole group).
    """

    kind: str
    k: int
    n: int
    group: Optional[FiniteGroup] = None
    generators: Optional[FrozenSet[int]] = None
    subgroup: Optional[Subgroup] = None

    def labels(self) -> list:
        G = self.group or make_cyclic(1)
        if self.kind == "plain":
            return [G.identity]
        if self.kind == "rich":
            return sorted(self.subgroup.elements) if self.subgroup is not None else list(G.elements)
        if self.kind == "generating":
            S = set(self.generators or ())
            if G.identity not in S:
                raise InvalidParameter("a generating flower's generator must contain the identity")
            target = self.subgroup.elements if self.subgroup is not None else frozenset(G.elements)
            if generate_subgroup(G, S).elements != target:
                raise InvalidParameter(f"{sorted(S)} does not generate the requested group")
            return sorted(S)
        raise InvalidParameter(f"unknown flower kind {self.kind!r}")


def build(spec: FlowerSpec) -> LabeledGraph:
    """Petal by petal, label by label, ``k`` parallel edges ``x -> y_i`` of each label."""
    if spec.k < 1 or spec.n < 1:
        raise InvalidParameter("flower parameters k and n must be positive")
    G = spec.group or make_cyclic(1)
    labels = spec.labels()
    verts = [CENTER] + [petal_name(i) for i in range(1, spec.n + 1)]
    edges = []
    for i in range(1, spec.n + 1):
        for lab in labels:
            edges.extend((CENTER, petal_name(i), lab) for _ in range(spec.k))
    return LabeledGraph.build(G, verts, edges)


def plain_flower(k: int, n: int, group: Optional[FiniteGroup] = None) -> LabeledGraph:
    return build(FlowerSpec("plain", k, n, group))


def rich_flower(group: FiniteGroup, k: int, n: int, subgroup: Optional[Subgroup] = None) -> LabeledGraph:
    return build(FlowerSpec("rich", k, n, group, subgroup=subgroup))


def generating_flower(group: FiniteGroup, generators, k: int, n: int, subgroup: Optional[Subgroup] = None):
    return build(FlowerSpec("generating", k, n, group, frozenset(generators), subgroup))


@dataclass(frozen=True)
class FlowerShape:
    center: object
    petals: tuple
    # petal -> label (oriented away from the center) -> sorted edge ids
    bundles: dict


def flower_shape(g: LabeledGraph, center=None) -> FlowerShape:
    """Recognize ``g`` as a flower.  Raises ``PreconditionError`` for other shapes."""
    if len(g.vertices) < 2:
        raise PreconditionError("a flower has at least two vertices")
    if center is None:
        if CENTER in g.vertices:
            center = CENTER
        else:
            cands = [v for v in g.vertices if all(center_ok(g, v, e) for e in g.edges)]
            if not cands:
                raise PreconditionError("no vertex meets every edge")
            center = cands[0]
    for e, (u, v, _) in g.edges.items():
        if not center_ok(g, center, e):
            raise PreconditionError(f"edge {e} does not join the center to a petal")
    petals = tuple(v for v in g.vertices if v != center)
    bundles = {p: {} for p in petals}
    for e in sorted(g.edges):
        u, v, _ = g.edges[e]
        p = v if u == center else u
        bundles[p].setdefault(g.label_from(e, center), []).append(e)
    sizes = {sum(len(es) for es in bundles[p].values()) for p in petals}
    if len(sizes) != 1 or 0 in sizes:
        raise PreconditionError("petals have unequal or zero multiplicity")
    return FlowerShape(center, petals, bundles)


def center_ok(g, c, e) -> bool:
    u, v, _ = g.edges[e]
    return (u == c) != (v == c)


def _dart_from(g: LabeledGraph, e: int, v) -> Dart:
    return Dart(e, g.edges[e][0] == v)


def embed_into_rich_flower(h: LabeledGraph, k: int, n: Optional[int] = None):
    """Immerse ``h`` into the ``(group, k, n)``-rich flower.

    Each pattern edge ``a -> b`` maps to an identity-labeled edge from ``y_a``
    into the center followed by an edge out to ``y_b`` carrying the edge's label.
    A loop counts as two incidences at its vertex.  Returns ``(rich, immersion)``.
    """
    G = h.group
    n = len(h.vertices) if n is None else n
    if len(h.vertices) > n:
        raise PreconditionError(f"pattern has {len(h.vertices)} vertices but the flower has {n} petals")
    over = [v for v in h.vertices if h.end_count(v) > k]
    if over:
        raise PreconditionError(f"vertices {over} are incident to more than {k} edges")
    rich = rich_flower(G, k, max(n, 1))
    shape = flower_shape(rich, CENTER)
    vmap = {v: petal_name(i + 1) for i, v in enumerate(h.vertices)}
    pools = {p: {lab: list(es) for lab, es in shape.bundles[p].items()} for p in shape.petals}
    trails = {}
    for e in sorted(h.edges):
        a, b, lab = h.edges[e]
        into = pools[vmap[a]][G.identity].pop(0)
        out = pools[vmap[b]][lab].pop(0)
        trails[e] = Trail((Dart(into, False), Dart(out, True)))
    im = Immersion(vmap, trails, {})
    assert verify_immersion(rich, h, im)
    return rich, im


def generating_to_rich(gflower: LabeledGraph, k: int):
    """Immerse the ``(group, k, n)``-rich flower into a generating flower of multiplicity ``k|group|^2``.

    A trail of label ``g`` zig-zags through one petal: out along an edge labeled
    by the next letter of a shortest word for ``g`` and back along an identity
    edge, ending with the last letter.  Returns ``(rich, immersion)``.
    """
    G = gflower.group
    shape = flower_shape(gflower)
    S = set(shape.bundles[shape.petals[0]])
    if any(set(shape.bundles[p]) != S for p in shape.petals):
        raise PreconditionError("petals carry different generator sets")
    if G.identity not in S:
        raise PreconditionError("generator must contain the identity")
    need = k * G.order ** 2
    short = [p for p in shape.petals if any(len(es) < need for es in shape.bundles[p].values())]
    if short:
        raise PreconditionError(f"petals {short} have fewer than k|group|^2 = {need} edges of some generator")
    words = {g: word_over_generators(G, S, g) for g in G.elements}
    n = len(shape.petals)
    rich = rich_flower(G, k, n)
    rshape = flower_shape(rich, CENTER)
    vmap = {CENTER: shape.center}
    trails = {}
    c = shape.center
    for i, p in enumerate(shape.petals):
        rp = petal_name(i + 1)
        vmap[rp] = p
        pools = {lab: list(es) for lab, es in shape.bundles[p].items()}
        for g in G.elements:
            for r_edge in rshape.bundles[rp][g]:
                if g == G.identity:
                    steps = [_dart_from(gflower, pools[G.identity].pop(0), c)]
                else:
                    steps = []
                    w = words[g]
                    for j, letter in enumerate(w):
                        steps.append(_dart_from(gflower, pools[letter].pop(0), c))
                        if j < len(w) - 1:
                            steps.append(_dart_from(gflower, pools[G.identity].pop(0), c).reversed())
                trails[r_edge] = Trail(tuple(steps))
    im = Immersion(vmap, trails, {})
    assert verify_immersion(gflower, rich, im)
    return rich, im


@dataclass(frozen=True)
class ZeroFlower:
    shift: dict
    pattern: LabeledGraph
    immersion: Immersion


def extract_zero_flower(g: LabeledGraph, center=None) -> ZeroFlower:
    """Shift each petal by its most common label so that a ``({1}, k, n)``-rich flower is a subgraph.

    ``g`` must be a flower whose petals have equal multiplicity ``m``; then
    ``k = m // |group|`` and pigeonhole gives ``k`` equal labels per petal.
    Ties between labels go to the least element index.
    """
    G = g.group
    shape = flower_shape(g, center)
    m = sum(len(es) for es in shape.bundles[shape.petals[0]].values())
    k = m // G.order
    if k < 1:
        raise PreconditionError(f"petal multiplicity {m} is below |group| = {G.order}")
    shift = {}
    pattern = rich_flower(G, k, len(shape.petals), G.trivial_subgroup)
    pshape = flower_shape(pattern, CENTER)
    vmap = {CENTER: shape.center}
    trails = {}
    for i, p in enumerate(shape.petals):
        counts = Counter({lab: len(es) for lab, es in shape.bundles[p].items()})
        alpha = min(counts, key=lambda lab: (-counts[lab], lab))
        if alpha != G.identity:
            shift[p] = alpha
        rp = petal_name(i + 1)
        vmap[rp] = p
        for pe, ge in zip(pshape.bundles[rp][G.identity], shape.bundles[p][alpha]):
            trails[pe] = Trail((_dart_from(g, ge, shape.center),))
    im = Immersion(vmap, trails, shift)
    assert verify_immersion(g, pattern, im)
    return ZeroFlower(shift, pattern, im)


def restrict_flower(pattern: LabeledGraph, im: Immersion, k: int, n: int):
    """Keep the first ``n`` petals and the first ``k`` edges of every label on each.

    Returns a freshly built flower over the same label set and the matching immersion.
    """
    G = pattern.group
    shape = flower_shape(pattern)
    if len(shape.petals) < n:
        raise PreconditionError(f"flower has only {len(shape.petals)} petals, need {n}")
    labels = sorted(shape.bundles[shape.petals[0]])
    for p in shape.petals[:n]:
        if any(len(shape.bundles[p].get(lab, ())) < k for lab in labels):
            raise PreconditionError(f"petal {p!r} has fewer than {k} edges of some label")
    edges = []
    new_center = CENTER
    verts = [new_center] + [petal_name(i + 1) for i in range(n)]
    source = []
    for i, p in enumerate(shape.petals[:n]):
        for lab in labels:
            for e in shape.bundles[p][lab][:k]:
                edges.append((new_center, petal_name(i + 1), lab))
                source.append(e)
    new = LabeledGraph.build(G, verts, edges)
    vmap = {new_center: im.vertex_map[shape.center]}
    for i, p in enumerate(shape.petals[:n]):
        vmap[petal_name(i + 1)] = im.vertex_map[p]
    trails = {}
    for new_e, old_e in enumerate(source):
        forward = pattern.edges[old_e][0] == shape.center
        trails[new_e] = im.branch_trail(old_e, forward)
    return new, Immersion(vmap, trails, dict(im.shift), im.audit)


def flower_from_core(g: LabeledGraph, S, k: int, n: int, check: bool = True):
    """An unlabeled ``(k, n)``-flower immersion with all branch vertices in ``S``.

    Candidates for the center are tried in order of decreasing degree; the
    ``n`` petals are the next highest-degree vertices of ``S``.  One max-flow
    from the center to a super-sink (capacity ``k`` per petal) yields the
    ``kn`` edge-disjoint trails; if it falls short, other petal sets are tried.
    Returns ``(pattern, immersion)``; labels are ignored throughout.
    """
    S = sorted_vertices(set(S))
    for v in S:
        g.check_vertex(v)
    if len(S) <= n:
        raise PreconditionError(f"|S| = {len(S)} must exceed n = {n}")
    if check:
        for a, b in itertools.combinations(S, 2):
            if edge_connectivity(g, a, b, limit=k * n) < k * n:
                raise PreconditionError(f"{a!r} and {b!r} are not {k * n}-edge-connected")
    ranked = sorted(S, key=lambda v: (-degree(g, v), vkey(v)))
    pattern = plain_flower(k, n, g.group)
    pshape = flower_shape(pattern, CENTER)
    for center in ranked:
        rest = [v for v in ranked if v != center]
        for petals in itertools.combinations(rest, n):
            result = _route_flower(g, center, list(petals), k)
            if result is None:
                continue
            vmap = {CENTER: center}
            trails = {}
            for i, p in enumerate(petals):
                rp = petal_name(i + 1)
                vmap[rp] = p
                for pe, steps in zip(pshape.bundles[rp][g.group.identity], result[p]):
                    trails[pe] = Trail(tuple(Dart(e, f) for e, f in steps))
            im = Immersion(vmap, trails, {})
            assert verify_immersion(g, pattern, im, ignore_labels=True)
            return pattern, im
    raise PreconditionError("could not route a flower inside S")


def _route_flower(g: LabeledGraph, center, petals, k):
    net = FlowNetwork()
    for eid, (u, v, _) in g.edges.items():
        if u != v:
            net.add_arc(u, v, 1, 1, eid)
    sink = ("__sink__",)
    for p in petals:
        net.add_arc(p, sink, k, 0, "sink")
    value = net.max_flow(center, sink)
    if value < k * len(petals):
        return None
    by_petal = {p: [] for p in petals}
    for p, steps in flow_walks(net, center, "sink", value):
        by_petal[p].append(steps)
    return by_petal
