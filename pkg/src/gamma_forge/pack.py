"""Circuits labeled outside a subgroup: packing, covering, relabeling, uncrossing and flower enrichment."""
from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

from .conn import FlowNetwork, block_subgraph, ear_decomposition, flow_walks
from .errors import BudgetExceeded, InvalidParameter, PreconditionError, QualifyingCircuitExists
from .flower import (
    CENTER,
    extract_zero_flower,
    flower_shape,
    generating_flower,
    generating_to_rich,
    restrict_flower,
)
from .group import Subgroup, generate_subgroup, is_proper
from .immerse import Budget, Immersion, compose, edge_classes, verify_immersion
from .lgraph import (
    Dart,
    LabeledGraph,
    Trail,
    compose_shifts,
    inverse,
    shift_by,
    shifted_label,
    trail_label,
    transitions,
)

# Cover certificates are cross-checked by full circuit enumeration up to this many edges.
ENUMERATION_CERTIFY_LIMIT = 12


def _check_subgroup(g: LabeledGraph, H: Subgroup) -> None:
    if H.parent != g.group:
        raise InvalidParameter("subgroup belongs to a different group")
    if not is_proper(H):
        raise InvalidParameter("no circuit is labeled outside the whole group")


# --- circuit enumeration -----------------------------------------------------


def enumerate_circuits(g: LabeledGraph, x, x_simple: bool = False) -> Iterator[Trail]:
    """All circuits beginning at ``x``, each once up to inversion.

    With ``x_simple`` only circuits that meet ``x`` at their ends are produced.
    Exponential; intended for small graphs and certification.
    """
    g.check_vertex(x)
    steps: list = []
    used: set = set()

    def dfs(u):
        for d in g.darts_from(u):
            if d.edge in used:
                continue
            w = g.head(d)
            used.add(d.edge)
            steps.append(d)
            if w == x:
                t = Trail(tuple(steps))
                if t.steps <= inverse(t).steps:
                    yield t
            if w != x or not x_simple:
                yield from dfs(w)
            steps.pop()
            used.discard(d.edge)

    yield from dfs(x)


def qualifying_circuits(g: LabeledGraph, x, H: Subgroup, x_simple: bool = False) -> Iterator[Trail]:
    for c in enumerate_circuits(g, x, x_simple):
        if trail_label(g, c) not in H:
            yield c


def _coset_shift(g: LabeledGraph, x, H: Subgroup):
    """Shift of the edge-block of ``x`` fixing ``x`` that zeroes a BFS tree.

    Returns ``(sigma, bad_edge)``; ``bad_edge`` is an edge of the block whose
    shifted label lies outside ``H`` (``None`` if there is none).
    """
    G = g.group
    block = block_subgraph(g, x)
    sigma = {x: G.identity}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for d in block.darts_from(u):
            w = block.head(d)
            if w not in sigma:
                sigma[w] = G.mul(sigma[u], block.label(d))
                queue.append(w)
    for e in sorted(block.edges):
        if shifted_label(block, Dart(e, True), sigma) not in H:
            return sigma, e
    return sigma, None


def has_qualifying_circuit(g: LabeledGraph, x, H: Subgroup) -> bool:
    """Whether some circuit beginning at ``x`` is labeled outside ``H``.

    Exact and polynomial: such a circuit exists iff the edge-block of ``x``
    cannot be shifted, keeping ``x`` fixed, to be labeled over ``H``.
    """
    g.check_vertex(x)
    return _coset_shift(g, x, H)[1] is not None


def _x_simple_part(g: LabeledGraph, c: Trail, H: Subgroup) -> Trail:
    """Cut a qualifying circuit at its inner visits to its start and keep a qualifying piece."""
    x = g.trail_tail(c)
    pieces, cur = [], []
    for d in c.steps:
        cur.append(d)
        if g.head(d) == x:
            pieces.append(Trail(tuple(cur)))
            cur = []
    for p in pieces:
        if trail_label(g, p) not in H:
            return p
    raise AssertionError("a circuit labeled outside H has a piece labeled outside H")


def find_qualifying_circuit(g: LabeledGraph, x, H: Subgroup) -> Optional[Trail]:
    """A circuit beginning at ``x``, meeting ``x`` only at its ends, labeled outside ``H``."""
    try:
        relabel_edge_block(g, x, H)
    except QualifyingCircuitExists as exc:
        return _x_simple_part(g, exc.witness, H)
    return None


# --- relabeling an edge-block ------------------------------------------------


def _paths_from(g: LabeledGraph, x, targets: list) -> list:
    """Edge-disjoint trails from ``x`` to each vertex in ``targets`` (repeats allowed), or ``None``."""
    net = FlowNetwork()
    for eid, (u, v, _) in g.edges.items():
        if u != v:
            net.add_arc(u, v, 1, 1, eid)
    sink = ("__sink__",)
    for t, c in Counter(targets).items():
        net.add_arc(t, sink, c, 0, "sink")
    value = net.max_flow(x, sink)
    if value < len(targets):
        return None
    walks = {}
    for end, steps in flow_walks(net, x, "sink", value):
        walks.setdefault(end, []).append([Dart(e, f) for e, f in steps])
    return [walks[t].pop(0) for t in targets]


def relabel_edge_block(g: LabeledGraph, x, H: Subgroup) -> dict:
    """Shift assignment, identity at ``x``, labeling the edge-block of ``x`` over ``H``.

    Follows an ear decomposition of the block from a cycle through ``x``: on
    each ear the internal vertices are shifted so every edge but the last has
    the identity label.  If the last edge's label falls outside ``H``, the ear
    closes into a circuit at ``x`` labeled outside ``H``, which is raised as
    the witness of ``QualifyingCircuitExists``.  Only block vertices are shifted.
    """
    g.check_vertex(x)
    _check_subgroup(g, H)
    G = g.group
    block = block_subgraph(g, x)
    sigma = {x: G.identity}
    if not block.edges:
        return {}
    dec = ear_decomposition(block, root=x)
    done: list = []
    for i, ear in enumerate(dec.ears):
        for d in ear.steps[:-1]:
            sigma[block.head(d)] = G.mul(sigma[block.tail(d)], block.label(d))
        if shifted_label(block, ear.last, sigma) not in H:
            witness = ear if i == 0 else _close_ear(block.restrict_edges(done), x, ear, block)
            assert trail_label(block, witness) not in H
            raise QualifyingCircuitExists(
                f"circuit through edges {sorted(witness.edges)} at {x!r} is labeled outside the subgroup", witness
            )
        done.extend(ear.edges)
    return {v: a for v, a in sigma.items() if a != G.identity}


def _close_ear(prefix: LabeledGraph, x, ear: Trail, g: LabeledGraph) -> Trail:
    a, b = g.trail_tail(ear), g.trail_head(ear)
    targets = [v for v in (a, b) if v != x]
    paths = _paths_from(prefix, x, targets) if targets else []
    assert paths is not None, "earlier ears form a 2-edge-connected graph"
    into = paths[0] if a != x else []
    back = paths[-1] if b != x else []
    return Trail(tuple(into) + ear.steps + tuple(Dart(d.edge, not d.forward) for d in reversed(back)))


# --- simple flowers, covers and their duality ---------------------------------


@dataclass(frozen=True)
class SimpleFlower:
    """Pairwise edge-disjoint circuits beginning at ``center``, each labeled outside ``forbidden``."""

    center: object
    forbidden: Subgroup
    circuits: tuple

    def __len__(self):
        return len(self.circuits)


def check_simple_flower(g: LabeledGraph, sf: SimpleFlower) -> Optional[str]:
    """``None`` if ``sf`` is valid in ``g``, else a description of the defect."""
    seen = set()
    for i, c in enumerate(sf.circuits):
        try:
            g.check_trail(c)
        except InvalidParameter as exc:
            return f"circuit {i}: {exc}"
        if g.trail_tail(c) != sf.center or g.trail_head(c) != sf.center:
            return f"circuit {i} does not begin and end at the center"
        if trail_label(g, c) in sf.forbidden:
            return f"circuit {i} is labeled inside the subgroup"
        if seen & c.edges:
            return f"circuit {i} shares an edge with an earlier circuit"
        seen |= c.edges
    return None


@dataclass(frozen=True)
class PackOrCover:
    """Exactly one of ``packing`` (size ``r``) and ``cover`` (at most ``2r - 2`` edges) is set."""

    r: int
    packing: Optional[SimpleFlower] = None
    cover: Optional[frozenset] = None
    certificate: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return "packing" if self.packing is not None else "cover"


def _greedy_packing(g: LabeledGraph, x, H: Subgroup, r: int) -> list:
    found, removed = [], set()
    while len(found) < r:
        c = find_qualifying_circuit(g.delete_edges(removed), x, H)
        if c is None:
            break
        found.append(c)
        removed |= c.edges
    return found


class _PackingSearch:
    """Exact search for ``r`` edge-disjoint qualifying circuits.

    A largest packing can always use circuits that meet ``x`` only at their
    ends (split a circuit at an inner visit to ``x``; one piece still
    qualifies).  The search branches on the least remaining edge at ``x``:
    either some circuit starts with it, or it and its interchangeable twins
    are unused.
    """

    def __init__(self, g: LabeledGraph, x, H: Subgroup, budget: Budget):
        self.g, self.x, self.H, self.budget = g, x, H, budget
        self.key_of = edge_classes(g)
        self.classes = {}
        for e in sorted(g.edges):
            self.classes.setdefault(self.key_of[e], []).append(e)
        self.failed = set()

    def _allowed(self, e, removed) -> bool:
        for f in self.classes[self.key_of[e]]:
            if f == e:
                return True
            if f not in removed:
                return False
        return True

    def run(self, r: int) -> Optional[list]:
        return self._search(frozenset(), r)

    def _search(self, removed: frozenset, m: int) -> Optional[list]:
        if m == 0:
            return []
        key = (removed, m)
        if key in self.failed:
            return None
        self.budget.tick()
        g, x = self.g, self.x
        at_x = [d for d in g.darts_from(x) if d.edge not in removed]
        if len(at_x) < 2 * m or not has_qualifying_circuit(g.delete_edges(removed), x, self.H):
            self.failed.add(key)
            return None
        e0 = min(d.edge for d in at_x)
        for c in self._circuits_from(Dart(e0, g.edges[e0][0] == x), removed):
            rest = self._search(removed | c.edges, m - 1)
            if rest is not None:
                return [c] + rest
        twins = {f for f in self.classes[self.key_of[e0]] if f not in removed}
        rest = self._search(removed | twins, m)
        if rest is not None:
            return rest
        self.failed.add(key)
        return None

    def _circuits_from(self, first: Dart, removed) -> Iterator[Trail]:
        g, x, G = self.g, self.x, self.g.group
        used = set(removed) | {first.edge}
        steps = [first]

        def dfs(u, acc):
            self.budget.tick()
            if u == x:
                if acc not in self.H:
                    yield Trail(tuple(steps))
                return
            for d in g.darts_from(u):
                if d.edge in used or not self._allowed(d.edge, used):
                    continue
                used.add(d.edge)
                steps.append(d)
                yield from dfs(g.head(d), G.mul(acc, g.label(d)))
                steps.pop()
                used.discard(d.edge)

        yield from dfs(g.head(first), g.label(first))


def find_simple_flower(g: LabeledGraph, x, H: Subgroup, r: int, budget: Optional[int] = None) -> Optional[SimpleFlower]:
    """A simple flower of size ``r`` for ``(x, H)``, or ``None`` if there is none.

    Raises ``BudgetExceeded`` if the exact search runs out of budget.
    """
    g.check_vertex(x)
    _check_subgroup(g, H)
    if r < 1:
        raise InvalidParameter("r must be positive")
    greedy = _greedy_packing(g, x, H, r)
    if len(greedy) == r:
        return SimpleFlower(x, H, tuple(greedy))
    found = _PackingSearch(g, x, H, Budget(budget)).run(r)
    return None if found is None else SimpleFlower(x, H, tuple(found))


def find_cover(
    g: LabeledGraph, x, H: Subgroup, r: Optional[int] = None, max_size: Optional[int] = None, budget: Optional[int] = None
) -> Optional[frozenset]:
    """A smallest edge set meeting every circuit at ``x`` labeled outside ``H``.

    Only sizes up to ``max_size`` (default ``2r - 2``) are tried; returns ``None``
    if none of those suffice.  Branching on the edges of one qualifying circuit
    per node with iterative deepening gives an exact minimum.
    """
    g.check_vertex(x)
    _check_subgroup(g, H)
    if max_size is None:
        if r is None:
            raise InvalidParameter("give r or max_size")
        max_size = 2 * r - 2
    b = Budget(budget)
    for size in range(max(max_size, -1) + 1):
        failed = set()
        X = _hitting_set(g, x, H, frozenset(), size, failed, b)
        if X is not None:
            return X
    return None


def _hitting_set(g, x, H, X, size, failed, budget):
    if X in failed:
        return None
    budget.tick()
    c = find_qualifying_circuit(g.delete_edges(X), x, H)
    if c is None:
        return X
    if len(X) < size:
        for e in sorted(c.edges):
            found = _hitting_set(g, x, H, X | {e}, size, failed, budget)
            if found is not None:
                return found
    failed.add(X)
    return None


def certify_cover(g: LabeledGraph, x, H: Subgroup, X) -> dict:
    """Evidence that no circuit at ``x`` labeled outside ``H`` survives deleting ``X``."""
    rest = g.delete_edges(X)
    cert = {"method": "edge-block shift", "holds": not has_qualifying_circuit(rest, x, H)}
    if len(rest.edges) <= ENUMERATION_CERTIFY_LIMIT:
        survivors = next(qualifying_circuits(rest, x, H), None)
        cert["enumeration"] = survivors is None
        cert["holds"] = cert["holds"] and survivors is None
    return cert


def erdos_posa(g: LabeledGraph, x, H: Subgroup, r: int, budget: Optional[int] = None) -> PackOrCover:
    """Either ``r`` edge-disjoint circuits at ``x`` labeled outside ``H`` or a cover of at most ``2r - 2`` edges.

    A packing is preferred when both exist.  ``BudgetExceeded`` signals that
    the search could not decide, which is distinct from either answer.
    """
    g.check_vertex(x)
    _check_subgroup(g, H)
    if r < 1:
        raise InvalidParameter("r must be positive")
    greedy = _greedy_packing(g, x, H, r)
    if len(greedy) == r:
        return _packing(g, x, H, r, greedy, "greedy")
    # a cover smaller than r rules out any packing of size r
    small = find_cover(g, x, H, max_size=r - 1, budget=budget)
    if small is None:
        found = _PackingSearch(g, x, H, Budget(budget)).run(r)
        if found is not None:
            return _packing(g, x, H, r, found, "exhaustive")
    X = small if small is not None else find_cover(g, x, H, r=r, budget=budget)
    if X is None:
        raise AssertionError("neither a packing nor a cover of size at most 2r-2 exists")
    cert = certify_cover(g, x, H, X)
    assert cert["holds"]
    cert["size"] = len(X)
    cert["bound"] = 2 * r - 2
    return PackOrCover(r, cover=frozenset(X), certificate=cert)


def _packing(g, x, H, r, circuits, how) -> PackOrCover:
    sf = SimpleFlower(x, H, tuple(circuits))
    assert check_simple_flower(g, sf) is None
    cert = {"method": how, "labels": [trail_label(g, c) for c in circuits]}
    return PackOrCover(r, packing=sf, certificate=cert)


# --- the vertex-splitting gadget -------------------------------------------


def vertex_split_gadget(g: LabeledGraph, x=None):
    """Replace every vertex by a clique on its edge-ends.

    Gadget vertices are ``(v, edge id, side)`` with side 0 for the tail end and 1
    for the head end; a loop owns both.  Clique edges get the identity label and
    each original edge becomes a matching edge ``(u, e, 0) -> (v, e, 1)`` with its
    label.  Matching edges take the gadget ids ``0 .. |E| - 1`` in the order of
    the original ids (see ``matching_edge_of``).  Returns ``(gadget, A)`` with
    ``A`` the clique of ``x`` (empty if ``x`` is ``None``).
    """
    G = g.group
    ends = {v: [] for v in g.vertices}
    for e, (u, v, _) in sorted(g.edges.items()):
        ends[u].append((u, e, 0))
        ends[v].append((v, e, 1))
    verts = [p for v in g.vertices for p in ends[v]]
    edges = [((u, e, 0), (v, e, 1), lab) for e, (u, v, lab) in sorted(g.edges.items())]
    for v in g.vertices:
        edges.extend((a, b, G.identity) for a, b in itertools.combinations(ends[v], 2))
    h = LabeledGraph.build(G, verts, edges)
    A = frozenset(ends[x]) if x is not None else frozenset()
    return h, A


def matching_edge_of(g: LabeledGraph, gadget_edge: int) -> Optional[int]:
    """Original edge of ``g`` behind a gadget edge id, ``None`` for clique edges.

    Ids are needed because a loop's matching edge and the clique edge joining
    its two ends have the same ends.
    """
    ids = sorted(g.edges)
    return ids[gadget_edge] if 0 <= gadget_edge < len(ids) else None


# --- uncrossing a simple flower from a flower immersion -----------------------


@dataclass(frozen=True)
class UncrossResult:
    flower: SimpleFlower
    moves: int
    crossing_trails: tuple  # pattern edge ids whose branch trails meet a circuit


def _oriented_branch_trails(pattern: LabeledGraph, im: Immersion) -> dict:
    center = flower_shape(pattern).center
    return {e: im.branch_trail(e, pattern.edges[e][0] == center) for e in sorted(pattern.edges)}


def non_branch_transitions(circuits, phi_transitions: set) -> int:
    return sum(len(transitions(c) - phi_transitions) for c in circuits)


def uncross_flower(g: LabeledGraph, pattern: LabeledGraph, im: Immersion, H: Subgroup, sf: SimpleFlower) -> UncrossResult:
    """Rewrite ``sf`` so that only branch trails holding a circuit's first or last edge meet it.

    Local search: pick the first branch trail (oriented from the center) that
    meets a circuit without holding an end edge, cut the first circuit it meets
    at the shared edge, and replace that circuit by a piece, by the trail's
    prefix followed by the circuit's tail part, or by the circuit's head part
    followed by the reversed prefix.  Each move strictly lowers the number of
    circuit transitions that are not transitions of the immersion.
    """
    if check_simple_flower(g, sf) is not None:
        raise PreconditionError(f"invalid simple flower: {check_simple_flower(g, sf)}")
    shape = flower_shape(pattern)
    x = im.vertex_map[shape.center]
    if sf.center != x:
        raise PreconditionError("the simple flower must begin at the branch center")
    branch = _oriented_branch_trails(pattern, im)
    phi = set()
    for t in branch.values():
        phi |= transitions(t)
    circuits = list(sf.circuits)
    moves = 0
    while True:
        before = non_branch_transitions(circuits, phi)
        step = _uncross_move(g, branch, circuits, H, x)
        if step is None:
            break
        idx, new = step
        circuits[idx] = new
        moves += 1
        after = non_branch_transitions(circuits, phi)
        assert after < before, "uncrossing move did not reduce foreign transitions"
    out = SimpleFlower(x, H, tuple(circuits))
    assert check_simple_flower(g, out) is None
    touched = set().union(*(c.edges for c in circuits)) if circuits else set()
    crossing = tuple(e for e, t in branch.items() if t.edges & touched)
    assert len(crossing) <= 2 * len(circuits)
    return UncrossResult(out, moves, crossing)


def _uncross_move(g, branch, circuits, H, x):
    ends = set()
    owner = {}
    for i, c in enumerate(circuits):
        ends |= {c.first.edge, c.last.edge}
        for e in c.edges:
            owner[e] = i
    for eid, t in branch.items():
        if t.edges & ends:
            continue
        j = next((j for j, d in enumerate(t.steps) if d.edge in owner), None)
        if j is None:
            continue
        dart = t.steps[j]
        idx = owner[dart.edge]
        c = circuits[idx]
        if dart not in c.steps:
            c = inverse(c)
        pos = c.steps.index(dart)
        c1, c2 = Trail(c.steps[:pos]), Trail(c.steps[pos:])
        if j == 0:
            new = c1 if trail_label(g, c1) not in H else c2
        else:
            t1 = Trail(t.steps[:j])
            cand = t1 + c2
            new = cand if trail_label(g, cand) not in H else c1 + inverse(t1)
        assert trail_label(g, new) not in H
        return idx, new
    return None


# --- enrichment ----------------------------------------------------------------


@dataclass(frozen=True)
class EnrichResult:
    """``kind`` is ``"enriched"`` (``pattern``/``immersion`` over ``subgroup``) or ``"cover"``.

    For a cover, ``shift`` labels the edge-block of the branch center in
    ``g`` minus ``cover`` over ``subgroup``.
    """

    kind: str
    subgroup: Subgroup
    pattern: Optional[LabeledGraph] = None
    immersion: Optional[Immersion] = None
    shift: Optional[dict] = None
    cover: Optional[frozenset] = None
    center: object = None
    audit: tuple = ()


def enrich_step(
    g: LabeledGraph,
    pattern: LabeledGraph,
    im: Immersion,
    k: int,
    n: int,
    r: Optional[int] = None,
    budget: Optional[int] = None,
) -> EnrichResult:
    """Grow the label subgroup of a generating-flower immersion, or find a small cover.

    ``pattern`` is a generating flower over a proper subgroup with ``2n`` petals
    and at least ``2k|group|`` edges per generator and petal.  The result is
    either a ``(k, n)`` generating flower over a strictly larger subgroup with
    the same branch center, or a shift and an edge set after whose deletion
    the center's edge-block is labeled over the original subgroup.
    """
    G = g.group
    shape = flower_shape(pattern)
    gens = sorted(shape.bundles[shape.petals[0]])
    H = generate_subgroup(G, gens)
    _check_subgroup(g, H)
    if not verify_immersion(g, pattern, im):
        raise PreconditionError("input is not a valid immersion of the pattern")
    if len(shape.petals) < 2 * n:
        raise PreconditionError(f"pattern has {len(shape.petals)} petals, need {2 * n}")
    need = 2 * k * G.order
    if any(len(shape.bundles[p].get(s, ())) < need for p in shape.petals for s in gens):
        raise PreconditionError(f"pattern needs at least {need} edges per generator and petal")
    r = n * k * (G.order - 1) if r is None else r
    g1 = shift_by(g, im.shift)
    x = im.vertex_map[shape.center]
    outcome = erdos_posa(g1, x, H, r, budget)
    log = [f"subgroup {sorted(H.elements)}: {outcome.kind} with r = {r}"]

    if outcome.kind == "cover":
        X = outcome.cover
        sigma2 = relabel_edge_block(g1.delete_edges(X), x, H)
        total = compose_shifts(G, im.shift, sigma2)
        log.append(f"cover {sorted(X)} of size {len(X)}")
        return EnrichResult("cover", H, shift=total, cover=X, center=x, audit=im.audit + tuple(log))

    plain_im = Immersion(im.vertex_map, im.trail_map, {}, im.audit)
    un = uncross_flower(g1, pattern, plain_im, H, outcome.packing)
    circuits = un.flower.circuits
    log.append(f"uncrossed in {un.moves} moves; {len(un.crossing_trails)} branch trails meet circuits")
    crossing = set(un.crossing_trails)
    petal_of = {}
    for p in shape.petals:
        for es in shape.bundles[p].values():
            for e in es:
                petal_of[e] = p
    hits = Counter(petal_of[e] for e in crossing)
    ranked = sorted(shape.petals, key=lambda p: -hits[p])
    dropped = set(ranked[:n])
    kept = [p for p in shape.petals if p not in dropped][:n]
    log.append(f"dropped petals {sorted(dropped, key=str)}")

    labels = Counter(trail_label(g1, c) for c in circuits)
    alpha = min(labels, key=lambda a: (-labels[a], a))
    pool = [c for c in circuits if trail_label(g1, c) == alpha]
    if len(pool) < n * k:
        raise AssertionError("pigeonhole guarantees nk circuits of one label")
    new_gens = sorted(set(gens) | {alpha})
    H2 = generate_subgroup(G, new_gens)
    new_pattern = generating_flower(G, new_gens, k, n, subgroup=H2)
    nshape = flower_shape(new_pattern)
    branch = _oriented_branch_trails(pattern, plain_im)
    vmap = {CENTER: x}
    trails = {}
    for i, p in enumerate(kept):
        np_ = nshape.petals[i]
        vmap[np_] = im.vertex_map[p]
        free = {s: [e for e in shape.bundles[p][s] if e not in crossing] for s in gens}
        for s in gens:
            for ne, pe in zip(nshape.bundles[np_][s], free[s][:k]):
                trails[ne] = branch[pe]
        spare = free[G.identity][k : 2 * k]
        assert len(spare) == k
        for ne, pe in zip(nshape.bundles[np_][alpha], spare):
            trails[ne] = pool.pop(0) + branch[pe]
        log.append(f"petal {p!r}: spare identity trails {spare} carry label {alpha}")
    new_im = Immersion(vmap, trails, dict(im.shift), im.audit + tuple(log))
    assert verify_immersion(g, new_pattern, new_im)
    return EnrichResult("enriched", H2, new_pattern, new_im, center=x, audit=new_im.audit)


@dataclass(frozen=True)
class EnrichOutcome:
    """``kind`` is ``"rich"`` (rich-flower ``pattern`` and ``immersion``) or ``"cover"``."""

    kind: str
    chain: tuple
    pattern: Optional[LabeledGraph] = None
    immersion: Optional[Immersion] = None
    subgroup: Optional[Subgroup] = None
    shift: Optional[dict] = None
    cover: Optional[frozenset] = None
    center: object = None


def enrichment_sizes(order: int, k: int, n: int) -> dict:
    """Flower sizes used along the enrichment loop."""
    L = int(math.floor(math.log2(order))) if order > 1 else 0
    return {
        "k_in": k * order ** (4 + L),
        "n_in": n * order,
        "k_seed": k * order ** 2 * (2 * order) ** L,
        "n_seed": n * 2 ** L,
        "levels": L,
    }


def enrich_flower(
    g: LabeledGraph, pattern: LabeledGraph, im: Immersion, k: int, n: int, budget: Optional[int] = None
) -> EnrichOutcome:
    """From an unlabeled flower immersion, a rich flower immersion or a small edge-block cover.

    ``pattern`` is a plain flower with at least ``k|group|^(4 + L)`` edges per
    petal and ``n|group|`` petals, ``L = floor(log2 |group|)``; labels of
    ``pattern`` are ignored.  Both outcomes keep the branch center.
    """
    G = g.group
    if not verify_immersion(g, pattern, im, ignore_labels=True):
        raise PreconditionError("input is not a valid flower immersion")
    shape = flower_shape(pattern)
    x = im.vertex_map[shape.center]
    sizes = enrichment_sizes(G.order, k, n)
    # pull the host labels back onto the pattern
    labeled = pattern.with_labels({e: trail_label(g, t) for e, t in im.trail_map.items()})
    base = Immersion(im.vertex_map, im.trail_map, {}, im.audit)
    zero = extract_zero_flower(labeled)
    cur_im = compose(base, zero.immersion, labeled)
    cur_pattern = zero.pattern
    K, N = sizes["k_seed"], sizes["n_seed"]
    cur_pattern, cur_im = restrict_flower(cur_pattern, cur_im, K, N)
    H = G.trivial_subgroup
    chain = [H]
    while H.order < G.order:
        step = enrich_step(g, cur_pattern, cur_im, K // (2 * G.order), N // 2, budget=budget)
        if step.kind == "cover":
            return EnrichOutcome("cover", tuple(chain), subgroup=H, shift=step.shift, cover=step.cover, center=x)
        K, N = K // (2 * G.order), N // 2
        cur_pattern, cur_im, H = step.pattern, step.immersion, step.subgroup
        chain.append(H)
    assert len(chain) - 1 <= sizes["levels"]
    gen_pattern, gen_im = restrict_flower(cur_pattern, cur_im, k * G.order ** 2, n)
    rich, to_rich = generating_to_rich(gen_pattern, k)
    final = compose(gen_im, to_rich, gen_pattern)
    assert verify_immersion(g, rich, final)
    assert final.vertex_map[CENTER] == x
    return EnrichOutcome("rich", tuple(chain), rich, final, center=x)
