"""Certificates, the value function, container systems and tree-cut decompositions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .balance import frustration
from .conn import (
    boundary,
    contract,
    degree,
    edge_block_of,
    internal_edges,
    is_fully_connected,
    is_two_edge_connected,
    min_cut,
    t_cores,
)
from .errors import (
    InvalidCertificate,
    InvalidParameter,
    NoProperSubgroup,
    PreconditionError,
    RichFlowerFound,
)
from .flower import flower_from_core, rich_flower
from .group import FiniteGroup, Subgroup, is_proper
from .immerse import DEFAULT_BUDGET, forbids
from .lgraph import Dart, LabeledGraph, shifted_label, sorted_vertices, vkey
from .pack import enrich_flower, enrichment_sizes


def theorem_t(group: FiniteGroup, k: int, n: int) -> int:
    """``4 k n |group|^(6 + floor(log2 |group|))``."""
    if k < 1 or n < 1:
        raise InvalidParameter("k and n must be positive")
    m = group.order
    L = int(math.floor(math.log2(m))) if m > 1 else 0
    return 4 * k * n * m ** (6 + L)


def _key(S) -> list:
    return [vkey(v) for v in sorted_vertices(S)]


# --- certificates and values ---------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Edges ``edges`` with ``delta(bag) ⊆ edges ⊆ delta(bag) ∪ E(bag)`` and a shift
    after which every other internal edge is labeled in the proper ``subgroup``."""

    bag: frozenset
    edges: frozenset
    shift: dict
    subgroup: Subgroup


def certificate_value(g: LabeledGraph, c: Certificate) -> int:
    """``|delta(B)| + 2 |X ∩ E(B)|`` after checking the certificate conditions."""
    B = set(c.bag)
    for v in B:
        g.check_vertex(v)
    d = boundary(g, B)
    inner = internal_edges(g, B)
    X = set(c.edges)
    if not d <= X:
        raise InvalidCertificate(f"boundary edges {sorted(d - X)} are missing from X", "boundary")
    if not X <= d | inner:
        raise InvalidCertificate(f"edges {sorted(X - d - inner)} are neither boundary nor internal", "subset")
    if c.subgroup.parent != g.group or not is_proper(c.subgroup):
        raise InvalidCertificate("the subgroup must be a proper subgroup of the labeling group", "proper")
    bad = [e for e in sorted(inner - X) if shifted_label(g, Dart(e, True), c.shift) not in c.subgroup]
    if bad:
        raise InvalidCertificate(f"internal edges {bad} are labeled outside the subgroup", "labels")
    return len(d) + 2 * len(X & inner)


def set_value(g: LabeledGraph, B: Iterable) -> tuple:
    """``(val(B), Certificate)``: the least certificate value over proper subgroups and shifts.

    Only maximal proper subgroups need to be tried.  A shift matters only up to
    the right coset ``H sigma(v)`` at each vertex; the first component's root is
    fixed to the identity, which loses nothing because the candidate subgroups
    are closed under conjugation.
    """
    G = g.group
    B = set(B)
    for v in B:
        g.check_vertex(v)
    subgroups = G.maximal_proper_subgroups
    if not subgroups:
        raise NoProperSubgroup(f"{G!r} has no proper subgroup")
    d = boundary(g, B)
    inner = internal_edges(g, B)
    best = None
    for H in sorted(subgroups, key=lambda h: (-h.order, sorted(h.elements))):
        total, sigma = frustration(g, B, H, fix_first_root=True)
        if best is None or total < best[0]:
            best = (total, H, sigma)
        if total == 0:
            break
    total, H, sigma = best
    sigma = {v: a for v, a in sigma.items() if a != G.identity}
    X = set(d) | {e for e in inner if shifted_label(g, Dart(e, True), sigma) not in H}
    cert = Certificate(frozenset(B), frozenset(X), sigma, H)
    value = certificate_value(g, cert)
    assert value == len(d) + 2 * total
    return value, cert


def fixed_shift_value(g: LabeledGraph, B: Iterable, shift: dict) -> Optional[tuple]:
    """Best certificate for ``B`` with the shift held fixed: ``(value, X, subgroup)`` or ``None``."""
    G = g.group
    B = set(B)
    d = boundary(g, B)
    inner = internal_edges(g, B)
    labels = {e: shifted_label(g, Dart(e, True), shift) for e in inner}
    best = None
    for H in sorted(G.maximal_proper_subgroups, key=lambda h: (-h.order, sorted(h.elements))):
        bad = {e for e, lab in labels.items() if lab not in H}
        value = len(d) + 2 * len(bad)
        if best is None or value < best[0]:
            best = (value, frozenset(d | bad), H)
    return best


# --- tree-cut decompositions -----------------------------------------------------


@dataclass(frozen=True)
class TreeCutDecomposition:
    """A tree on ``nodes`` with edges ``tree_edges`` and a bag (vertex set) per node."""

    nodes: tuple
    tree_edges: tuple
    bags: dict

    def neighbors(self, node) -> list:
        out = [b for a, b in self.tree_edges if a == node] + [a for a, b in self.tree_edges if b == node]
        return sorted(out)

    def bag_of(self, v):
        for node in self.nodes:
            if v in self.bags[node]:
                return node
        raise InvalidParameter(f"vertex {v!r} is in no bag")


def check_tree_cut(g: LabeledGraph, d: TreeCutDecomposition) -> Optional[str]:
    """``None`` if ``d`` is a tree-cut decomposition of ``g``, else the violated condition."""
    nodes = set(d.nodes)
    if len(nodes) != len(d.nodes) or not nodes:
        return "tree nodes must be distinct and nonempty"
    if set(d.bags) != nodes:
        return "every node needs exactly one bag"
    for a, b in d.tree_edges:
        if a not in nodes or b not in nodes or a == b:
            return f"tree edge ({a}, {b}) is invalid"
    if len(d.tree_edges) != len(nodes) - 1:
        return "tree has the wrong number of edges"
    root = d.nodes[0]
    seen, stack = {root}, [root]
    while stack:
        u = stack.pop()
        for w in d.neighbors(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if seen != nodes:
        return "tree is not connected"
    covered = set()
    for node in d.nodes:
        bag = set(d.bags[node])
        if covered & bag:
            return f"bag of node {node} overlaps another bag"
        covered |= bag
    if covered != set(g.vertices):
        return "bags do not partition the vertex set"
    return None


def _branches(d: TreeCutDecomposition, node) -> dict:
    """For each tree neighbor of ``node``, the union of bags on its side."""
    out = {}
    for nb in d.neighbors(node):
        seen, stack = {node, nb}, [nb]
        verts = set(d.bags[nb])
        while stack:
            u = stack.pop()
            for w in d.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
                    verts |= set(d.bags[w])
        out[nb] = verts
    return out


def torso(g: LabeledGraph, d: TreeCutDecomposition, node):
    """Torso of the bag at ``node``: each branch of the tree is identified to ``("new", neighbor)``.

    Parallel edges are kept; loops at new vertices are dropped.  Returns
    ``(graph, new_vertices)``.
    """
    if node not in d.bags:
        raise InvalidParameter(f"unknown tree node {node!r}")
    h = g
    new = []
    for nb, verts in _branches(d, node).items():
        name = ("new", nb)
        h = contract(h, verts, name)
        new.append(name)
    return h, new


@dataclass(frozen=True)
class BagReport:
    node: object
    bag: frozenset
    outcome: Optional[int]
    high_degree: tuple
    new_high_degree: tuple
    value: Optional[int] = None
    cover: Optional[frozenset] = None
    subgroup: Optional[Subgroup] = None


@dataclass(frozen=True)
class StructureReport:
    ok: bool
    t: int
    bound: int
    bags: tuple

    def __bool__(self):
        return self.ok


def verify_structure(g: LabeledGraph, shift: dict, d: TreeCutDecomposition, t: int, bound: int) -> StructureReport:
    """Check every bag for a sparse torso (outcome 1) or a certificate under ``shift`` (outcome 2).

    Outcome 1: at most ``bound`` torso vertices of degree above ``t``, none of them new.
    Outcome 2: some ``X`` makes ``(X, shift)`` a certificate of value at most ``t``;
    given the shift this is decided exactly.
    """
    problem = check_tree_cut(g, d)
    if problem:
        raise InvalidParameter(f"malformed decomposition: {problem}")
    for v in shift:
        g.check_vertex(v)
    reports = []
    for node in d.nodes:
        h, new = torso(g, d, node)
        high = tuple(v for v in h.vertices if degree(h, v) > t)
        new_high = tuple(v for v in high if v in new)
        outcome = 1 if len(high) <= bound and not new_high else None
        best = fixed_shift_value(g, d.bags[node], shift) if g.group.order > 1 else None
        if outcome is None and best is not None and best[0] <= t:
            outcome = 2
        value, cover, sub = best if best is not None else (None, None, None)
        reports.append(BagReport(node, frozenset(d.bags[node]), outcome, high, new_high, value, cover, sub))
    return StructureReport(all(r.outcome is not None for r in reports), t, bound, tuple(reports))


# --- containers ------------------------------------------------------------------


@dataclass(frozen=True)
class ContainerSystem:
    containers: tuple  # of frozenset
    target_cores: tuple  # of frozenset

    def is_container_system(self) -> bool:
        return all(any(S <= C for C in self.containers) for S in self.target_cores)

    def is_disjoint(self) -> bool:
        seen = set()
        for C in self.containers:
            if seen & C:
                return False
            seen |= C
        return True


def is_refined(g: LabeledGraph, C) -> bool:
    return any(is_fully_connected(g, v, C) for v in sorted_vertices(C))


def system_value(g: LabeledGraph, system: ContainerSystem) -> int:
    return max((set_value(g, C)[0] for C in system.containers), default=0)


def refine_containers(g: LabeledGraph, cores, initial: ContainerSystem, t: int) -> ContainerSystem:
    """A refined container system with pairwise disjoint sets and value at most ``t``.

    Local search mirroring a potential argument: drop containers inside others
    or holding no core, shrink one of two overlapping containers (the one whose
    difference does not raise its value), and split a container with no vertex
    fully connected to its boundary into least minimum-cut sides around its cores.
    """
    cores = tuple(frozenset(S) for S in cores)
    system = ContainerSystem(tuple(frozenset(C) for C in initial.containers), cores)
    if not system.is_container_system():
        raise InvalidParameter("initial sets do not contain every core")
    values = {}

    def val(C):
        if C not in values:
            values[C] = set_value(g, C)[0]
        return values[C]

    over = [sorted_vertices(C) for C in system.containers if val(C) > t]
    if over:
        raise InvalidParameter(f"containers {over} have value above {t}")
    current = sorted(set(system.containers), key=_key)
    V = set(g.vertices)
    while True:
        current = sorted(set(current), key=_key)
        # drop contained or idle containers
        keep = [
            C for C in current
            if any(S <= C for S in cores) and not any(C < D for D in current)
        ]
        if keep != current:
            current = keep
            continue
        move = None
        for i, B in enumerate(current):
            for C in current[i + 1:]:
                if B & C:
                    if val(B - C) <= val(B):
                        move = (B, B - C)
                    else:
                        assert val(C - B) <= val(C), "value is posimodular"
                        move = (C, C - B)
                    break
            if move:
                break
        if move:
            old, new = move
            current = [new if C == old else C for C in current]
            continue
        split = None
        for C in current:
            if is_refined(g, C):
                continue
            need = len(boundary(g, C))
            parts = []
            for S in cores:
                if S <= C:
                    v = sorted_vertices(S)[0]
                    cut, side = min_cut(g, {v}, V - C)
                    assert cut < need and S <= side
                    parts.append(frozenset(side))
            split = (C, parts)
            break
        if split:
            old, parts = split
            assert all(val(A) < val(old) for A in parts)
            current = [C for C in current if C != old] + parts
            continue
        break
    out = ContainerSystem(tuple(current), cores)
    assert out.is_container_system() and out.is_disjoint()
    assert all(val(C) <= t and is_refined(g, C) for C in out.containers)
    return out


def minimal_cut_closure(g: LabeledGraph, S, t: int) -> frozenset:
    """An inclusion-minimal ``C ⊇ S`` with ``|delta(C)| <= t``, shrinking from ``V`` by min-cut probes."""
    S = set(S)
    C = set(g.vertices)
    changed = True
    while changed:
        changed = False
        for w in sorted_vertices(C - S):
            if w not in C:
                continue
            value, side = min_cut(g, S, (set(g.vertices) - C) | {w})
            if value <= t:
                C = side
                changed = True
    return frozenset(C)


def _sparse_closure(g: LabeledGraph, cores, t: int, n: int) -> frozenset:
    """Cut closure of the first core (largest first) that keeps at most ``n`` high-degree vertices.

    A largest core's closure can swallow high-degree vertices of other cores,
    so every core is tried; the largest core's closure is the fallback.
    """
    high = {v for v in g.vertices if degree(g, v) > t}
    first = None
    for S in cores:
        C = minimal_cut_closure(g, S, t)
        if len(high & C) <= n:
            return C
        first = first or C
    return first


def build_tree_cut(g: LabeledGraph, containers, t: int, n: int) -> TreeCutDecomposition:
    """Tree-cut decomposition by repeatedly contracting around a largest ``t``-core.

    A core with more than ``n`` vertices is contracted together with its
    container; a smaller one with an inclusion-minimal superset of boundary at
    most ``t``.  Each contracted set becomes a leaf bag when the contractions
    are undone.  ``containers`` must be pairwise disjoint and refined.
    """
    if not is_two_edge_connected(g):
        raise PreconditionError("graph is not 2-edge-connected")
    remaining = [frozenset(C) for C in containers]
    cur = g
    steps = []
    while True:
        if not is_two_edge_connected(cur):
            raise AssertionError("contraction broke 2-edge-connectivity")
        cores = t_cores(cur, t).cores
        if not cores:
            break
        S = cores[0]
        if len(S) > n:
            holders = [C for C in remaining if S <= C]
            if not holders:
                raise PreconditionError(f"no container holds the core {sorted_vertices(S)}")
            C = holders[0]
            remaining.remove(C)
        else:
            C = _sparse_closure(cur, cores, t, n)
        if len(C) == len(cur.vertices) and len(C) == 1:
            break
        new = ("contracted", len(steps))
        steps.append((C, new))
        cur = contract(cur, C, new)
    nodes = [0]
    bags = {0: set(cur.vertices)}
    edges = []
    for C, new in reversed(steps):
        home = next(node for node in nodes if new in bags[node])
        bags[home].discard(new)
        leaf = len(nodes)
        nodes.append(leaf)
        bags[leaf] = set(C)
        edges.append((home, leaf))
    d = TreeCutDecomposition(tuple(nodes), tuple(edges), {k: frozenset(v) for k, v in bags.items()})
    assert check_tree_cut(g, d) is None
    return d


# --- certificates around cores and the full pipeline ---------------------------------


@dataclass(frozen=True)
class CoreCertificate:
    bag: frozenset
    certificate: Certificate
    value: int
    method: str


def core_certificate(g: LabeledGraph, S, k: int, n: int, t: int, budget: Optional[int] = None) -> CoreCertificate:
    """A set ``B ⊇ S`` with a certificate of value at most ``t``.

    First tries the flower route: a large flower inside ``S``, enriched until it
    either becomes a rich flower (raised as ``RichFlowerFound``) or yields a
    small cover of the center's edge-block.  When that route's hypotheses fail
    (typically because ``t`` is far below the theorem's value), falls back to the
    best of ``S``, its minimal cut closure and ``V``.
    """
    S = frozenset(S)
    G = g.group
    sizes = enrichment_sizes(G.order, k, n)
    try:
        pattern, im = flower_from_core(g, S, sizes["k_in"], sizes["n_in"])
    except PreconditionError:
        pattern = None
    if pattern is not None:
        out = enrich_flower(g, pattern, im, k, n, budget=budget)
        if out.kind == "rich":
            raise RichFlowerFound("the core carries a rich flower immersion", out.pattern, out.immersion)
        X = set(out.cover)
        rest = g.delete_edges(X)
        B = edge_block_of(rest, out.center)
        Xp = frozenset(boundary(g, B) | (X & internal_edges(g, B)))
        cert = Certificate(frozenset(B), Xp, dict(out.shift), out.subgroup)
        value = certificate_value(g, cert)
        assert value <= 2 * len(X)
        if S <= B and value <= t:
            return CoreCertificate(frozenset(B), cert, value, "flower")
    candidates = [S, minimal_cut_closure(g, S, t), frozenset(g.vertices)]
    best = None
    for B in candidates:
        value, cert = set_value(g, B)
        if best is None or value < best.value:
            best = CoreCertificate(frozenset(B), cert, value, "direct")
    if best.value > t:
        raise PreconditionError(f"no certificate of value at most {t} found around core {sorted_vertices(S)}")
    return best


@dataclass(frozen=True)
class StructureResult:
    """``kind`` is ``"decomposition"`` or ``"rich-flower"`` (with ``witness``)."""

    kind: str
    t: int
    bound: int
    hypothesis: str
    override_t: bool
    shift: dict = field(default_factory=dict)
    decomposition: Optional[TreeCutDecomposition] = None
    report: Optional[StructureReport] = None
    containers: tuple = ()
    witness: Optional[RichFlowerFound] = None
    notes: tuple = ()


def structure_decompose(
    g: LabeledGraph,
    k: int,
    n: int,
    override_t: Optional[int] = None,
    high_degree_bound: Optional[int] = None,
    budget: Optional[int] = None,
) -> StructureResult:
    """Shift and tree-cut decomposition where every bag has a sparse torso or a cheap certificate.

    ``high_degree_bound`` defaults to ``n|group|``; with ``n`` the result instead
    matches the hypothesis of the forbidding direction.  With ``override_t``
    the guarantees are only those checked by the verifier.
    """
    G = g.group
    if G.order < 2:
        raise NoProperSubgroup("the labeling group must have a proper subgroup")
    if not is_two_edge_connected(g):
        raise PreconditionError("graph is not 2-edge-connected")
    t = theorem_t(G, k, n) if override_t is None else override_t
    bound = n * G.order if high_degree_bound is None else high_degree_bound
    hypothesis = "theorem" if bound == n * G.order else "converse" if bound == n else "custom"
    notes = ()
    if override_t is not None:
        notes = (f"t overridden to {t}; theorem guarantees hold only at t = {theorem_t(G, k, n)}",)
    large = [S for S in t_cores(g, t).cores if len(S) > bound]
    initial = []
    for S in large:
        try:
            cc = core_certificate(g, S, k, n, t, budget)
        except RichFlowerFound as found:
            return StructureResult("rich-flower", t, bound, hypothesis, override_t is not None, witness=found, notes=notes)
        initial.append(cc.bag)
    system = refine_containers(g, large, ContainerSystem(tuple(initial), tuple(large)), t)
    shift = {}
    for C in sorted(system.containers, key=_key):
        _, cert = set_value(g, C)
        shift.update({v: a for v, a in cert.shift.items() if v in C})
    d = build_tree_cut(g, system.containers, t, bound)
    report = verify_structure(g, shift, d, t, bound)
    assert report.ok, "decomposition failed its own verification"
    return StructureResult(
        "decomposition", t, bound, hypothesis, override_t is not None, shift, d, report, system.containers, notes=notes
    )


def check_converse(
    g: LabeledGraph, shift: dict, d: TreeCutDecomposition, t: int, n: int, budget: Optional[int] = DEFAULT_BUDGET
) -> Optional[bool]:
    """Whether ``g`` forbids the ``(group, t+1, n)``-rich flower, given a verified decomposition.

    ``False`` would contradict the forbidding direction and signals a bug.
    """
    report = verify_structure(g, shift, d, t, n)
    if not report.ok:
        bad = [r.node for r in report.bags if r.outcome is None]
        raise PreconditionError(f"bags {bad} satisfy neither outcome")
    return forbids(g, rich_flower(g.group, t + 1, n), budget)


def to_dot(d: TreeCutDecomposition, report: Optional[StructureReport] = None) -> str:
    """Graphviz source for the decomposition tree, one node per bag."""
    outcome = {r.node: r.outcome for r in report.bags} if report else {}
    lines = ["graph decomposition {", "  node [shape=box];"]
    for node in d.nodes:
        bag = ", ".join(str(v) for v in sorted_vertices(d.bags[node]))
        tag = f"\\noutcome {outcome[node]}" if outcome.get(node) else ""
        lines.append(f'  n{node} [label="{node}: {{{bag}}}{tag}"];')
    for a, b in d.tree_edges:
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
