"""Fast invariant checks runnable from the command line."""
from __future__ import annotations

import itertools
import random
from typing import Callable, List

from .conn import boundary, internal_edges, is_two_edge_connected
from .decomp import set_value, structure_decompose, verify_structure
from .fixtures import planted_clusters, random_labeled_graph
from .flower import rich_flower
from .group import make_cyclic, make_symmetric
from .immerse import find_immersion
from .lgraph import Dart, Trail, inverse, shift_by, shifted_label, trail_label


def _group_axioms(G) -> List[str]:
    bad = []
    els = list(G.elements)
    for a, b, c in itertools.product(els, repeat=3):
        if G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)):
            bad.append(f"{G.name}: associativity fails at {(a, b, c)}")
            break
    for a in els:
        if G.mul(a, G.inv(a)) != G.identity or G.mul(G.identity, a) != a:
            bad.append(f"{G.name}: identity or inverse fails at {a}")
    for H in G.subgroups:
        if G.order % H.order:
            bad.append(f"{G.name}: subgroup order {H.order} does not divide {G.order}")
    return bad


def _shift_round_trip(rng, G) -> List[str]:
    g = random_labeled_graph(rng, G, 4, 6)
    sigma = {v: rng.randrange(G.order) for v in g.vertices}
    back = shift_by(shift_by(g, sigma), {v: G.inv(a) for v, a in sigma.items()})
    bad = [] if back.edges == g.edges else [f"{G.name}: shifting does not invert"]
    e = next(iter(g.edges))
    t = Trail((Dart(e, True),))
    if trail_label(g, inverse(t)) != G.inv(trail_label(g, t)):
        bad.append(f"{G.name}: reversed trail label is not the inverse")
    if shifted_label(g, Dart(e, True), sigma) != shift_by(g, sigma).edges[e][2]:
        bad.append(f"{G.name}: shifted label disagrees with shifted graph")
    return bad


def _brute_value(g, B) -> int:
    G = g.group
    inner = sorted(internal_edges(g, B))
    best = None
    Bl = sorted(B)
    for vals in itertools.product(G.elements, repeat=len(Bl)):
        sigma = dict(zip(Bl, vals))
        labels = [shifted_label(g, Dart(e, True), sigma) for e in inner]
        for H in G.maximal_proper_subgroups:
            cost = sum(1 for a in labels if a not in H)
            best = cost if best is None else min(best, cost)
    return len(boundary(g, B)) + 2 * best


def run_selftest(rng: random.Random, log=None) -> List[str]:
    """Return a list of failure descriptions (empty when everything holds)."""
    failures: List[str] = []

    def check(name: str, fn: Callable[[], List[str]]):
        found = fn()
        failures.extend(found)
        if log is not None:
            print(f"{'ok  ' if not found else 'FAIL'} {name}", file=log)

    groups = [make_cyclic(m) for m in range(1, 7)] + [make_symmetric(3)]
    check("group axioms", lambda: [b for G in groups for b in _group_axioms(G)])
    check("shift round trip", lambda: [b for G in groups for b in _shift_round_trip(rng, G)])

    def immersion_checks():
        Z2 = make_cyclic(2)
        g = random_labeled_graph(rng, Z2, 3, 5, loops=False)
        got = find_immersion(g, g).status
        return [] if got == "found" else [f"graph does not immerse into itself ({got})"]

    check("self immersion", immersion_checks)

    def value_checks():
        bad = []
        for G in (make_cyclic(2), make_cyclic(3), make_symmetric(3)):
            g = random_labeled_graph(rng, G, 4, 7)
            B = set(rng.sample(list(g.vertices), 3))
            if set_value(g, B)[0] != _brute_value(g, B):
                bad.append(f"{G.name}: coset value differs from brute force")
        return bad

    check("value function", value_checks)

    def decomposition_checks():
        Z2 = make_cyclic(2)
        g = planted_clusters(rng, Z2, sizes=(4, 4), multiplicity=2, links=2)
        if not is_two_edge_connected(g):
            return ["fixture is not 2-edge-connected"]
        res = structure_decompose(g, 1, 1, override_t=4)
        if res.kind != "decomposition":
            return ["planted fixture produced a rich flower"]
        report = verify_structure(g, res.shift, res.decomposition, res.t, res.bound)
        bad = [] if report.ok else ["decomposition fails verification"]
        if find_immersion(rich_flower(Z2, 1, 1), rich_flower(Z2, 1, 1)).status != "found":
            bad.append("rich flower does not immerse into itself")
        return bad

    check("decomposition round trip", decomposition_checks)
    return failures
