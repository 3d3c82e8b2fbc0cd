"""Seeded random labeled graphs for tests, benchmarks and the self-test."""
from __future__ import annotations

import random
from typing import Optional

from .conn import is_two_edge_connected
from .group import FiniteGroup, Subgroup
from .lgraph import LabeledGraph


def random_labeled_graph(rng: random.Random, group: FiniteGroup, n_vertices: int, n_edges: int,
                         loops: bool = True) -> LabeledGraph:
    """Uniform endpoints and labels; parallel edges allowed, loops optional."""
    verts = list(range(n_vertices))
    triples = []
    for _ in range(n_edges):
        u = rng.choice(verts)
        v = rng.choice(verts) if loops else rng.choice([w for w in verts if w != u] or verts)
        triples.append((u, v, rng.randrange(group.order)))
    return LabeledGraph.build(group, verts, triples)


def random_two_edge_connected(rng: random.Random, group: FiniteGroup, n_vertices: int, extra_edges: int,
                              loops: bool = False) -> LabeledGraph:
    """A Hamiltonian cycle (or a doubled edge) plus random extra edges."""
    verts = list(range(n_vertices))
    order = verts[:]
    rng.shuffle(order)
    if n_vertices == 1:
        triples = []
    elif n_vertices == 2:
        triples = [(order[0], order[1], rng.randrange(group.order)) for _ in range(2)]
    else:
        triples = [(order[i], order[(i + 1) % n_vertices], rng.randrange(group.order)) for i in range(n_vertices)]
    g = random_labeled_graph(rng, group, n_vertices, extra_edges, loops)
    triples += list(g.edges.values())
    out = LabeledGraph.build(group, verts, triples)
    assert n_vertices == 1 or is_two_edge_connected(out)
    return out


def planted_clusters(
    rng: random.Random,
    group: FiniteGroup,
    sizes=(4, 4),
    multiplicity: int = 2,
    subgroup: Optional[Subgroup] = None,
    links: int = 2,
    noise: int = 0,
    sparse: int = 2,
) -> LabeledGraph:
    """Dense clusters balanced over ``subgroup`` (up to a hidden shift), joined in a ring.

    Every pair inside a cluster gets ``multiplicity`` parallel edges whose labels
    lie in ``subgroup`` after a random shift; ``noise`` random-label edges are
    added per cluster.  Consecutive clusters are joined by ``links`` edges and
    ``sparse`` degree-two vertices are threaded between random vertices.
    """
    H = sorted((subgroup or group.trivial_subgroup).elements)
    verts, triples, clusters = [], [], []
    nxt = 0
    for size in sizes:
        c = list(range(nxt, nxt + size))
        nxt += size
        verts += c
        clusters.append(c)
        sigma = {v: rng.randrange(group.order) for v in c}
        for i, u in enumerate(c):
            for v in c[i + 1:]:
                for _ in range(multiplicity):
                    h = rng.choice(H)
                    # shifted label sigma(u) * lab * sigma(v)^-1 = h
                    lab = group.mul(group.mul(group.inv(sigma[u]), h), sigma[v])
                    triples.append((u, v, lab))
        for _ in range(noise):
            u, v = rng.sample(c, 2) if size > 1 else (c[0], c[0])
            triples.append((u, v, rng.randrange(group.order)))
    m = len(clusters)
    pairs = [(i, (i + 1) % m) for i in range(m)] if m > 2 else [(0, 1)] if m == 2 else []
    for i, j in pairs:
        reps = links if m > 2 else max(links, 2)
        for _ in range(reps):
            triples.append((rng.choice(clusters[i]), rng.choice(clusters[j]), rng.randrange(group.order)))
    for _ in range(sparse):
        w = nxt
        nxt += 1
        verts.append(w)
        a, b = rng.choice(verts[:-1]), rng.choice(verts[:-1])
        triples.append((a, w, rng.randrange(group.order)))
        triples.append((w, b, rng.randrange(group.order)))
    g = LabeledGraph.build(group, verts, triples)
    assert is_two_edge_connected(g)
    return g
