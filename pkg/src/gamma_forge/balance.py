"""Fewest edges labeled outside a subgroup, minimized over shifts (coset branch and bound)."""
from __future__ import annotations

import math
from typing import Iterable, Optional

from .conn import internal_edges
from .group import Subgroup
from .lgraph import LabeledGraph, sorted_vertices


def internal_components(g: LabeledGraph, B: set, inner: set):
    """Components of the graph ``(B, inner)`` with an edge, each as a BFS-ordered vertex list."""
    adj = {v: [] for v in B}
    for e in inner:
        u, v, _ = g.edges[e]
        adj[u].append(e)
        if u != v:
            adj[v].append(e)
    seen, comps = set(), []
    for root in sorted_vertices(B):
        if root in seen or not adj[root]:
            continue
        order = [root]
        seen.add(root)
        for u in order:
            for e in sorted(adj[u]):
                a, b, _ = g.edges[e]
                w = b if a == u else a
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        comps.append(order)
    return comps, adj


class CosetSearch:
    """Assigns a right coset ``H sigma(v)`` to every vertex; an edge ``u -> v`` labeled ``a``
    stays inside ``H`` after the shift exactly when ``H sigma(u) a = H sigma(v)``."""

    def __init__(self, g: LabeledGraph, H: Subgroup, adj):
        self.g, self.H, self.G = g, H, g.group
        self.reps = H.right_coset_reps()
        self.coset_of = {}
        for i, r in enumerate(self.reps):
            for h in H.elements:
                self.coset_of[self.G.mul(h, r)] = i
        self.adj = adj

    def _bad(self, ru, lab, rv) -> bool:
        G = self.G
        return G.mul(G.mul(ru, lab), G.inv(rv)) not in self.H

    def _bad_at(self, v, assign) -> int:
        g = self.g
        bad = 0
        rv = self.reps[assign[v]]
        for e in self.adj[v]:
            a, b, lab = g.edges[e]
            if a == b:
                bad += self._bad(rv, lab, rv)
                continue
            w = b if a == v else a
            if w not in assign:
                continue
            rw = self.reps[assign[w]]
            bad += self._bad(rv, lab, rw) if a == v else self._bad(rw, lab, rv)
        return bad

    def _preferred(self, v, assign, choices):
        g, G = self.g, self.G
        for e in sorted(self.adj[v]):
            a, b, lab = g.edges[e]
            w = b if a == v else a
            if w in assign and w != v:
                rw = self.reps[assign[w]]
                c = self.coset_of[G.mul(rw, lab)] if a == w else self.coset_of[G.mul(rw, G.inv(lab))]
                if c in choices:
                    return [c] + [x for x in choices if x != c]
                break
        return list(choices)

    def solve(self, order, fix_root: bool):
        """``(fewest bad edges, {vertex: coset index})`` over one component."""
        best = [math.inf, None]
        assign = {}

        def dfs(i, cost):
            if cost >= best[0]:
                return
            if i == len(order):
                best[0], best[1] = cost, dict(assign)
                return
            v = order[i]
            choices = [0] if (i == 0 and fix_root) else range(len(self.reps))
            for c in self._preferred(v, assign, choices):
                assign[v] = c
                dfs(i + 1, cost + self._bad_at(v, assign))
                del assign[v]

        dfs(0, 0)
        return best[0], best[1]


def frustration(g: LabeledGraph, B: Optional[Iterable], H: Subgroup, fix_first_root: bool = False):
    """``(count, sigma)``: fewest internal edges of ``B`` labeled outside ``H`` after shifting by ``sigma``.

    ``fix_first_root`` pins the first component's root to ``H``; that is only
    sound when the caller also minimizes over all conjugates of ``H``.
    """
    B = set(g.vertices if B is None else B)
    inner = internal_edges(g, B)
    comps, adj = internal_components(g, B, inner)
    search = CosetSearch(g, H, adj)
    total, sigma = 0, {}
    for i, order in enumerate(comps):
        cost, assign = search.solve(order, fix_root=fix_first_root and i == 0)
        total += cost
        sigma.update({v: search.reps[c] for v, c in assign.items()})
    return total, sigma
