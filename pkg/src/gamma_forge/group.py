"""Finite groups given by explicit multiplication tables."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import InvalidParameter, NotGenerating

# Exhaustive associativity checks are O(order^3); beyond this we trust the caller.
ASSOCIATIVITY_CHECK_LIMIT = 130


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A group on the elements ``0..order-1``; ``table[a][b]`` is the product ``a*b``."""

    table: tuple
    identity: int
    inverse: tuple
    name: Optional[str] = None

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def product(self, elems: Iterable[int]) -> int:
        acc = self.identity
        for a in elems:
            acc = self.table[acc][a]
        return acc

    def conj(self, a: int, g: int) -> int:
        """Return ``a g a^-1``."""
        return self.table[self.table[a][g]][self.inverse[a]]

    def element_order(self, g: int) -> int:
        k, acc = 1, g
        while acc != self.identity:
            acc = self.table[acc][g]
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(a + 1, n))

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table and self.identity == other.identity

    def __hash__(self):
        return hash((self.table, self.identity))

    def __repr__(self):
        return f"FiniteGroup(name={self.name!r}, order={self.order})"

    def __contains__(self, g) -> bool:
        return isinstance(g, int) and 0 <= g < self.order

    def check_element(self, g) -> int:
        if g not in self:
            raise InvalidParameter(f"{g!r} is not an element of {self!r}")
        return g

    @cached_property
    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, frozenset([self.identity]))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, frozenset(self.elements))

    @cached_property
    def subgroups(self) -> tuple:
        """All subgroups, sorted by order then by element list."""
        found = {}
        for g in self.elements:
            h = generate_subgroup(self, [g])
            found[h.elements] = h
        frontier = list(found.values())
        while frontier:
            new = []
            cyclic = list(found.values())
            for a in frontier:
                for b in cyclic:
                    if b.elements <= a.elements:
                        continue
                    j = generate_subgroup(self, a.elements | b.elements)
                    if j.elements not in found:
                        found[j.elements] = j
                        new.append(j)
            frontier = new
        return tuple(sorted(found.values(), key=lambda h: (h.order, sorted(h.elements))))

    @cached_property
    def maximal_proper_subgroups(self) -> tuple:
        proper = [h for h in self.subgroups if h.order < self.order]
        return tuple(h for h in proper if not any(h.elements < j.elements for j in proper))


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def __len__(self):
        return len(self.elements)

    def __le__(self, other: "Subgroup") -> bool:
        return self.elements <= other.elements

    def __lt__(self, other: "Subgroup") -> bool:
        return self.elements < other.elements

    def right_coset_reps(self) -> list:
        """One representative (the least index) of every right coset ``H g``."""
        seen, reps = set(), []
        for g in self.parent.elements:
            if g in seen:
                continue
            reps.append(g)
            seen.update(self.parent.mul(h, g) for h in self.elements)
        return reps

    def __repr__(self):
        return f"Subgroup({sorted(self.elements)} of {self.parent.name or self.parent.order})"


def group_from_table(table: Sequence[Sequence[int]], name: Optional[str] = None) -> FiniteGroup:
    """Validate a multiplication table and wrap it as a group."""
    n = len(table)
    if n == 0:
        raise InvalidParameter("a group needs at least one element")
    rows = tuple(tuple(int(x) for x in row) for row in table)
    if any(len(row) != n for row in rows):
        raise InvalidParameter("multiplication table must be square")
    if any(not 0 <= x < n for row in rows for x in row):
        raise InvalidParameter("table entries must be element indices")
    identity = next(
        (e for e in range(n) if all(rows[e][g] == g and rows[g][e] == g for g in range(n))), None
    )
    if identity is None:
        raise InvalidParameter("table has no identity element")
    inverse = []
    for g in range(n):
        inv = next((h for h in range(n) if rows[g][h] == identity and rows[h][g] == identity), None)
        if inv is None:
            raise InvalidParameter(f"element {g} has no inverse")
        inverse.append(inv)
    if n <= ASSOCIATIVITY_CHECK_LIMIT:
        for a, b, c in itertools.product(range(n), repeat=3):
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise InvalidParameter(f"table is not associative at ({a}, {b}, {c})")
    return FiniteGroup(rows, identity, tuple(inverse), name)


def make_cyclic(m: int) -> FiniteGroup:
    if not isinstance(m, int) or m < 1:
        raise InvalidParameter(f"cyclic group order must be a positive integer, got {m!r}")
    table = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    inverse = tuple((-a) % m for a in range(m))
    return FiniteGroup(table, 0, inverse, f"Z{m}")


def make_symmetric(m: int) -> FiniteGroup:
    """S_m; element ``i`` is the ``i``-th permutation in lexicographic order, so 0 is the identity."""
    if not isinstance(m, int) or not 1 <= m <= 5:
        raise InvalidParameter(f"symmetric group degree must be in 1..5, got {m!r}")
    perms = list(itertools.permutations(range(m)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    table = tuple(tuple(index[tuple(p[q[x]] for x in range(m))] for q in perms) for p in perms)
    inverse = []
    for p in perms:
        inv = [0] * m
        for x, y in enumerate(p):
            inv[y] = x
        inverse.append(index[tuple(inv)])
    return FiniteGroup(table, 0, tuple(inverse), f"S{m}")


def generate_subgroup(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    """Smallest subgroup of ``G`` containing ``S``."""
    gens = sorted({G.check_element(s) for s in S})
    elems = {G.identity}
    queue = deque([G.identity])
    while queue:
        a = queue.popleft()
        for s in gens:
            b = G.mul(a, s)
            if b not in elems:
                elems.add(b)
                queue.append(b)
    # finite: closure under right multiplication by generators is already closed under inverses
    return Subgroup(G, frozenset(elems))


def is_proper(H: Subgroup) -> bool:
    return H.order < H.parent.order


def subgroup_from_elements(G: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    """Wrap ``elems`` as a subgroup, insisting it is already closed."""
    elems = frozenset(G.check_element(g) for g in elems)
    h = generate_subgroup(G, elems)
    if h.elements != elems:
        raise InvalidParameter(f"{sorted(elems)} is not a subgroup")
    return h


def word_over_generators(G: FiniteGroup, S: Iterable[int], g: int) -> list:
    """A shortest word over ``S`` whose product is ``g``.

    Breadth-first search on the Cayley graph from the identity; ties are broken
    by BFS layer and then by the lowest generator index.  The word never uses the
    identity and has length at most ``|G| - 1``.
    """
    G.check_element(g)
    gens = sorted({G.check_element(s) for s in S} - {G.identity})
    parent = {G.identity: None}
    queue = deque([G.identity])
    while queue:
        a = queue.popleft()
        for s in gens:
            b = G.mul(a, s)
            if b not in parent:
                parent[b] = (a, s)
                queue.append(b)
    if len(parent) != G.order:
        raise NotGenerating(f"{sorted(set(S))} does not generate {G!r}")
    word = []
    while parent[g] is not None:
        g, s = parent[g]
        word.append(s)
    word.reverse()
    return word


def parse_group_name(text: str) -> FiniteGroup:
    """Parse short names such as ``z3``, ``s3`` or ``trivial``."""
    t = text.strip().lower()
    if t in ("trivial", "1"):
        return make_cyclic(1)
    if len(t) >= 2 and t[0] in "zc" and t[1:].isdigit():
        return make_cyclic(int(t[1:]))
    if len(t) >= 2 and t[0] == "s" and t[1:].isdigit():
        return make_symmetric(int(t[1:]))
    raise InvalidParameter(f"unknown group name {text!r}")
