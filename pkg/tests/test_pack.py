import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import labeled_graphs
from oracles import (
    a_path_edge_sets,
    all_closed_trails,
    brute_max_packing,
    brute_min_cover,
    has_qualifying,
    qualifying_edge_sets,
    walk_label,
)
from gamma_forge.conn import block_subgraph
from gamma_forge.errors import InvalidParameter, PreconditionError, QualifyingCircuitExists
from gamma_forge.flower import plain_flower, rich_flower
from gamma_forge.group import make_cyclic, make_symmetric
from gamma_forge.immerse import Immersion, verify_immersion
from gamma_forge.lgraph import Dart, LabeledGraph, Trail, shift_by, trail_label
from gamma_forge.pack import (
    SimpleFlower,
    check_simple_flower,
    enrich_flower,
    enrichment_sizes,
    erdos_posa,
    find_cover,
    find_simple_flower,
    matching_edge_of,
    relabel_edge_block,
    uncross_flower,
    vertex_split_gadget,
)

Z1, Z2, Z3, S3 = make_cyclic(1), make_cyclic(2), make_cyclic(3), make_symmetric(3)


def _t(*darts):
    return Trail(tuple(Dart(e, f) for e, f in darts))


def _proper(G, rng):
    return rng.choice([H for H in G.subgroups if H.order < G.order])


def test_find_simple_flower_examples():
    T = Z2.trivial_subgroup
    g = LabeledGraph.build(Z2, ["x"], [("x", "x", 1)])
    sf = find_simple_flower(g, "x", T, 1)
    assert [c.edges for c in sf.circuits] == [frozenset({0})]
    even = LabeledGraph.build(Z2, ["x", "a"], [("x", "a", 0), ("a", "x", 0)])
    assert find_simple_flower(even, "x", T, 1) is None
    two = LabeledGraph.build(
        Z2, ["x", "a", "b", "c", "d"],
        [("x", "a", 1), ("a", "b", 0), ("b", "x", 0), ("x", "c", 0), ("c", "d", 0), ("d", "x", 1)],
    )
    sf = find_simple_flower(two, "x", T, 2)
    assert sf is not None and check_simple_flower(two, sf) is None


def test_whole_group_is_rejected():
    g = LabeledGraph.build(Z2, ["x"], [("x", "x", 1)])
    with pytest.raises(InvalidParameter):
        find_simple_flower(g, "x", Z2.whole, 1)


def test_find_cover_examples():
    T = Z2.trivial_subgroup
    clean = LabeledGraph.build(Z2, ["x", "a"], [("x", "a", 0), ("a", "x", 0)])
    assert find_cover(clean, "x", T, r=2) == frozenset()
    loop = LabeledGraph.build(Z2, ["x"], [("x", "x", 1)])
    assert find_cover(loop, "x", T, r=2) == frozenset({0})


def test_erdos_posa_examples():
    T = Z3.trivial_subgroup
    edgeless = LabeledGraph.build(Z3, ["x", "y"], [])
    out = erdos_posa(edgeless, "x", T, 3)
    assert out.kind == "cover" and out.cover == frozenset()
    tri = LabeledGraph.build(Z3, ["x", "a", "b"], [("x", "a", 1), ("a", "b", 0), ("b", "x", 0)])
    assert erdos_posa(tri, "x", T, 1).kind == "packing"
    assert erdos_posa(shift_by(tri, {}).with_labels({0: 0}), "x", T, 1).cover == frozenset()


@settings(max_examples=60)
@given(labeled_graphs(groups=[Z2, Z3, S3], max_vertices=4, max_edges=7), st.integers(1, 3),
       st.randoms(use_true_random=False))
def test_erdos_posa_duality(g, r, rng):
    x = rng.choice(list(g.vertices))
    H = _proper(g.group, rng)
    out = erdos_posa(g, x, H, r)
    sets = qualifying_edge_sets(g, x, H)
    if out.kind == "packing":
        assert len(out.packing) == r and check_simple_flower(g, out.packing) is None
    else:
        assert len(out.cover) <= 2 * r - 2
        assert all(s & out.cover for s in sets)
        assert brute_max_packing(g, x, H) < r
        assert len(out.cover) == brute_min_cover(g, x, H)


@settings(max_examples=40)
@given(labeled_graphs(groups=[Z2, Z3], max_vertices=4, max_edges=6), st.randoms(use_true_random=False))
def test_cover_is_minimum(g, rng):
    x = rng.choice(list(g.vertices))
    H = _proper(g.group, rng)
    X = find_cover(g, x, H, max_size=len(g.edges))
    assert len(X) == brute_min_cover(g, x, H)


def test_gadget_examples():
    h, A = vertex_split_gadget(LabeledGraph.build(Z2, ["u", "v"], [("u", "v", 1)]), "u")
    assert len(h.vertices) == 2 and len(h.edges) == 1 and A == {("u", 0, 0)}
    tri = LabeledGraph.build(Z2, [0, 1, 2], [(0, 1, 0), (1, 2, 0), (2, 0, 1)])
    h, _ = vertex_split_gadget(tri)
    matching = [e for e in h.edges if matching_edge_of(tri, e) is not None]
    assert len(h.vertices) == 6 and len(h.edges) == 6 and len(matching) == 3
    h, A = vertex_split_gadget(LabeledGraph.build(Z3, ["v"], [("v", "v", 2)]), "v")
    assert sorted(lab for _, _, lab in h.edges.values()) == [0, 2] and len(A) == 2


def x_simple_qualifying(g, x, H):
    out = set()
    for c in all_closed_trails(g, x):
        inner = [g.edges[d.edge][1] if d.forward else g.edges[d.edge][0] for d in c[:-1]]
        if x not in inner and walk_label(g, c) not in H:
            out.add(frozenset(d.edge for d in c))
    return out


@settings(max_examples=60)
@given(labeled_graphs(groups=[Z2, Z3, S3], max_vertices=4, max_edges=6), st.randoms(use_true_random=False))
def test_gadget_paths_match_circuits(g, rng):
    x = rng.choice(list(g.vertices))
    H = _proper(g.group, rng)
    h, A = vertex_split_gadget(g, x)
    from_paths = set()
    for _, _, steps in a_path_edge_sets(h, A):
        if walk_label(h, steps) not in H:
            from_paths.add(frozenset(matching_edge_of(g, d.edge) for d in steps) - {None})
    assert from_paths == x_simple_qualifying(g, x, H)


def test_relabel_examples():
    lonely = LabeledGraph.build(Z2, ["x", "y"], [("x", "y", 1)])
    assert relabel_edge_block(lonely, "x", Z2.trivial_subgroup) == {}
    H = next(s for s in make_cyclic(4).subgroups if s.order == 2)
    cyc = LabeledGraph.build(make_cyclic(4), ["x", "a", "b"], [("x", "a", 2), ("a", "b", 2), ("b", "x", 2)])
    sigma = relabel_edge_block(cyc, "x", H)
    labels = sorted(lab for _, _, lab in shift_by(cyc, sigma).edges.values())
    assert labels == [0, 0, 2]
    odd = LabeledGraph.build(Z2, ["x", "a", "b"], [("x", "a", 1), ("a", "b", 0), ("b", "x", 0)])
    with pytest.raises(QualifyingCircuitExists) as info:
        relabel_edge_block(odd, "x", Z2.trivial_subgroup)
    w = info.value.witness
    assert odd.trail_tail(w) == "x" == odd.trail_head(w) and trail_label(odd, w) == 1


@settings(max_examples=80)
@given(labeled_graphs(groups=[Z2, Z3, make_cyclic(4), S3], max_vertices=5, max_edges=6),
       st.randoms(use_true_random=False))
def test_relabel_labels_block_over_subgroup(g, rng):
    x = rng.choice(list(g.vertices))
    H = _proper(g.group, rng)
    if has_qualifying(g, x, H):
        with pytest.raises(QualifyingCircuitExists) as info:
            relabel_edge_block(g, x, H)
        w = info.value.witness
        assert g.trail_tail(w) == x == g.trail_head(w) and trail_label(g, w) not in H
        return
    sigma = relabel_edge_block(g, x, H)
    assert x not in sigma
    shifted = shift_by(g, sigma)
    for e in block_subgraph(g, x).edges:
        assert shifted.edges[e][2] in H


def crossing_fixture():
    """Branch trails x-a-y and x-y; a circuit uses the middle of the first one."""
    g = LabeledGraph.build(
        Z2, ["x", "y", "a", "b"],
        [("x", "a", 0), ("a", "y", 0), ("x", "y", 0), ("x", "b", 1), ("b", "a", 0), ("y", "x", 0)],
    )
    pattern = plain_flower(2, 1, Z2)
    im = Immersion({"x": "x", "y1": "y"}, {0: _t((0, True), (1, True)), 1: _t((2, True))})
    assert verify_immersion(g, pattern, im, ignore_labels=True)
    sf = SimpleFlower("x", Z2.trivial_subgroup, (_t((3, True), (4, True), (1, True), (5, True)),))
    return g, pattern, im, sf


def test_uncross_removes_midway_crossing():
    g, pattern, im, sf = crossing_fixture()
    out = uncross_flower(g, pattern, im, Z2.trivial_subgroup, sf)
    assert out.moves == 1 and len(out.flower) == 1
    assert check_simple_flower(g, out.flower) is None
    (c,) = out.flower.circuits
    assert 1 not in c.edges and out.crossing_trails == (0,)


def test_uncross_leaves_disjoint_flower_alone():
    g, pattern, im, _ = crossing_fixture()
    sf = SimpleFlower("x", Z2.trivial_subgroup, (_t((3, True), (4, True), (0, False)),))
    out = uncross_flower(g, pattern, im, Z2.trivial_subgroup, sf)
    assert out.moves == 0 and out.flower == sf


def test_uncross_rejects_invalid_flower():
    g, pattern, im, _ = crossing_fixture()
    bad = SimpleFlower("x", Z2.trivial_subgroup, (_t((2, True), (5, True)),))
    with pytest.raises(PreconditionError):
        uncross_flower(g, pattern, im, Z2.trivial_subgroup, bad)


def _petalwise_immersion(host, k, n):
    pattern = plain_flower(k, n, host.group)
    by_petal = {}
    for e, (u, v, _) in sorted(host.edges.items()):
        by_petal.setdefault(v, []).append(e)
    trails = {}
    for e, (_, v, _) in sorted(pattern.edges.items()):
        trails[e] = _t((by_petal[v].pop(0), True))
    return pattern, Immersion({v: v for v in pattern.vertices}, trails)


def test_enrich_trivial_group_is_rich_at_once():
    host = plain_flower(2, 1, Z1)
    pattern, im = _petalwise_immersion(host, 2, 1)
    out = enrich_flower(host, pattern, im, 2, 1)
    assert out.kind == "rich" and len(out.chain) == 1
    assert verify_immersion(host, out.pattern, out.immersion)


def test_enrich_reaches_rich_flower_on_z2():
    sizes = enrichment_sizes(2, 1, 1)
    k_in, n_in = sizes["k_in"], sizes["n_in"]
    host = rich_flower(Z2, k_in // 2, n_in)
    pattern, im = _petalwise_immersion(host, k_in, n_in)
    out = enrich_flower(host, pattern, im, 1, 1)
    assert out.kind == "rich"
    assert [H.order for H in out.chain] == [1, 2]
    assert out.center == "x" and out.immersion.vertex_map["x"] == "x"
    assert verify_immersion(host, out.pattern, out.immersion)


def test_enrich_balanced_host_gives_cover():
    sizes = enrichment_sizes(2, 1, 1)
    host = plain_flower(sizes["k_in"], sizes["n_in"], Z2)
    pattern, im = _petalwise_immersion(host, sizes["k_in"], sizes["n_in"])
    out = enrich_flower(host, pattern, im, 1, 1)
    assert out.kind == "cover" and out.cover == frozenset()
    assert out.subgroup.order == 1


def test_enrichment_sizes():
    s = enrichment_sizes(4, 1, 1)
    assert s["k_in"] == 4 ** 6 and s["n_in"] == 4 and s["levels"] == int(math.log2(4))
