import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import labeled_graphs
from oracles import brute_value, cut_size
from gamma_forge.conn import boundary, degree, is_fully_connected, t_cores
from gamma_forge.decomp import (
    Certificate,
    ContainerSystem,
    TreeCutDecomposition,
    build_tree_cut,
    certificate_value,
    check_converse,
    check_tree_cut,
    minimal_cut_closure,
    refine_containers,
    set_value,
    structure_decompose,
    theorem_t,
    to_dot,
    torso,
    verify_structure,
)
from gamma_forge.errors import InvalidCertificate, InvalidParameter, NoProperSubgroup, PreconditionError
from gamma_forge.fixtures import planted_clusters, random_two_edge_connected
from gamma_forge.flower import rich_flower
from gamma_forge.group import group_from_table, make_cyclic, make_symmetric
from gamma_forge.lgraph import LabeledGraph

Z1, Z2, Z3, Z4, S3 = make_cyclic(1), make_cyclic(2), make_cyclic(3), make_cyclic(4), make_symmetric(3)
KLEIN = group_from_table([[a ^ b for b in range(4)] for a in range(4)], name="V4")


def _triangle(labels, group=Z2):
    return LabeledGraph.build(group, [0, 1, 2], [(0, 1, labels[0]), (1, 2, labels[1]), (2, 0, labels[2])])


def _path(m, group=Z2):
    return LabeledGraph.build(group, list(range(m)), [(i, i + 1, 0) for i in range(m - 1)])


def test_theorem_t():
    assert theorem_t(Z2, 1, 1) == 512
    assert theorem_t(Z3, 1, 1) == 4 * 3 ** 7
    assert theorem_t(Z4, 2, 1) == 8 * 4 ** 8
    with pytest.raises(InvalidParameter):
        theorem_t(Z2, 0, 1)


def test_certificate_value_examples():
    T = Z2.trivial_subgroup
    tri = _triangle((0, 0, 0))
    assert certificate_value(tri, Certificate(frozenset({0, 1, 2}), frozenset(), {}, T)) == 0
    star = LabeledGraph.build(Z2, [0, 1, 2, 3], [(0, 1, 0), (0, 2, 0), (0, 3, 0)])
    assert certificate_value(star, Certificate(frozenset({0}), frozenset({0, 1, 2}), {}, T)) == 3
    g = LabeledGraph.build(Z2, [0, 1, 2, 3], [(0, 1, 1), (0, 1, 1), (1, 2, 0), (0, 3, 0)])
    B = frozenset({0, 1})
    assert certificate_value(g, Certificate(B, frozenset({0, 1, 2, 3}), {}, T)) == 6


@pytest.mark.parametrize("cert,clause", [
    (Certificate(frozenset({0, 1}), frozenset(), {}, Z2.trivial_subgroup), "boundary"),
    (Certificate(frozenset({0}), frozenset({0, 2, 1}), {}, Z2.trivial_subgroup), "subset"),
    (Certificate(frozenset({0, 1, 2}), frozenset(), {}, Z2.whole), "proper"),
    (Certificate(frozenset({0, 1, 2}), frozenset(), {}, Z2.trivial_subgroup), "labels"),
])
def test_certificate_value_names_the_clause(cert, clause):
    g = _triangle((1, 0, 0)) if clause != "boundary" else _path(3)
    with pytest.raises(InvalidCertificate) as info:
        certificate_value(g, cert)
    assert info.value.clause == clause


def test_set_value_examples():
    assert set_value(_triangle((0, 0, 0)), {0, 1})[0] == cut_size(_triangle((0, 0, 0)), {0, 1})
    assert set_value(_triangle((1, 1, 0)), {0, 1, 2})[0] == brute_value(_triangle((1, 1, 0)), {0, 1, 2}) == 0
    value, cert = set_value(_triangle((1, 0, 0)), {0, 1, 2})
    assert value == brute_value(_triangle((1, 0, 0)), {0, 1, 2}) == 2
    assert certificate_value(_triangle((1, 0, 0)), cert) == 2
    assert set_value(_triangle((1, 1, 0)), set())[0] == 0
    with pytest.raises(NoProperSubgroup):
        set_value(_triangle((0, 0, 0), Z1), {0})


VALUE_GROUPS = [Z2, Z3, Z4, make_cyclic(5), make_cyclic(6), S3, KLEIN]


@settings(max_examples=150)
@given(labeled_graphs(groups=VALUE_GROUPS, max_vertices=5, max_edges=8), st.randoms(use_true_random=False))
def test_set_value_matches_full_shift_search(g, rng):
    B = rng.sample(list(g.vertices), rng.randint(0, min(4, len(g.vertices))))
    value, cert = set_value(g, B)
    assert value == brute_value(g, B)
    assert certificate_value(g, cert) == value


@settings(max_examples=150)
@given(labeled_graphs(groups=[Z2, Z3, Z4, KLEIN], max_vertices=7, max_edges=12), st.randoms(use_true_random=False))
def test_value_is_posimodular(g, rng):
    verts = list(g.vertices)
    A = {v for v in verts if rng.random() < 0.5}
    B = {v for v in verts if rng.random() < 0.5}
    val = lambda S: set_value(g, S)[0]
    assert val(A) + val(B) >= val(A - B) + val(B - A)


def test_torso_examples():
    g = _path(4)
    single = TreeCutDecomposition((0,), (), {0: frozenset(g.vertices)})
    h, new = torso(g, single, 0)
    assert new == [] and h.edges == g.edges
    two = TreeCutDecomposition((0, 1), ((0, 1),), {0: frozenset(g.vertices), 1: frozenset()})
    h, new = torso(g, two, 0)
    assert new == [("new", 1)] and degree(h, ("new", 1)) == 0
    star = TreeCutDecomposition(
        (0, 1, 2, 3), ((0, 1), (0, 2), (0, 3)),
        {0: frozenset({1}), 1: frozenset({0}), 2: frozenset({2}), 3: frozenset({3})},
    )
    h, new = torso(g, star, 0)
    assert {v: degree(h, v) for v in new} == {("new", i): cut_size(g, star.bags[i]) for i in (1, 2, 3)}
    with pytest.raises(InvalidParameter):
        torso(g, star, 9)


def test_torso_drops_loops_at_new_vertices():
    g = _triangle((0, 0, 0))
    d = TreeCutDecomposition((0, 1), ((0, 1),), {0: frozenset({0}), 1: frozenset({1, 2})})
    h, new = torso(g, d, 0)
    assert len(h.edges) == 2 and all(u != v for u, v, _ in h.edges.values())


def test_check_tree_cut_rejects_bad_shapes():
    g = _path(3)
    assert check_tree_cut(g, TreeCutDecomposition((0, 1), (), {0: frozenset(g.vertices), 1: frozenset()}))
    assert check_tree_cut(g, TreeCutDecomposition((0,), (), {0: frozenset({0, 1})}))
    overlap = TreeCutDecomposition((0, 1), ((0, 1),), {0: frozenset({0, 1}), 1: frozenset({1, 2})})
    assert "overlaps" in check_tree_cut(g, overlap)
    with pytest.raises(InvalidParameter):
        verify_structure(g, {}, overlap, 2, 1)


def test_verify_structure_examples():
    g = _triangle((1, 0, 0))
    single = TreeCutDecomposition((0,), (), {0: frozenset(g.vertices)})
    assert verify_structure(g, {}, single, 2, 1).bags[0].outcome == 1
    dense = LabeledGraph.build(Z2, [0, 1, 2, 3], [(0, 1, 0)] * 3 + [(1, 2, 0)] * 3 + [(2, 0, 0)] * 3 + [(2, 3, 0), (3, 0, 0)])
    d = TreeCutDecomposition((0, 1), ((0, 1),), {0: frozenset({0, 1, 2}), 1: frozenset({3})})
    rep = verify_structure(dense, {}, d, 2, 1)
    bag = rep.bags[0]
    assert rep.ok and bag.outcome == 2 and bag.cover == frozenset(boundary(dense, {0, 1, 2}))
    odd = LabeledGraph.build(Z2, [0, 1, 2], [(0, 1, 1)] * 2 + [(1, 2, 1)] * 2 + [(2, 0, 1)] * 2)
    rep = verify_structure(odd, {}, TreeCutDecomposition((0,), (), {0: frozenset({0, 1, 2})}), 1, 0)
    bag = rep.bags[0]
    assert not rep.ok and bag.outcome is None and len(bag.high_degree) == 3 and bag.value > 1


def test_verify_structure_uses_the_shift():
    g = LabeledGraph.build(Z2, [0, 1], [(0, 1, 1)] * 3)
    d = TreeCutDecomposition((0,), (), {0: frozenset({0, 1})})
    assert not verify_structure(g, {}, d, 1, 0).ok
    assert verify_structure(g, {1: 1}, d, 1, 0).ok


def _two_clusters(seed=0):
    return planted_clusters(random.Random(seed), Z2, sizes=(4, 4), multiplicity=2, links=2)


def test_refine_keeps_disjoint_refined_system():
    g = _two_clusters()
    cores = list(t_cores(g, 4).cores)
    initial = ContainerSystem(tuple(cores), tuple(cores))
    t = max(set_value(g, C)[0] for C in cores)
    out = refine_containers(g, cores, initial, t)
    assert set(out.containers) == set(cores)


def test_refine_uncrosses_overlapping_containers():
    g = _two_clusters()
    cores = list(t_cores(g, 4).cores)
    spare = sorted(set(g.vertices) - set().union(*cores))[0]
    initial = [C | {spare} for C in cores]
    t = max(set_value(g, C)[0] for C in initial)
    out = refine_containers(g, cores, ContainerSystem(tuple(initial), tuple(cores)), t)
    assert out.is_disjoint() and out.is_container_system()
    for C in out.containers:
        assert set_value(g, C)[0] <= t
        assert any(is_fully_connected(g, v, C) for v in C)


def test_refine_rejects_non_containers():
    g = _two_clusters()
    cores = list(t_cores(g, 4).cores)
    with pytest.raises(InvalidParameter):
        refine_containers(g, cores, ContainerSystem((cores[0],), tuple(cores)), 100)


def test_minimal_cut_closure_is_minimal():
    g = _two_clusters()
    S = t_cores(g, 4).cores[0]
    C = minimal_cut_closure(g, S, 6)
    assert S <= C and cut_size(g, C) <= 6
    assert all(cut_size(g, C - {v}) > 6 for v in C - S)


def test_build_tree_cut_low_degree_is_one_bag():
    g = LabeledGraph.build(Z2, list(range(5)), [(i, (i + 1) % 5, 0) for i in range(5)])
    d = build_tree_cut(g, [], 2, 1)
    assert d.nodes == (0,) and d.bags[0] == frozenset(g.vertices)


def test_build_tree_cut_single_vertex_core_grows():
    rim = [(i, i % 4 + 1, 0) for i in range(1, 5)]
    g = LabeledGraph.build(Z2, list(range(5)), [(0, i, 0) for i in range(1, 5)] + rim)
    assert [set(S) for S in t_cores(g, 3).cores] == [{0}]
    d = build_tree_cut(g, [], 3, 1)
    assert check_tree_cut(g, d) is None
    home = d.bags[d.bag_of(0)]
    assert home == minimal_cut_closure(g, {0}, 3)
    assert len(home) > 1 and cut_size(g, home) <= 3


def test_structure_decompose_examples():
    g = LabeledGraph.build(Z2, list(range(4)), [(i, (i + 1) % 4, i % 2) for i in range(4)])
    res = structure_decompose(g, 1, 1)
    assert res.t == 512 and res.kind == "decomposition" and len(res.decomposition.nodes) == 1
    assert res.hypothesis == "theorem" and not res.override_t
    with pytest.raises(PreconditionError):
        structure_decompose(_path(3), 1, 1)
    with pytest.raises(NoProperSubgroup):
        structure_decompose(_triangle((0, 0, 0), Z1), 1, 1)


def test_planted_clusters_get_certified_bags():
    g = planted_clusters(random.Random(1), Z2, sizes=(5, 5), multiplicity=2, links=2, sparse=0)
    assert set_value(g, g.vertices)[0] > 0
    res = structure_decompose(g, 1, 1, override_t=4)
    assert res.kind == "decomposition" and res.override_t and res.notes
    outcome_two = {r.bag for r in res.report.bags if r.outcome == 2}
    assert outcome_two == {frozenset(range(0, 5)), frozenset(range(5, 10))}
    assert verify_structure(g, res.shift, res.decomposition, res.t, res.bound).ok


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.integers(4, 10), st.integers(3, 6), st.sampled_from([1, 2]),
       st.sampled_from([Z2, Z3]))
def test_pipeline_output_verifies(seed, nv, t, n, G):
    rng = random.Random(seed)
    g = random_two_edge_connected(rng, G, nv, rng.randint(0, 2 * nv))
    try:
        res = structure_decompose(g, 1, n, override_t=t)
    except PreconditionError:
        return
    if res.kind == "decomposition":
        assert check_tree_cut(g, res.decomposition) is None
        assert verify_structure(g, res.shift, res.decomposition, t, res.bound).ok


def test_check_converse_on_planted_fixture():
    g = planted_clusters(random.Random(5), Z2, sizes=(3, 3), multiplicity=1, links=1, sparse=1)
    res = structure_decompose(g, 1, 1, override_t=2, high_degree_bound=1)
    assert res.hypothesis == "converse"
    assert check_converse(g, res.shift, res.decomposition, 2, 1) is True


def test_check_converse_needs_a_verified_decomposition():
    g = rich_flower(Z2, 3, 1)
    d = TreeCutDecomposition((0,), (), {0: frozenset(g.vertices)})
    with pytest.raises(PreconditionError):
        check_converse(g, {}, d, 2, 0)


def test_to_dot_lists_every_bag():
    g = _two_clusters()
    res = structure_decompose(g, 1, 1, override_t=4)
    dot = to_dot(res.decomposition, res.report)
    assert dot.startswith("graph decomposition {")
    assert dot.count("--") == len(res.decomposition.tree_edges)
    assert all(f"n{node} [" in dot for node in res.decomposition.nodes)
