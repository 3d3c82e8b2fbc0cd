import pytest
from hypothesis import given
from hypothesis import strategies as st

from gamma_forge.errors import InvalidParameter, InvalidTransition
from gamma_forge.group import make_cyclic, make_symmetric
from gamma_forge.lgraph import (
    Dart,
    LabeledGraph,
    Trail,
    compose_shifts,
    cyclic_reorder,
    inverse,
    shift,
    shift_by,
    shifted_label,
    shifting_equivalent,
    split_off,
    trail_label,
    transitions,
)

from conftest import labeled_graphs

S3 = make_symmetric(3)
Z2 = make_cyclic(2)


def _two_non_commuting():
    for a in S3.elements:
        for b in S3.elements:
            if S3.mul(a, b) != S3.mul(b, a):
                return a, b
    raise AssertionError


def test_shift_examples():
    a, b = _two_non_commuting()
    g = LabeledGraph.build(S3, ["v", "w"], [("v", "w", b), ("v", "v", b), ("w", "v", b)])
    assert shift(g, "v", S3.identity).edges == g.edges
    h = shift(g, "v", a)
    assert h.edges[0][2] == S3.mul(a, b)
    assert h.edges[1][2] == S3.mul(S3.mul(a, b), S3.inv(a))
    assert h.edges[2][2] == S3.mul(b, S3.inv(a))


def test_shift_unknown_vertex():
    g = LabeledGraph.build(Z2, [0], [])
    with pytest.raises(InvalidParameter):
        shift(g, 5, 1)


def test_trail_label_examples():
    a, b = _two_non_commuting()
    g = LabeledGraph.build(S3, [0, 1, 2], [(0, 1, a), (1, 2, b)])
    t = Trail((Dart(0, True), Dart(1, True)))
    assert trail_label(g, Trail((Dart(0, True),))) == a
    assert trail_label(g, t) == S3.mul(a, b)
    assert trail_label(g, inverse(t)) == S3.inv(S3.mul(a, b))


def test_invalid_trail_rejected():
    g = LabeledGraph.build(Z2, [0, 1, 2], [(0, 1, 1), (1, 2, 0)])
    with pytest.raises(InvalidParameter):
        trail_label(g, Trail((Dart(0, True), Dart(1, False))))
    with pytest.raises(InvalidParameter):
        Trail(())
    with pytest.raises(InvalidParameter):
        Trail((Dart(0, True), Dart(0, False)))


def test_inverse_and_transitions():
    t = Trail((Dart(0, True), Dart(1, True), Dart(2, False)))
    assert inverse(Trail((Dart(0, True),))) == Trail((Dart(0, False),))
    assert inverse(inverse(t)) == t
    assert transitions(Trail((Dart(0, True),))) == set()
    assert len(transitions(t)) == 2
    assert transitions(inverse(t)) == transitions(t)


def test_cyclic_reorder():
    a, b = _two_non_commuting()
    g = LabeledGraph.build(S3, [0, 1], [(0, 1, a), (1, 0, b)])
    c = Trail((Dart(0, True), Dart(1, True)))
    assert cyclic_reorder(g, c, 1) == c
    c2 = cyclic_reorder(g, c, 2)
    assert trail_label(g, c) == S3.mul(a, b) and trail_label(g, c2) == S3.mul(b, a)
    assert any(S3.conj(trail_label(g, c), x) == trail_label(g, c2) for x in S3.elements)
    z = LabeledGraph.build(Z2, [0, 1], [(0, 1, 1), (1, 0, 0)])
    assert trail_label(z, cyclic_reorder(z, c, 2)) == trail_label(z, c)
    with pytest.raises(InvalidParameter):
        cyclic_reorder(g, Trail((Dart(0, True),)), 1)


def test_split_off_examples():
    a, b = _two_non_commuting()
    g = LabeledGraph.build(S3, [0, 1, 2], [(0, 1, a), (1, 2, b)])
    h = split_off(g, Dart(0, True), Dart(1, True))
    assert set(h.edges) == {2}
    (u, v, lab), = h.edges.values()
    assert shifted_label(h, Dart(2, (u, v) == (0, 2)), {}) == S3.mul(a, b)
    h2 = split_off(g, Dart(1, False), Dart(0, False))
    assert h2 == h
    ident = LabeledGraph.build(S3, [0, 1, 2], [(0, 1, 0), (1, 2, 0)])
    assert list(split_off(ident, Dart(0, True), Dart(1, True)).edges.values())[0][2] == S3.identity
    with pytest.raises(InvalidTransition):
        split_off(g, Dart(0, True), Dart(1, False))


def test_shifting_equivalent_examples():
    g = LabeledGraph.build(S3, [0, 1], [(0, 1, 3), (1, 1, 2)])
    assert all(a == S3.identity for a in shifting_equivalent(g, g).values())
    h = shift(g, 1, 4)
    sigma = shifting_equivalent(g, h)
    assert shift_by(g, sigma) == h
    # a loop labeled by elements of different orders cannot be shifted into the other
    inv = next(x for x in S3.elements if S3.element_order(x) == 2)
    rot = next(x for x in S3.elements if S3.element_order(x) == 3)
    l1 = LabeledGraph.build(S3, [0], [(0, 0, inv)])
    l2 = LabeledGraph.build(S3, [0], [(0, 0, rot)])
    assert shifting_equivalent(l1, l2) is None


@given(labeled_graphs(), st.data())
def test_shift_round_trip(g, data):
    G = g.group
    v = data.draw(st.sampled_from(list(g.vertices)))
    a = data.draw(st.integers(0, G.order - 1))
    assert shift(shift(g, v, a), v, G.inv(a)) == g


@given(labeled_graphs(min_vertices=2), st.data())
def test_shifts_commute_at_distinct_vertices(g, data):
    G = g.group
    u, v = data.draw(st.lists(st.sampled_from(list(g.vertices)), min_size=2, max_size=2, unique=True))
    a, b = data.draw(st.integers(0, G.order - 1)), data.draw(st.integers(0, G.order - 1))
    assert shift(shift(g, u, a), v, b) == shift(shift(g, v, b), u, a)


@given(labeled_graphs(), st.data())
def test_compose_shifts_matches_sequential(g, data):
    G = g.group
    s1 = {v: data.draw(st.integers(0, G.order - 1)) for v in g.vertices}
    s2 = {v: data.draw(st.integers(0, G.order - 1)) for v in g.vertices}
    assert shift_by(shift_by(g, s1), s2) == shift_by(g, compose_shifts(G, s1, s2))


def _random_trail(g, data, start):
    steps, used, u = [], set(), start
    for _ in range(data.draw(st.integers(1, 6))):
        options = [d for d in g.darts_from(u) if d.edge not in used]
        if not options:
            break
        d = data.draw(st.sampled_from(options))
        steps.append(d)
        used.add(d.edge)
        u = g.head(d)
    return Trail(tuple(steps)) if steps else None


@given(labeled_graphs(min_vertices=1, max_edges=7), st.data())
def test_circuit_label_under_shift(g, data):
    G = g.group
    x = data.draw(st.sampled_from(list(g.vertices)))
    t = _random_trail(g, data, x)
    if t is None:
        return
    w = data.draw(st.sampled_from(list(g.vertices)))
    a = data.draw(st.integers(0, G.order - 1))
    h = shift(g, w, a)
    before, after = trail_label(g, t), trail_label(h, t)
    end = g.trail_head(t)
    if w not in (x, end):
        assert before == after
    if g.is_circuit(t) and w == x:
        assert after == G.mul(G.mul(a, before), G.inv(a))


@given(labeled_graphs(min_vertices=1, max_edges=7), st.data())
def test_label_is_multiplicative(g, data):
    x = data.draw(st.sampled_from(list(g.vertices)))
    t = _random_trail(g, data, x)
    if t is None or len(t) < 2:
        return
    i = data.draw(st.integers(1, len(t) - 1))
    t1, t2 = Trail(t.steps[:i]), Trail(t.steps[i:])
    assert trail_label(g, t) == g.group.mul(trail_label(g, t1), trail_label(g, t2))


@given(labeled_graphs(min_vertices=1, max_edges=7), st.data())
def test_split_off_preserves_rerouted_labels(g, data):
    x = data.draw(st.sampled_from(list(g.vertices)))
    t = _random_trail(g, data, x)
    if t is None or len(t) < 2:
        return
    i = data.draw(st.integers(0, len(t) - 2))
    a, b = t.steps[i], t.steps[i + 1]
    h = split_off(g, a, b)
    new = h.next_id - 1
    u, _, _ = h.edges[new]
    fwd = u == g.tail(a)
    if g.tail(a) == g.head(b):
        # a loop: either orientation may be canonical; accept the matching one
        fwd = shifted_label(h, Dart(new, True), {}) == g.group.mul(g.label(a), g.label(b))
    rerouted = Trail(t.steps[:i] + (Dart(new, fwd),) + t.steps[i + 2:])
    assert trail_label(h, rerouted) == trail_label(g, t)


def test_inverse_label_invariant():
    g = LabeledGraph.build(S3, [0, 1], [(0, 1, 4)])
    assert S3.mul(g.label(Dart(0, True)), g.label(Dart(0, False))) == S3.identity
