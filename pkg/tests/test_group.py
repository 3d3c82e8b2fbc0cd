import itertools
from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gamma_forge.errors import InvalidParameter, NotGenerating
from gamma_forge.group import (
    generate_subgroup,
    group_from_table,
    is_proper,
    make_cyclic,
    make_symmetric,
    parse_group_name,
    word_over_generators,
)

from conftest import SMALL_GROUPS


def test_trivial_cyclic_group():
    G = make_cyclic(1)
    assert G.order == 1 and G.mul(0, 0) == 0


def test_z2_table_and_inverse():
    G = make_cyclic(2)
    assert [list(r) for r in G.table] == [[0, 1], [1, 0]]
    assert G.inv(1) == 1


def test_z4_inverse():
    assert make_cyclic(4).inv(1) == 3


def test_cyclic_rejects_zero():
    with pytest.raises(InvalidParameter):
        make_cyclic(0)


def test_symmetric_small_cases():
    assert make_symmetric(1).order == 1
    s2 = make_symmetric(2)
    assert s2.order == 2 and s2.mul(1, 1) == s2.identity


def test_s3_has_three_involutions():
    G = make_symmetric(3)
    perms = list(itertools.permutations(range(3)))
    brute = sum(1 for p in perms if p != (0, 1, 2) and tuple(p[p[i]] for i in range(3)) == (0, 1, 2))
    assert brute == 3
    assert sum(1 for g in G.elements if G.element_order(g) == 2) == 3


def test_symmetric_range():
    with pytest.raises(InvalidParameter):
        make_symmetric(6)


def test_generate_subgroup_examples():
    Z4 = make_cyclic(4)
    assert generate_subgroup(Z4, []).elements == {0}
    assert generate_subgroup(Z4, [2]).elements == {0, 2}
    S3 = make_symmetric(3)
    t = next(g for g in S3.elements if S3.element_order(g) == 2)
    assert generate_subgroup(S3, [t]).order == 2


def test_is_proper_examples():
    Z2, Z4 = make_cyclic(2), make_cyclic(4)
    assert is_proper(Z2.trivial_subgroup)
    assert not is_proper(Z2.whole)
    assert is_proper(generate_subgroup(Z4, [2]))


def test_word_examples():
    Z4 = make_cyclic(4)
    assert word_over_generators(Z4, [1], 0) == []
    assert word_over_generators(Z4, [1, 2], 2) == [2]
    assert word_over_generators(Z4, [1], 3) == [1, 1, 1]


def test_word_errors():
    Z4 = make_cyclic(4)
    with pytest.raises(NotGenerating):
        word_over_generators(Z4, [2], 1)
    with pytest.raises(InvalidParameter):
        word_over_generators(Z4, [1], 7)


def _bfs_distance(G, S, g):
    dist = {G.identity: 0}
    queue = deque([G.identity])
    while queue:
        a = queue.popleft()
        for s in S:
            b = G.mul(a, s)
            if b not in dist:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist[g]


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda G: G.name)
def test_words_are_shortest(G):
    for r in range(1, G.order + 1):
        for S in itertools.combinations(G.elements, r):
            if generate_subgroup(G, S).order != G.order:
                continue
            for g in G.elements:
                w = word_over_generators(G, S, g)
                assert G.product(w) == g and all(a in S for a in w)
                assert len(w) == _bfs_distance(G, S, g) <= G.order


def test_bad_tables_are_rejected():
    with pytest.raises(InvalidParameter):
        group_from_table([[0, 1], [0, 1]])
    with pytest.raises(InvalidParameter):
        group_from_table([[0, 1, 2], [1, 0, 2], [2, 2, 0]])


def test_parse_group_name():
    assert parse_group_name("z3").order == 3
    assert parse_group_name("S3").order == 6
    assert parse_group_name("trivial").order == 1


@given(st.sampled_from(SMALL_GROUPS), st.data())
def test_generate_subgroup_is_idempotent_and_lagrange(G, data):
    S = data.draw(st.sets(st.sampled_from(list(G.elements))))
    H = generate_subgroup(G, S)
    assert generate_subgroup(G, H.elements) == H
    assert G.order % H.order == 0
    assert all(G.mul(a, b) in H for a in H for b in H)


def test_maximal_subgroups_of_s3():
    S3 = make_symmetric(3)
    orders = sorted(H.order for H in S3.maximal_proper_subgroups)
    assert orders == [2, 2, 2, 3]


def test_right_cosets_partition():
    S3 = make_symmetric(3)
    for H in S3.subgroups:
        reps = H.right_coset_reps()
        cosets = [frozenset(S3.mul(h, r) for h in H) for r in reps]
        assert len(reps) * H.order == S3.order
        assert frozenset().union(*cosets) == frozenset(S3.elements)
