import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from gamma_forge.group import make_cyclic, make_symmetric  # noqa: E402
from gamma_forge.lgraph import LabeledGraph  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_GROUPS = [make_cyclic(1), make_cyclic(2), make_cyclic(3), make_cyclic(4), make_symmetric(3)]


@st.composite
def labeled_graphs(draw, groups=SMALL_GROUPS, max_vertices=5, max_edges=8, loops=True, min_vertices=1):
    G = draw(st.sampled_from(groups))
    n = draw(st.integers(min_vertices, max_vertices))
    m = draw(st.integers(0, max_edges))
    triples = []
    for _ in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        if u == v and not loops:
            continue
        triples.append((u, v, draw(st.integers(0, G.order - 1))))
    return LabeledGraph.build(G, range(n), triples)
