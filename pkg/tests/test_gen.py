import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings

from tfpart import graph6
from tfpart.errors import GuardExceeded
from tfpart.gen import (
    are_isomorphic,
    canonical_form,
    canonical_graph,
    canonical_labeling,
    enumerate_all,
    enumerate_free,
)
from tfpart.graphcore import Graph, complete_bipartite, cycle, grotzsch, is_clique_free, petersen

from conftest import graphs

# OEIS A006785 (triangle-free), A000088 (all graphs), A079574 (K4-free)
TRIANGLE_FREE = [1, 2, 3, 7, 14, 38, 107, 410]
ALL_GRAPHS = [1, 2, 4, 11, 34, 156, 1044]
K4_FREE = [1, 2, 4, 10, 29, 120, 685]


@pytest.mark.parametrize("n", range(1, 9))
def test_triangle_free_counts(n):
    assert sum(1 for _ in enumerate_free(n, 3)) == TRIANGLE_FREE[n - 1]


@pytest.mark.parametrize("n", range(1, 8))
def test_all_graph_counts(n):
    assert sum(1 for _ in enumerate_all(n)) == ALL_GRAPHS[n - 1]


@pytest.mark.parametrize("n", range(1, 8))
def test_k4_free_counts(n):
    assert sum(1 for _ in enumerate_free(n, 4)) == K4_FREE[n - 1]


def test_order_and_canonical_representatives():
    reps = list(enumerate_free(6, 3))
    keys = [(g.edge_count, graph6.encode(g)) for g in reps]
    assert keys == sorted(keys)
    assert all(graph6.encode(g) == canonical_form(g) for g in reps)
    assert all(is_clique_free(g, 3) for g in reps)


@pytest.mark.parametrize("n", range(1, 7))
def test_naive_labelled_enumeration_agrees(n):
    pairs = list(combinations(range(n), 2))
    forms = set()
    for mask in range(1 << len(pairs)):
        g = Graph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if is_clique_free(g, 3):
            forms.add(canonical_form(g))
    assert forms == {graph6.encode(g) for g in enumerate_free(n, 3)}


def test_graph_atlas_agrees_up_to_seven():
    by_n: dict[int, set[str]] = {}
    for h in nx.graph_atlas_g()[1:]:
        g = Graph.from_edges(h.number_of_nodes(), h.edges())
        by_n.setdefault(g.n, set()).add(canonical_form(g))
    for n in range(1, 8):
        assert by_n[n] == {graph6.encode(g) for g in enumerate_all(n)}


@pytest.mark.parametrize("g", [petersen(), grotzsch(), cycle(7), complete_bipartite(4, 3)], ids=repr)
def test_canonical_form_invariant_under_100_permutations(g):
    rnd = random.Random(2024)
    form = canonical_form(g)
    for _ in range(100):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        assert canonical_form(g.relabel(perm)) == form


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=9))
def test_canonical_form_properties(g):
    order = canonical_labeling(g)
    assert sorted(order) == list(range(g.n))
    canon = canonical_graph(g)
    assert canonical_form(canon) == canonical_form(g)
    perm = list(range(g.n))[::-1]
    assert are_isomorphic(g, g.relabel(perm))


def test_colored_canonical_form_respects_colors():
    # the path 0-1-2 with an end coloured apart differs from the centre coloured apart
    p = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert canonical_form(p, [0, 1, 1]) != canonical_form(p, [1, 0, 1])
    assert canonical_form(p, [0, 1, 1]) == canonical_form(p, [1, 1, 0])


def test_guards():
    with pytest.raises(GuardExceeded):
        next(enumerate_free(11, 3))
    with pytest.raises(ValueError):
        next(enumerate_free(3, 1))
