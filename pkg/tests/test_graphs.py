from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from twoprover.errors import NotBiregular, NotLeftRegular
from twoprover.graphs import (
    BipartiteGraph,
    complete_bipartite,
    cycle_graph,
    matching_graph,
)


def test_edges_canonicalized_sorted():
    g = BipartiteGraph(2, 2, ((1, 1), (0, 0), (1, 0), (0, 0)))
    assert g.edges == ((0, 0), (0, 0), (1, 0), (1, 1))


def test_degree_lists_consistent_with_multiset():
    g = BipartiteGraph(3, 2, ((0, 0), (0, 0), (1, 1), (2, 0)))
    assert g.left_degrees == (2, 1, 1)
    assert g.right_degrees == (3, 1)
    assert sum(g.left_degrees) == sum(g.right_degrees) == len(g.edges)


def test_out_of_range_edge_rejected():
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, ((2, 0),))
    with pytest.raises(ValueError):
        BipartiteGraph(2, 2, ((0, -1),))


def test_biregular_predicate():
    assert matching_graph(3).is_biregular
    assert complete_bipartite(2, 4).is_biregular
    assert cycle_graph(4).is_biregular
    assert not BipartiteGraph(2, 2, ((0, 0), (0, 1), (1, 0))).is_biregular


def test_left_degree_requires_regularity():
    irregular = BipartiteGraph(2, 2, ((0, 0), (0, 1), (1, 0)))
    with pytest.raises(NotLeftRegular):
        irregular.left_degree
    with pytest.raises(NotBiregular):
        irregular.require_biregular()


def test_multi_edges_first_class():
    g = BipartiteGraph(1, 1, ((0, 0), (0, 0)))
    assert g.multiplicity()[(0, 0)] == 2
    assert g.left_degrees == (2,)
    assert g.is_biregular


def test_neighbors_sorted_with_multiplicity():
    g = BipartiteGraph(2, 3, ((0, 2), (0, 0), (0, 0), (1, 1)))
    assert g.neighbors(0) == (0, 0, 2)
    assert g.left_neighbors(0) == (0, 0)


def test_json_round_trip():
    g = cycle_graph(4)
    assert BipartiteGraph.from_json_dict(g.to_json_dict()) == g


@given(
    st.integers(1, 4),
    st.integers(1, 4),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=12),
)
def test_edge_multiset_order_irrelevant(n_left, n_right, pairs):
    pairs = [(x % n_left, y % n_right) for x, y in pairs]
    forward = BipartiteGraph(n_left, n_right, tuple(pairs))
    backward = BipartiteGraph(n_left, n_right, tuple(reversed(pairs)))
    assert forward == backward
    assert sum(forward.left_degrees) == len(pairs)
