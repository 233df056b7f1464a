"""Testes da enumeração de grafos e dos fatores de simetria"""
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import PreconditionError
from core.graphs import Graph, enumerate_graphs, enumerate_simple_graphs, is_connected


def brute_force_aut(graph: Graph) -> int:
    """Permutações das pernas que preservam vértices e levam arestas em arestas"""
    legs = [(idx, pos) for idx, e in enumerate(graph.edges) for pos in range(len(e))]
    vertex_of = {(idx, pos): graph.edges[idx][pos] for idx, pos in legs}
    count = 0
    for image in permutations(legs):
        mapping = dict(zip(legs, image))
        if any(vertex_of[leg] != vertex_of[mapping[leg]] for leg in legs):
            continue
        ok = True
        for idx, e in enumerate(graph.edges):
            targets = {mapping[(idx, pos)][0] for pos in range(len(e))}
            if len(targets) != 1:
                ok = False
                break
        if ok:
            count += 1
    return count


class TestEnumeration:

    def test_single_vertex(self):
        graphs = enumerate_graphs(1, 0, max_betti=1)
        assert [g.edges for g in graphs] == [(), ((1, 1),)]

    def test_betti_bound(self):
        for graph in enumerate_graphs(2, 1, max_betti=1):
            assert graph.betti <= 1
            assert is_connected(graph.n_vertices, graph.m_leaves, graph.edges)

    def test_leaves_have_valence_one(self):
        for graph in enumerate_graphs(1, 3, max_betti=1):
            for leaf in graph.leaves:
                assert graph.valence(leaf) == 1

    def test_no_duplicates(self):
        graphs = enumerate_graphs(2, 2, max_betti=1)
        assert len({g.edges for g in graphs}) == len(graphs)

    def test_empty(self):
        assert enumerate_graphs(0, 0) == []

    def test_negative_sizes(self):
        with pytest.raises(PreconditionError):
            enumerate_graphs(-1, 0)

    def test_hyperedge_counts_betti(self):
        graph = Graph(1, 0, ((1, 1, 1),))
        assert graph.betti == 2
        assert graph.aut_order == 6


class TestSimpleGraphs:

    @pytest.mark.parametrize("m,count", [(1, 1), (2, 1), (3, 4), (4, 38)])
    def test_connected_labelled_counts(self, m, count):
        assert len(enumerate_simple_graphs(m)) == count

    @pytest.mark.parametrize("m,count", [(2, 1), (3, 3), (4, 16)])
    def test_trees(self, m, count):
        assert len(enumerate_simple_graphs(m, max_betti=0)) == count

    def test_simple_graphs_have_trivial_aut(self):
        assert all(g.aut_order == 1 for g in enumerate_simple_graphs(4))

    def test_needs_a_vertex(self):
        with pytest.raises(PreconditionError):
            enumerate_simple_graphs(0)


class TestAutomorphisms:

    @pytest.mark.parametrize("edges,expected", [
        (((1, 1),), 2),
        (((1, 2), (1, 2)), 2),
        (((1, 1), (1, 1)), 8),
        (((1, 1, 2),), 2),
        (((1, 2), (2, 2)), 2),
    ])
    def test_examples(self, edges, expected):
        graph = Graph(2 if any(2 in e for e in edges) else 1, 0, edges)
        assert graph.aut_order == expected

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 2), st.integers(0, 1), st.integers(0, 1))
    def test_formula_matches_brute_force(self, n, m, betti):
        for graph in enumerate_graphs(n, m, max_betti=betti, max_edge_size=3):
            if sum(len(e) for e in graph.edges) > 6:
                continue
            assert graph.aut_order == brute_force_aut(graph)
