import numpy as np
import pytest

from graphmix.errors import SupportViolationError, UnsupportedSpaceError
from graphmix.graphs import Census, Graph, GraphSpace, connectedness, dyad_census, edge_counts, gli
from graphmix.oracle import enumerate_graphs


def one_indexed(space, edges):
    return Graph.from_edges(space, [(i - 1, j - 1) for i, j in edges])


class TestGraphSpace:
    def test_capacities(self):
        assert GraphSpace(3).edge_capacity == 6
        assert GraphSpace(4, directed=False).edge_capacity == 6
        assert GraphSpace(3, loops=True).edge_capacity == 9
        assert GraphSpace(4, directed=False, loops=True).edge_capacity == 10
        assert GraphSpace(5).n_dyads == 10

    def test_rejects_nonpositive_order(self):
        with pytest.raises(ValueError):
            GraphSpace(0)

    def test_edge_index_is_lexicographic(self):
        rows, cols = GraphSpace(3).edge_index()
        assert list(zip(rows, cols)) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


class TestGraph:
    def test_loop_rejected_with_cell(self):
        adj = np.zeros((3, 3), dtype=bool)
        adj[1, 1] = True
        with pytest.raises(SupportViolationError, match=r"\(2,2\)"):
            Graph(GraphSpace(3), adj)

    def test_asymmetric_undirected_rejected(self):
        adj = np.zeros((3, 3), dtype=bool)
        adj[0, 1] = True
        with pytest.raises(SupportViolationError):
            Graph(GraphSpace(3, directed=False), adj)

    def test_adjacency_read_only(self):
        g = Graph.empty(GraphSpace(3))
        with pytest.raises(ValueError):
            g.adjacency[0, 1] = True

    def test_edge_vector_round_trip(self):
        rng = np.random.default_rng(0)
        for space in (GraphSpace(5), GraphSpace(5, directed=False), GraphSpace(4, loops=True)):
            x = rng.random(space.edge_capacity) < 0.4
            assert np.array_equal(Graph.from_edge_vector(space, x).edge_vector(), x)


class TestEdgeCounts:
    def test_empty(self):
        assert edge_counts(Graph.empty(GraphSpace(3))) == (0, 6)

    def test_complete(self):
        assert edge_counts(Graph.complete(GraphSpace(3))) == (6, 0)

    def test_undirected_path(self):
        g = one_indexed(GraphSpace(4, directed=False), [(1, 2), (2, 3), (3, 4)])
        assert edge_counts(g) == (3, 3)


class TestDyadCensus:
    def test_single_mutual(self):
        assert dyad_census(one_indexed(GraphSpace(2), [(1, 2), (2, 1)])) == (1, 0, 0)

    def test_one_asymmetric(self):
        assert dyad_census(one_indexed(GraphSpace(3), [(1, 2)])) == (0, 1, 2)

    def test_hand_enumerated(self):
        g = one_indexed(GraphSpace(3), [(1, 2), (2, 1), (2, 3), (3, 1)])
        assert dyad_census(g) == Census(1, 2, 0)

    @pytest.mark.parametrize("space", [GraphSpace(3, directed=False), GraphSpace(3, loops=True)])
    def test_unsupported_spaces(self, space):
        with pytest.raises(UnsupportedSpaceError):
            dyad_census(Graph.empty(space))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_identities_over_enumerated_space(self, n):
        space = GraphSpace(n)
        for g in enumerate_graphs(space):
            e, non = edge_counts(g)
            m, a, nn = dyad_census(g)
            assert e + non == space.edge_capacity
            assert m + a + nn == space.n_dyads
            assert e == 2 * m + a

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(1)
        space = GraphSpace(9)
        for _ in range(20):
            adj = rng.random((9, 9)) < 0.3
            np.fill_diagonal(adj, False)
            perm = rng.permutation(9)
            g = Graph(space, adj)
            h = Graph(space, adj[np.ix_(perm, perm)])
            assert dyad_census(g) == dyad_census(h)


class TestGli:
    def test_complete(self):
        r = gli(Graph.complete(GraphSpace(3)))
        assert (r.density, r.edgewise_reciprocity, r.connectedness) == (1.0, 1.0, 1.0)

    def test_empty(self):
        r = gli(Graph.empty(GraphSpace(5)))
        assert r.density == 0.0
        assert r.edgewise_reciprocity is None
        assert r.connectedness == 0.0

    def test_hand_counted(self):
        r = gli(one_indexed(GraphSpace(4), [(1, 2), (2, 1), (3, 4)]))
        assert r.density == pytest.approx(0.25)
        assert r.edgewise_reciprocity == pytest.approx(2 / 3)
        assert r.connectedness == pytest.approx(2 / 6)

    def test_connectedness_monotone_under_edge_addition(self):
        rng = np.random.default_rng(2)
        space = GraphSpace(10)
        rows, cols = space.edge_index()
        for _ in range(5):
            order = rng.permutation(space.edge_capacity)
            x = np.zeros(space.edge_capacity, dtype=bool)
            prev = 0.0
            for k in order:
                x[k] = True
                c = connectedness(Graph.from_edge_vector(space, x))
                assert c >= prev
                prev = c
            assert prev == 1.0
