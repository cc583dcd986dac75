import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgerecon.exceptions import CapacityError, GraphParseError, ParameterError
from edgerecon.graph import (
    Graph,
    build_graph,
    complete_graph,
    cycle_graph,
    degree_assortativity,
    edge_triangle_counts,
    generate_ba,
    generate_er,
    graph_stats,
    read_edge_list,
    star_graph,
    write_edge_list,
)


def brute_force_triangles(g):
    """Enumerate node triples; returns total and per-edge counts."""
    edges = {(int(i), int(j)) for i, j in g.edges}
    per_edge = dict.fromkeys(edges, 0)
    total = 0
    for a, b, c in itertools.combinations(range(g.n_nodes), 3):
        if (a, b) in edges and (a, c) in edges and (b, c) in edges:
            total += 1
            for e in ((a, b), (a, c), (b, c)):
                per_edge[e] += 1
    return total, np.array([per_edge[(int(i), int(j))] for i, j in g.edges])


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n_nodes))
    G.add_edges_from(map(tuple, g.edges.tolist()))
    return G


class TestBuildGraph:
    def test_triangle(self, k3):
        assert (k3.n_nodes, k3.n_edges) == (3, 3)
        assert k3.triangles.total == 1

    def test_duplicates_and_reversed_pairs_collapse(self):
        g = build_graph([("a", "b"), ("a", "b"), ("b", "a")])
        assert (g.n_nodes, g.n_edges) == (2, 1)

    def test_self_loop_dropped(self):
        g = build_graph([("a", "a"), ("a", "b")])
        assert (g.n_nodes, g.n_edges) == (2, 1)

    def test_empty_input(self):
        g = build_graph([])
        assert (g.n_nodes, g.n_edges) == (0, 0)
        assert graph_stats(g).triangles == 0

    def test_labels_stay_strings(self):
        g = build_graph([("007", "7")])
        assert g.n_nodes == 2
        assert set(g.labels) == {"007", "7"}

    def test_explicit_nodes_kept(self):
        g = build_graph([("a", "b")], nodes=["z"])
        assert g.n_nodes == 3
        assert g.degrees[g.label_index["z"]] == 0

    def test_malformed_pair(self):
        with pytest.raises(GraphParseError, match="2"):
            build_graph([("a", "b"), ("c",)])

    def test_invariants(self, er_small):
        g = er_small
        assert np.all(g.edges[:, 0] < g.edges[:, 1])
        assert len(np.unique(g.edges, axis=0)) == g.n_edges
        assert g.degrees.sum() == 2 * g.n_edges
        a = g.adjacency
        assert (a != a.T).nnz == 0
        assert a.diagonal().sum() == 0

    def test_arrays_are_read_only(self, er_small):
        with pytest.raises(ValueError):
            er_small.edges[0, 0] = 5


class TestGenerators:
    def test_er_size(self):
        g = generate_er(1000, 10000, seed=1)
        assert (g.n_nodes, g.n_edges) == (1000, 10000)

    def test_er_k3_and_k5(self):
        assert generate_er(3, 3, seed=0).edge_set() == complete_graph(3).edge_set()
        g = generate_er(5, 10, seed=0)
        assert g.triangles.total == 10

    def test_er_capacity(self):
        with pytest.raises(CapacityError):
            generate_er(4, 7, seed=0)

    def test_er_reproducible(self):
        a, b = generate_er(300, 900, seed=11), generate_er(300, 900, seed=11)
        assert np.array_equal(a.edges, b.edges)
        assert not np.array_equal(a.edges, generate_er(300, 900, seed=12).edges)

    def test_er_is_uniform_over_pairs(self):
        # every pair of a 5-node graph equally likely to be among 3 chosen edges
        counts = np.zeros((5, 5))
        for s in range(3000):
            for i, j in generate_er(5, 3, seed=s).edges:
                counts[i, j] += 1
        freq = counts[np.triu_indices(5, 1)] / 3000
        assert np.allclose(freq, 0.3, atol=0.04)

    def test_ba_size_matches_table(self):
        g = generate_ba(1000, 10, seed=1)
        assert (g.n_nodes, g.n_edges) == (1000, 9900)

    def test_ba_complete_seed(self):
        g = generate_ba(11, 10, seed=0, seed_graph="complete")
        assert g.edge_set() == complete_graph(11).edge_set()
        g = generate_ba(1000, 10, seed=0, seed_graph="complete")
        assert g.n_edges == 55 + 10 * 989

    def test_ba_tree(self):
        g = generate_ba(100, 1, seed=4)
        assert g.n_edges == 99
        assert g.triangles.total == 0
        assert nx.is_tree(to_nx(g))

    def test_ba_reproducible_and_min_degree(self):
        a, b = generate_ba(300, 5, seed=2), generate_ba(300, 5, seed=2)
        assert np.array_equal(a.edges, b.edges)
        assert a.degrees.min() >= 1
        assert a.degrees[6:].min() >= 5

    @pytest.mark.parametrize("n,m", [(5, 5), (3, 0)])
    def test_ba_invalid(self, n, m):
        with pytest.raises(ParameterError):
            generate_ba(n, m, seed=0)


class TestTriangles:
    def test_k3(self):
        t = edge_triangle_counts(complete_graph(3))
        assert t.edge_counts.tolist() == [1, 1, 1]
        assert t.total == 1

    def test_k4(self):
        t = edge_triangle_counts(complete_graph(4))
        assert t.edge_counts.tolist() == [2] * 6
        assert t.total == 4

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(3, 30), density=st.floats(0.05, 0.9), seed=st.integers(0, 10**6))
    def test_matches_brute_force(self, n, density, seed):
        m = int(density * n * (n - 1) / 2)
        g = generate_er(n, m, seed=seed)
        total, per_edge = brute_force_triangles(g)
        tri = edge_triangle_counts(g)
        assert tri.total == total
        assert np.array_equal(tri.edge_counts, per_edge)
        assert tri.edge_counts.sum() % 3 == 0

    def test_node_counts_identity(self, er_small):
        tri = er_small.triangles
        assert np.array_equal(tri.node_counts, np.array(list(nx.triangles(to_nx(er_small)).values())))

    def test_chunking_does_not_change_counts(self, er_small):
        a = edge_triangle_counts(er_small)
        b = edge_triangle_counts(er_small, chunk_size=7)
        assert np.array_equal(a.edge_counts, b.edge_counts)


class TestStats:
    def test_k3(self):
        st_ = graph_stats(complete_graph(3))
        assert st_.assortativity == 0.0 and st_.assortativity_degenerate
        assert st_.mean_clustering == 1.0
        assert st_.mean_edge_triangles == 1.0

    def test_star(self):
        st_ = graph_stats(star_graph(5))
        assert st_.triangles == 0 and st_.mean_clustering == 0.0
        assert st_.max_degree == 5

    def test_ring_degenerate(self):
        rho, degenerate = degree_assortativity(cycle_graph(6))
        assert (rho, degenerate) == (0.0, True)

    def test_against_networkx(self):
        g = generate_ba(400, 4, seed=9)
        G = to_nx(g)
        st_ = graph_stats(g)
        assert st_.assortativity == pytest.approx(nx.degree_assortativity_coefficient(G), abs=1e-12)
        assert st_.mean_clustering == pytest.approx(nx.average_clustering(G), abs=1e-12)
        assert st_.triangles == sum(nx.triangles(G).values()) // 3

    def test_er_table_values(self):
        # reference ER(1000, 10000) values C=0.021, T_l=0.41; +-30%
        st_ = graph_stats(generate_er(1000, 10000, seed=5))
        assert st_.mean_clustering == pytest.approx(0.021, rel=0.3)
        assert st_.mean_edge_triangles == pytest.approx(0.41, rel=0.3)
        assert -1.0 <= st_.assortativity <= 1.0


class TestEdgeListIO:
    def test_read_k3(self, tmp_path):
        f = tmp_path / "k3.txt"
        f.write_text("a b\nb c\na c")
        g = read_edge_list(f)
        assert (g.n_nodes, g.n_edges, g.triangles.total) == (3, 3, 1)

    def test_comments_and_extra_columns(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("# comment header\n% konect style\n\n1 2 1700000000\n2 3\n")
        g = read_edge_list(f)
        assert g.n_edges == 2

    def test_malformed_line_reports_line_number(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("a b\nlonely\n")
        with pytest.raises(GraphParseError, match=":2:"):
            read_edge_list(f)

    def test_missing_file(self, tmp_path):
        with pytest.raises(GraphParseError):
            read_edge_list(tmp_path / "nope.txt")

    @pytest.mark.parametrize("suffix", [".txt", ".txt.gz"])
    def test_round_trip(self, tmp_path, suffix):
        g = generate_er(100, 300, seed=8)
        f = tmp_path / f"er{suffix}"
        write_edge_list(g, f, header=["generated"])
        h = read_edge_list(f)
        assert h.edge_set() == g.edge_set()


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ParameterError):
        Graph.from_edges(2, [(0, 2)])
