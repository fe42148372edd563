import math

import pytest

from cutsdp.graph import (
    Graph,
    ParseError,
    degree_lower_bound,
    format_edge_list,
    gen_erdos_renyi,
    gen_random_geometric,
    load_edge_list,
)
from cutsdp.ordering import exact_cutwidth_bruteforce
from cutsdp.rng import derive_rng


def path(n):
    return Graph(n, [(i, i + 1) for i in range(1, n)])


def complete(n):
    return Graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


class TestLoadEdgeList:
    def test_p3(self):
        g = load_edge_list("3 2\n1 2\n2 3")
        assert g.n == 3 and g.edges == {(1, 2), (2, 3)}

    def test_k2(self):
        g = load_edge_list("2 1\n1 2")
        assert g.n == 2 and g.edges == {(1, 2)}

    def test_vertex_out_of_range_names_line(self):
        with pytest.raises(ParseError, match="line 3.*4"):
            load_edge_list("3 2\n1 2\n1 4")

    def test_self_loop(self):
        with pytest.raises(ParseError, match="self-loop"):
            load_edge_list("3 2\n1 2\n2 2")

    def test_malformed_header(self):
        with pytest.raises(ParseError, match="header"):
            load_edge_list("3\n1 2")

    def test_malformed_edge_line(self):
        with pytest.raises(ParseError, match="line 2"):
            load_edge_list("3 1\n1 2 3")

    def test_missing_header(self):
        with pytest.raises(ParseError):
            load_edge_list("# only a comment\n")

    def test_edge_count_mismatch(self):
        with pytest.raises(ParseError, match="announced"):
            load_edge_list("3 3\n1 2\n2 3")

    def test_comments_and_blank_lines(self):
        g = load_edge_list("# a comment\n\n3 2\n# another\n1 2\n2 3\n")
        assert g.edges == {(1, 2), (2, 3)}

    def test_duplicates_collapsed_with_warning(self, caplog):
        with caplog.at_level("WARNING"):
            g = load_edge_list("3 3\n1 2\n2 1\n2 3")
        assert g.edges == {(1, 2), (2, 3)}
        assert "1 duplicate" in caplog.text

    def test_roundtrip(self):
        g = gen_erdos_renyi(9, 0.4, seed=5)
        assert load_edge_list(format_edge_list(g)) == g


class TestGenerators:
    def test_er_p0_empty(self):
        assert gen_erdos_renyi(5, 0.0, seed=2).num_edges() == 0

    def test_er_p1_complete(self):
        assert gen_erdos_renyi(5, 1.0, seed=2) == complete(5)

    def test_er_deterministic(self):
        assert gen_erdos_renyi(20, 0.5, seed=1) == gen_erdos_renyi(20, 0.5, seed=1)
        assert gen_erdos_renyi(20, 0.5, seed=1) != gen_erdos_renyi(20, 0.5, seed=2)

    def test_er_edge_count_statistics(self):
        # mean |E| over 1000 seeds vs binomial mean 95, 3 sigma of the mean
        counts = [gen_erdos_renyi(20, 0.5, seed=s).num_edges() for s in range(1000)]
        mean = sum(counts) / len(counts)
        sigma_mean = math.sqrt(190 * 0.25 / 1000)
        assert abs(mean - 95.0) <= 3 * sigma_mean

    def test_er_invalid_p(self):
        with pytest.raises(ValueError):
            gen_erdos_renyi(5, 1.5, seed=0)

    def test_rgg_d0_empty(self):
        assert gen_random_geometric(4, 0.0, seed=3).num_edges() == 0

    def test_rgg_d2_complete(self):
        # cube diameter sqrt(3) < 2
        assert gen_random_geometric(4, 2.0, seed=3) == complete(4)

    def test_rgg_deterministic_with_density(self):
        g1 = gen_random_geometric(20, 0.3, seed=1)
        g2 = gen_random_geometric(20, 0.3, seed=1)
        assert g1 == g2
        assert 0.0 <= g1.density() <= 1.0

    def test_rgg_threshold_is_closed(self):
        # at d just above an attained distance the edge must appear
        g_small = gen_random_geometric(10, 0.2, seed=7)
        g_big = gen_random_geometric(10, 0.9, seed=7)
        assert g_small.edges <= g_big.edges


class TestDegreeLowerBound:
    def test_path(self):
        assert degree_lower_bound(path(5)) == 1

    def test_complete4(self):
        assert degree_lower_bound(complete(4)) == 2

    def test_star_matches_exact(self):
        star = Graph(5, [(1, v) for v in range(2, 6)])
        assert degree_lower_bound(star) == 2
        assert exact_cutwidth_bruteforce(star)[0] == 2

    def test_edgeless(self):
        assert degree_lower_bound(Graph(4, [])) == 0

    def test_never_exceeds_exact(self):
        for s in range(20):
            g = gen_erdos_renyi(7, 0.5, seed=400 + s)
            assert degree_lower_bound(g) <= exact_cutwidth_bruteforce(g)[0]


class TestRelabelInvariance:
    def test_invariants_under_relabeling(self):
        rng = derive_rng(8, "relabel")
        for s in range(10):
            g = gen_erdos_renyi(7, 0.5, seed=500 + s)
            perm = list(rng.permutation(7) + 1)
            mapping = {v: int(perm[v - 1]) for v in range(1, 8)}
            h = g.relabeled(mapping)
            assert h.num_edges() == g.num_edges()
            assert h.max_degree() == g.max_degree()
            assert degree_lower_bound(h) == degree_lower_bound(g)
            assert exact_cutwidth_bruteforce(h)[0] == exact_cutwidth_bruteforce(g)[0]


class TestGraphType:
    def test_rejects_bad_edges(self):
        with pytest.raises(ValueError):
            Graph(3, [(1, 4)])
        with pytest.raises(ValueError):
            Graph(3, [(2, 2)])

    def test_adjacency_consistency(self):
        g = gen_erdos_renyi(8, 0.5, seed=1)
        a = g.adjacency
        assert (a == a.T).all() and not a.diagonal().any()
        assert a.sum() == 2 * g.num_edges()

    def test_adjacency_readonly(self):
        g = Graph(3, [(1, 2)])
        with pytest.raises(ValueError):
            g.adjacency[0, 0] = 1
