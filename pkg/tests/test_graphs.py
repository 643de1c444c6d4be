import math

import numpy as np
import pytest

from lastmile.graphs import (
    ConnectivityError,
    RoadGraph,
    build_travel_time_matrix,
    crop_to_k_nearest,
    generate_random_graph,
    read_graph,
    read_node_edge_files,
    shortest_times_from,
    write_graph,
    write_node_edge_files,
)

from gridutil import grid_graph


def two_node_graph():
    return RoadGraph(nodes=((0, 0.0, 0.0), (1, 5.0, 0.0)),
                     edges=((0, 1, 5.0),), origin=0)


class TestTravelTimeMatrix:
    def test_single_edge(self):
        m = build_travel_time_matrix(two_node_graph(), (0, 1))
        assert m.times.tolist() == [[0.0, 5.0], [5.0, 0.0]]

    def test_triangle_relaxes_through_middle(self):
        g = RoadGraph(
            nodes=((0, 0.0, 0.0), (1, 1.0, 0.0), (2, 2.0, 0.0)),
            edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)),
            origin=0,
        )
        m = build_travel_time_matrix(g, (0, 2))
        assert m.time(0, 2) == 2.0

    def test_matches_single_source_oracle_on_random_graphs(self):
        for seed in range(10):
            g = generate_random_graph(30, seed=seed)
            m = build_travel_time_matrix(g, g.node_ids)
            for src in g.node_ids[::7]:
                d = shortest_times_from(g, src)
                row = m.times[m.index_of(src)]
                for j, t in enumerate(g.node_ids):
                    assert row[j] == pytest.approx(d[t], abs=1e-9)

    def test_large_graph_branch_matches_oracle(self):
        # past the node threshold the matrix switches to per-terminal search
        g = grid_graph(50, 45, seed=3)
        assert len(g.nodes) == 2250
        terminals = (g.origin, 0, 44, 2249, 1103, 997)
        m = build_travel_time_matrix(g, terminals)
        for t in terminals:
            d = shortest_times_from(g, t)
            for u in terminals:
                assert m.time(t, u) == pytest.approx(d[u], abs=1e-9)
        assert np.array_equal(m.times, m.times.T)
        assert np.all(np.diag(m.times) == 0.0)

    def test_unknown_terminal_rejected(self):
        with pytest.raises(ValueError):
            build_travel_time_matrix(two_node_graph(), (0, 99))

    def test_unreachable_terminal_is_connectivity_error(self):
        g = RoadGraph(
            nodes=((0, 0.0, 0.0), (1, 1.0, 0.0), (2, 9.0, 9.0)),
            edges=((0, 1, 1.0),),
            origin=0,
        )
        with pytest.raises(ConnectivityError):
            build_travel_time_matrix(g, (0, 2))

    def test_empty_terminals_rejected(self):
        with pytest.raises(ValueError):
            build_travel_time_matrix(two_node_graph(), ())


class TestShortestTimesFrom:
    def test_single_node(self):
        g = RoadGraph(nodes=((7, 0.0, 0.0),), edges=(), origin=7)
        assert shortest_times_from(g, 7) == {7: 0.0}

    def test_chain_sums(self):
        g = RoadGraph(
            nodes=((0, 0.0, 0.0), (1, 3.0, 0.0), (2, 7.0, 0.0)),
            edges=((0, 1, 3.0), (1, 2, 4.0)),
            origin=0,
        )
        assert shortest_times_from(g, 0) == {0: 0.0, 1: 3.0, 2: 7.0}

    def test_unreachable_nodes_absent(self):
        g = RoadGraph(
            nodes=((0, 0.0, 0.0), (1, 1.0, 0.0), (2, 9.0, 9.0)),
            edges=((0, 1, 1.0),),
            origin=0,
        )
        assert set(shortest_times_from(g, 0)) == {0, 1}

    def test_unknown_source_rejected(self):
        with pytest.raises(ValueError):
            shortest_times_from(two_node_graph(), 42)


class TestCrop:
    def test_identity_when_k_covers_graph(self):
        g = generate_random_graph(20, seed=4)
        assert crop_to_k_nearest(g, 20) == g
        assert crop_to_k_nearest(g, 500) == g

    def test_star_keeps_nearest_leaf(self):
        g = RoadGraph(
            nodes=((0, 0.0, 0.0), (1, 1.0, 0.0), (2, 2.0, 0.0), (3, 3.0, 0.0)),
            edges=((0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0)),
            origin=0,
        )
        c = crop_to_k_nearest(g, 2)
        assert set(c.node_ids) == {0, 1}
        assert c.origin == 0

    def test_retained_times_dominate_dropped(self):
        g = generate_random_graph(500, seed=9)
        c = crop_to_k_nearest(g, 100)
        d = shortest_times_from(g, g.origin)
        kept = set(c.node_ids)
        max_kept = max(d[i] for i in kept)
        min_dropped = min(d[i] for i in d if i not in kept)
        assert len(c.nodes) == 100
        assert max_kept <= min_dropped

    def test_crop_preserves_origin_shortest_times(self):
        g = generate_random_graph(300, seed=2)
        c = crop_to_k_nearest(g, 120)
        before = shortest_times_from(g, g.origin)
        after = shortest_times_from(c, c.origin)
        for node in c.node_ids:
            assert after[node] == pytest.approx(before[node], abs=1e-9)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            crop_to_k_nearest(two_node_graph(), 0)

    def test_drops_unreachable_nodes(self):
        g = RoadGraph(
            nodes=((0, 0.0, 0.0), (1, 1.0, 0.0), (2, 9.0, 9.0)),
            edges=((0, 1, 1.0),),
            origin=0,
        )
        c = crop_to_k_nearest(g, 3)
        assert set(c.node_ids) == {0, 1}


class TestGenerateRandomGraph:
    def test_single_vertex(self):
        g = generate_random_graph(1, seed=0)
        assert len(g.nodes) == 1 and len(g.edges) == 0

    def test_default_scale_connected_and_deterministic(self):
        g1 = generate_random_graph(35, seed=7)
        g2 = generate_random_graph(35, seed=7)
        g3 = generate_random_graph(35, seed=8)
        assert g1 == g2
        assert g1 != g3
        assert len(g1.nodes) == 35
        assert set(shortest_times_from(g1, g1.origin)) == set(g1.node_ids)

    def test_edge_weights_within_distance_band(self):
        for seed in (0, 1, 2):
            g = generate_random_graph(40, seed=seed)
            pos = {nid: (x, y) for nid, x, y in g.nodes}
            for u, v, w in g.edges:
                (xu, yu), (xv, yv) = pos[u], pos[v]
                d = math.hypot(xu - xv, yu - yv)
                assert d - 1e-9 <= w <= 2 * d + 1e-9

    def test_positions_inside_30km_square(self):
        g = generate_random_graph(60, seed=3)
        for _, x, y in g.nodes:
            assert 0.0 <= x <= 30.0 and 0.0 <= y <= 30.0


class TestRoadGraphValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            RoadGraph(nodes=((0, 0.0, 0.0),), edges=((0, 0, 1.0),), origin=0)

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValueError):
            RoadGraph(
                nodes=((0, 0.0, 0.0), (1, 1.0, 0.0)),
                edges=((0, 1, 1.0), (1, 0, 2.0)),
                origin=0,
            )

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            RoadGraph(
                nodes=((0, 0.0, 0.0), (1, 1.0, 0.0)),
                edges=((0, 1, 0.0),),
                origin=0,
            )

    def test_origin_must_exist(self):
        with pytest.raises(ValueError):
            RoadGraph(nodes=((0, 0.0, 0.0),), edges=(), origin=5)


class TestGraphIO:
    def test_round_trip(self, tmp_path):
        g = generate_random_graph(25, seed=13)
        path = tmp_path / "g.txt"
        write_graph(g, path)
        assert read_graph(path) == g

    def test_write_is_byte_deterministic(self, tmp_path):
        g = generate_random_graph(25, seed=13)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        write_graph(g, a)
        write_graph(g, b)
        assert a.read_bytes() == b.read_bytes()

    def test_malformed_edge_line_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("#origin 0\nN 0 0.0 0.0\nN 1 1.0 0.0\nE 0 one 5\n")
        with pytest.raises(ValueError, match="line 4"):
            read_graph(path)

    def test_duplicate_edge_in_file_rejected(self, tmp_path):
        path = tmp_path / "dup.txt"
        path.write_text(
            "#origin 0\nN 0 0.0 0.0\nN 1 1.0 0.0\nE 0 1 5.0\nE 1 0 6.0\n"
        )
        with pytest.raises(ValueError):
            read_graph(path)

    def test_node_edge_csv_round_trip(self, tmp_path):
        g = generate_random_graph(25, seed=6)
        nodes, edges = tmp_path / "n.csv", tmp_path / "e.csv"
        write_node_edge_files(g, nodes, edges)
        g2 = read_node_edge_files(nodes, edges, g.origin)
        assert g2 == g

    def test_import_then_crop_pipeline(self, tmp_path):
        big = grid_graph(40, 40, seed=5)
        nodes, edges = tmp_path / "n.csv", tmp_path / "e.csv"
        write_node_edge_files(big, nodes, edges)
        g = read_node_edge_files(nodes, edges, big.origin)
        c = crop_to_k_nearest(g, 1000)
        assert len(c.nodes) == 1000
        assert set(shortest_times_from(c, c.origin)) == set(c.node_ids)
