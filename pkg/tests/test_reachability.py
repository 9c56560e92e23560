import random

import pytest

from decoyrt.graph import (
    GraphError,
    Interval,
    Node,
    NodeKind,
    build_graph,
    path_metrics,
    remove_nodes,
    validate_path,
)
from decoyrt.instances import random_instance
from decoyrt.reachability import (
    OracleCapExceeded,
    ea_bruteforce,
    ea_dijkstra,
    ea_wu,
    edge_stream,
    enumerate_temporal_paths,
    is_temporal_cut,
    random_temporal_path,
    reconstruct_path,
)


def chain_graph(length=3, interval=Interval(0, 9)):
    nodes = [Node(i, f"n{i}") for i in range(length)]
    nodes.append(Node(length, "DA", NodeKind.DOMAIN_ADMIN))
    edges = [(i, i + 1) for i in range(length)]
    return build_graph(nodes, edges, {}, interval)


class TestEarliestArrivalDijkstra:
    def test_session_branch_arrivals(self, f1, f1_ids):
        # on this fixture the computer-to-user leg is static, so the
        # session branch reaches U3 one step after Cp3
        amap = ea_dijkstra(f1.graph, {f1_ids["s2"]})
        named = {f1.graph.node(k).name: v for k, v in amap.arrival.items()}
        assert named == {"s2": 1, "Cp1": 2, "Cp3": 3, "U3": 4, "DA": 5}

    def test_source_arrival_is_query_start(self, f1, f1_ids):
        amap = ea_dijkstra(f1.graph, {f1_ids["s1"]}, Interval(2, 10))
        assert amap.arrival[f1_ids["s1"]] == 2

    def test_agrees_with_bruteforce_on_random_graphs(self):
        rng = random.Random(3)
        for _ in range(150):
            inst = random_instance(rng)
            a = ea_dijkstra(inst.graph, inst.entries)
            c = ea_bruteforce(inst.graph, inst.entries)
            assert a.arrival == c.arrival


class TestEarliestArrivalWu:
    def test_matches_dijkstra_on_fixture(self, f1):
        a = ea_dijkstra(f1.graph, f1.entries)
        b = ea_wu(f1.graph, f1.entries)
        assert a.arrival == b.arrival

    def test_static_chain(self):
        g = chain_graph(3)
        amap = ea_wu(g, {0})
        assert [amap.arrival[i] for i in range(4)] == [0, 1, 2, 3]

    def test_agrees_with_dijkstra_on_random_graphs(self):
        rng = random.Random(4)
        for _ in range(150):
            inst = random_instance(rng)
            assert (
                ea_wu(inst.graph, inst.entries).arrival
                == ea_dijkstra(inst.graph, inst.entries).arrival
            )

    def test_scan_counter_is_stream_length(self, f1):
        stream = edge_stream(f1.graph)
        amap = ea_wu(f1.graph, f1.entries, stream=stream)
        assert amap.ops == len(stream)


class TestEdgeStream:
    def test_static_duplication_count(self):
        nodes = [Node(0, "a"), Node(1, "DA", NodeKind.DOMAIN_ADMIN)]
        g = build_graph(nodes, [(0, 1)], {}, Interval(1, 4))
        assert edge_stream(g) == [(0, 1, 1), (0, 1, 2), (0, 1, 3)]

    def test_fixture_length_matches_formula(self, f1):
        g = f1.graph
        expected = g.eps_s * g.interval.lifetime  # duration-1 static edges
        expected += sum(len(ls) for ls in g.dynamic_edges().values())
        assert len(edge_stream(g)) == expected == 57

    def test_empty_graph(self):
        nodes = [Node(0, "a"), Node(1, "DA", NodeKind.DOMAIN_ADMIN)]
        g = build_graph(nodes, [], {}, Interval(1, 4))
        assert edge_stream(g) == []

    def test_sorted_by_time(self):
        rng = random.Random(5)
        for _ in range(20):
            inst = random_instance(rng)
            stream = edge_stream(inst.graph)
            assert all(a[2] <= b[2] for a, b in zip(stream, stream[1:]))


class TestReconstructPath:
    def test_witness_reaches_target_at_arrival(self, f1, f1_ids):
        amap = ea_dijkstra(f1.graph, {f1_ids["s2"]})
        path = reconstruct_path(amap, f1_ids["U3"])
        assert validate_path(f1.graph, path)
        assert path.target == f1_ids["U3"]
        assert path_metrics(path)[1] == amap.arrival[f1_ids["U3"]]

    def test_source_reconstructs_empty(self, f1, f1_ids):
        amap = ea_dijkstra(f1.graph, {f1_ids["s2"]})
        assert len(reconstruct_path(amap, f1_ids["s2"])) == 0

    def test_unreachable_errors(self, f1, f1_ids):
        amap = ea_dijkstra(f1.graph, {f1_ids["s2"]})
        with pytest.raises(GraphError, match="unreachable"):
            reconstruct_path(amap, f1_ids["s1"])

    def test_every_prefix_is_earliest(self):
        # prefix-optimality of reconstructed witnesses
        rng = random.Random(6)
        for _ in range(60):
            inst = random_instance(rng)
            amap = ea_dijkstra(inst.graph, inst.entries)
            for v in sorted(amap.arrival):
                path = reconstruct_path(amap, v)
                for k in range(1, len(path) + 1):
                    prefix_end = path.edges[k - 1][1]
                    end = path.edges[k - 1][2] + path.durations[k - 1]
                    assert end == amap.arrival[prefix_end]


class TestBruteforce:
    def test_chain(self):
        g = chain_graph(3)
        amap = ea_bruteforce(g, {0})
        assert [amap.arrival[i] for i in range(4)] == [0, 1, 2, 3]

    def test_fixture_agreement(self, f1):
        assert (
            ea_bruteforce(f1.graph, f1.entries).arrival
            == ea_dijkstra(f1.graph, f1.entries).arrival
        )

    def test_cap(self, f1):
        with pytest.raises(OracleCapExceeded):
            ea_bruteforce(f1.graph, f1.entries, cap=10)

    def test_witnesses_validate(self):
        rng = random.Random(7)
        for _ in range(30):
            inst = random_instance(rng)
            amap = ea_bruteforce(inst.graph, inst.entries)
            for v in sorted(amap.arrival):
                assert validate_path(inst.graph, reconstruct_path(amap, v))


class TestInvariantProperties:
    def test_three_way_equivalence(self):
        rng = random.Random(8)
        for _ in range(100):
            inst = random_instance(rng)
            a = ea_dijkstra(inst.graph, inst.entries)
            b = ea_wu(inst.graph, inst.entries)
            c = ea_bruteforce(inst.graph, inst.entries)
            assert a.arrival == b.arrival == c.arrival

    def test_interval_widening_never_delays(self):
        rng = random.Random(9)
        for _ in range(50):
            inst = random_instance(rng, max_lifetime=10)
            g = inst.graph
            ta, to = g.interval.t_alpha, g.interval.t_omega
            if to - ta < 3:
                continue
            narrow = Interval(ta + 1, to - 1)
            wide = g.interval
            a_narrow = ea_dijkstra(g, inst.entries, narrow)
            a_wide = ea_dijkstra(g, inst.entries, wide)
            for v, t in a_narrow.arrival.items():
                assert a_wide.arrival[v] <= t

    def test_dijkstra_relaxes_each_underlying_edge_at_most_once(self):
        rng = random.Random(10)
        for _ in range(40):
            inst = random_instance(rng)
            g = inst.graph
            amap = ea_dijkstra(g, inst.entries)
            assert amap.ops <= g.eps_s + g.eps_d
            assert amap.ops <= g.eps_s + g.eps_d * g.interval.lifetime


class TestEnumerateTemporalPaths:
    def test_fixture_static_branch_label_combinations(self, f1, f1_ids):
        # four static hops over nine departure slots: C(9, 4) combinations
        paths = enumerate_temporal_paths(f1.graph, f1_ids["s1"], f1_ids["DA"])
        assert len(paths) == 126
        expected_nodes = (
            f1_ids["s1"], f1_ids["Gr1"], f1_ids["Cp2"], f1_ids["U2"], f1_ids["DA"],
        )
        for path in paths:
            assert validate_path(f1.graph, path)
            assert path.vertices() == expected_nodes

    def test_source_equals_target(self, f1, f1_ids):
        assert enumerate_temporal_paths(f1.graph, f1_ids["DA"], f1_ids["DA"]) == []

    def test_disconnected_pair(self, f1, f1_ids):
        assert enumerate_temporal_paths(f1.graph, f1_ids["U2"], f1_ids["s1"]) == []

    def test_cap_raises(self, f1, f1_ids):
        with pytest.raises(OracleCapExceeded):
            enumerate_temporal_paths(f1.graph, f1_ids["s1"], f1_ids["DA"], max_paths=10)

    def test_deterministic_order(self, f1, f1_ids):
        a = enumerate_temporal_paths(f1.graph, f1_ids["s2"], f1_ids["DA"])
        b = enumerate_temporal_paths(f1.graph, f1_ids["s2"], f1_ids["DA"])
        assert [p.edges for p in a] == [p.edges for p in b]


class TestRandomTemporalPath:
    def test_none_when_cut(self, f1, f1_ids):
        g = remove_nodes(f1.graph, {f1_ids["Cp2"], f1_ids["Cp3"]})
        rng = random.Random(0)
        assert random_temporal_path(g, f1.entries, f1_ids["DA"], rng=rng) is None

    def test_returns_valid_attack_path(self, f1, f1_ids):
        rng = random.Random(1)
        path = random_temporal_path(f1.graph, {f1_ids["s1"]}, f1_ids["DA"], rng=rng)
        assert path is not None
        assert validate_path(f1.graph, path)
        assert path.target == f1_ids["DA"]
        assert path.source == f1_ids["s1"]

    def test_unique_route_is_found(self, chain4):
        rng = random.Random(2)
        path = random_temporal_path(chain4.graph, chain4.entries, chain4.da, rng=rng)
        assert path.vertices() == (0, 1, 2, 3)

    def test_seed_determinism(self, f1):
        p1 = random_temporal_path(f1.graph, f1.entries, f1.da, rng=random.Random(3))
        p2 = random_temporal_path(f1.graph, f1.entries, f1.da, rng=random.Random(3))
        assert p1.edges == p2.edges


class TestIsTemporalCut:
    def test_both_branches_blocked(self, f1, f1_ids):
        assert is_temporal_cut(f1, {f1_ids["Cp2"], f1_ids["Cp3"]})

    def test_empty_placement(self, f1):
        assert not is_temporal_cut(f1, set())

    def test_single_branch_survives(self, f1, f1_ids):
        assert not is_temporal_cut(f1, {f1_ids["Cp2"]})

    def test_matches_path_enumeration(self):
        rng = random.Random(11)
        for _ in range(60):
            inst = random_instance(rng, max_nodes=9)
            k = rng.randint(0, min(3, len(inst.blockable)))
            cut = set(rng.sample(sorted(inst.blockable), k))
            survivors = False
            for s in sorted(inst.entries):
                for path in enumerate_temporal_paths(
                    inst.graph, s, inst.da, max_paths=100_000
                ):
                    if all(v not in cut for v in path.vertices()):
                        survivors = True
                        break
                if survivors:
                    break
            assert is_temporal_cut(inst, cut) == (not survivors)

    def test_unblockable_placement_rejected(self, f1):
        with pytest.raises(GraphError, match="unblockable"):
            is_temporal_cut(f1, {f1.da})
