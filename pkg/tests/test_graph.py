import random

import pytest

from decoyrt.graph import (
    GraphError,
    Interval,
    Node,
    NodeKind,
    TemporalPath,
    build_graph,
    first_contact,
    first_path_violation,
    path_from_graph,
    path_metrics,
    remove_nodes,
    response_time,
    validate_path,
)
from decoyrt.instances import random_instance
from decoyrt.reachability import ea_dijkstra, enumerate_temporal_paths


def tiny_nodes(n):
    nodes = [Node(i, f"n{i}") for i in range(n - 1)]
    nodes.append(Node(n - 1, "DA", NodeKind.DOMAIN_ADMIN))
    return nodes


class TestBuildGraph:
    def test_direct_construction(self):
        g = build_graph(tiny_nodes(3), [(0, 1)], {(1, 2): [3]}, Interval(1, 10))
        assert g.eps_s == 1 and g.eps_d == 1
        assert g.has_edge(0, 1) and g.has_edge(1, 2)

    def test_unsorted_labels_rejected(self):
        with pytest.raises(GraphError, match="unsorted"):
            build_graph(tiny_nodes(3), [], {(1, 2): [5, 3]}, Interval(1, 10))

    def test_full_coverage_dynamic_rejected_by_default(self):
        labels = list(range(1, 10))  # every admissible departure in [1, 10]
        with pytest.raises(GraphError, match="static"):
            build_graph(tiny_nodes(3), [], {(0, 1): labels}, Interval(1, 10))
        g = build_graph(
            tiny_nodes(3), [], {(0, 1): labels}, Interval(1, 10),
            reclassify_full_dynamic=True,
        )
        assert g.eps_s == 1 and g.eps_d == 0

    def test_duplicate_pair_rejected(self):
        with pytest.raises(GraphError, match="duplicate"):
            build_graph(tiny_nodes(3), [(0, 1)], {(0, 1): [2]}, Interval(1, 10))

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError, match="self-loop"):
            build_graph(tiny_nodes(3), [(1, 1)], {}, Interval(1, 10))

    def test_label_out_of_interval_rejected(self):
        with pytest.raises(GraphError, match="label out of interval"):
            build_graph(tiny_nodes(3), [], {(0, 1): [10]}, Interval(1, 10))


class TestTimeLabels:
    def test_static_full_range(self):
        g = build_graph(tiny_nodes(3), [(0, 1)], {}, Interval(1, 10))
        assert list(g.time_labels(0, 1)) == list(range(1, 10))

    def test_dynamic_stored(self):
        g = build_graph(tiny_nodes(3), [], {(0, 1): [4, 6]}, Interval(1, 10))
        assert list(g.time_labels(0, 1)) == [4, 6]

    def test_absent_edge_errors(self):
        g = build_graph(tiny_nodes(3), [(0, 1)], {}, Interval(1, 10))
        with pytest.raises(GraphError, match="unknown edge"):
            g.time_labels(1, 0)

    def test_static_label_count_accounts_for_duration(self):
        g = build_graph(
            tiny_nodes(3), [(0, 1)], {}, Interval(1, 10), durations={(0, 1): 3}
        )
        lifetime = g.interval.lifetime
        assert len(g.time_labels(0, 1)) == lifetime - 3 + 1

    def test_dynamic_always_shorter_than_static_range(self):
        rng = random.Random(0)
        for _ in range(50):
            inst = random_instance(rng)
            g = inst.graph
            full = g.interval.lifetime  # duration-1 static label count
            for (u, v), labels in g.dynamic_edges().items():
                assert len(labels) < full


class TestValidatePath:
    def test_session_hop_path_is_valid(self, f1, f1_ids):
        # two dynamic hops then a static one
        edges = [
            (f1_ids["s2"], f1_ids["Cp1"], 1),
            (f1_ids["Cp1"], f1_ids["Cp3"], 2),
            (f1_ids["Cp3"], f1_ids["U3"], 4),
        ]
        assert validate_path(f1.graph, path_from_graph(f1.graph, edges))

    def test_non_increasing_rejected(self):
        g = build_graph(tiny_nodes(4), [(0, 1), (1, 2)], {}, Interval(1, 10))
        path = TemporalPath(((0, 1, 3), (1, 2, 3)))
        assert not validate_path(g, path)
        assert first_path_violation(g, path) == (1, "non-increasing time")

    def test_broken_chain_rejected(self):
        g = build_graph(tiny_nodes(5), [(0, 1), (2, 3)], {}, Interval(1, 10))
        path = TemporalPath(((0, 1, 1), (2, 3, 2)))
        assert first_path_violation(g, path) == (1, "broken chain")

    def test_repeated_vertex_rejected(self):
        g = build_graph(tiny_nodes(3), [(0, 1), (1, 0)], {}, Interval(1, 10))
        path = TemporalPath(((0, 1, 1), (1, 0, 2)))
        assert first_path_violation(g, path) == (1, "repeated vertex")

    def test_missing_label_rejected(self):
        g = build_graph(tiny_nodes(3), [], {(0, 1): [4, 6]}, Interval(1, 10))
        assert not validate_path(g, TemporalPath(((0, 1, 5),)))

    def test_valid_on_subgraph_implies_valid_on_supergraph(self):
        rng = random.Random(1)
        for _ in range(30):
            inst = random_instance(rng, max_nodes=8)
            g = inst.graph
            removable = sorted(inst.blockable)[:1]
            sub = remove_nodes(g, removable)
            for s in sorted(inst.entries):
                for path in enumerate_temporal_paths(sub, s, inst.da, max_paths=200):
                    assert validate_path(sub, path)
                    assert validate_path(g, path)


class TestPathMetrics:
    def test_walkthrough_metrics(self, f1, f1_ids):
        path = path_from_graph(
            f1.graph,
            [
                (f1_ids["s1"], f1_ids["Gr1"], 2),
                (f1_ids["Gr1"], f1_ids["Cp2"], 4),
                (f1_ids["Cp2"], f1_ids["U2"], 6),
                (f1_ids["U2"], f1_ids["DA"], 7),
            ],
        )
        assert path_metrics(path) == (2, 8, 6)

    def test_single_edge(self):
        assert path_metrics(TemporalPath(((0, 1, 5),))) == (5, 6, 1)

    def test_last_edge_duration_extends_end(self):
        path = TemporalPath(((0, 1, 3), (1, 2, 7)), durations=(1, 2))
        assert path_metrics(path) == (3, 9, 6)

    def test_empty_path_errors(self):
        with pytest.raises(GraphError, match="empty"):
            path_metrics(TemporalPath(()))


class TestFirstContact:
    def example_path(self, f1, f1_ids):
        return path_from_graph(
            f1.graph,
            [
                (f1_ids["s1"], f1_ids["Gr1"], 2),
                (f1_ids["Gr1"], f1_ids["Cp2"], 4),
                (f1_ids["Cp2"], f1_ids["U2"], 6),
                (f1_ids["U2"], f1_ids["DA"], 7),
            ],
        )

    def test_walkthrough_contact(self, f1, f1_ids):
        path = self.example_path(f1, f1_ids)
        assert first_contact(path, {f1_ids["Cp2"], f1_ids["Cp3"]}) == (f1_ids["Cp2"], 5)

    def test_disjoint_cut_no_contact(self, f1, f1_ids):
        path = self.example_path(f1, f1_ids)
        assert first_contact(path, {f1_ids["Cp3"]}) is None

    def test_earlier_index_wins(self, f1, f1_ids):
        path = self.example_path(f1, f1_ids)
        contact = first_contact(path, {f1_ids["Cp2"], f1_ids["U2"]})
        assert contact == (f1_ids["Cp2"], 5)

    def test_source_never_contacts(self):
        path = TemporalPath(((0, 1, 1),))
        assert first_contact(path, {0}) is None


class TestResponseTime:
    def test_walkthrough_value(self, f1, f1_ids):
        path = path_from_graph(
            f1.graph,
            [
                (f1_ids["s1"], f1_ids["Gr1"], 2),
                (f1_ids["Gr1"], f1_ids["Cp2"], 4),
                (f1_ids["Cp2"], f1_ids["U2"], 6),
                (f1_ids["U2"], f1_ids["DA"], 7),
            ],
        )
        assert response_time(path, {f1_ids["Cp2"], f1_ids["Cp3"]}) == 3

    def test_contact_on_last_interior_node(self):
        path = TemporalPath(((0, 1, 6), (1, 2, 7)))
        assert response_time(path, {1}) == 1

    def test_no_contact_is_none(self):
        path = TemporalPath(((0, 1, 6), (1, 2, 7)))
        assert response_time(path, {5}) is None

    def test_wrong_target_errors(self):
        path = TemporalPath(((0, 1, 6), (1, 2, 7)))
        with pytest.raises(GraphError, match="ends at"):
            response_time(path, {1}, da=9)

    def test_bounds_and_off_path_invariance(self):
        rng = random.Random(2)
        checked = 0
        while checked < 40:
            inst = random_instance(rng, max_nodes=8)
            for s in sorted(inst.entries):
                paths = enumerate_temporal_paths(inst.graph, s, inst.da, max_paths=300)
                for path in paths[:5]:
                    interior = [v for v in path.vertices()[1:-1] if v in inst.blockable]
                    if not interior:
                        continue
                    cut = {interior[0]}
                    rt = response_time(path, cut)
                    assert 1 <= rt <= path_metrics(path)[2]
                    off_path = [
                        v for v in inst.blockable if v not in path.vertices()
                    ]
                    assert response_time(path, cut | set(off_path[:2])) == rt
                    checked += 1


class TestRemoveNodes:
    def test_empty_removal_is_identity(self, f1):
        g = remove_nodes(f1.graph, set())
        assert g.node_count == f1.graph.node_count
        assert list(g.edges()) == list(f1.graph.edges())

    def test_branch_severed(self, f1, f1_ids):
        g = remove_nodes(f1.graph, {f1_ids["Cp2"]})
        assert enumerate_temporal_paths(g, f1_ids["s1"], f1_ids["DA"]) == []
        amap = ea_dijkstra(g, {f1_ids["s1"]})
        assert f1_ids["DA"] not in amap.arrival

    def test_remove_all_but_target(self, f1, f1_ids):
        keep = {f1_ids["DA"]}
        g = remove_nodes(f1.graph, set(f1.graph.node_ids) - keep)
        assert g.node_ids == [f1_ids["DA"]]
        assert list(g.edges()) == []

    def test_target_protected(self, f1, f1_ids):
        with pytest.raises(GraphError, match="domain admin"):
            remove_nodes(f1.graph, {f1_ids["DA"]})
