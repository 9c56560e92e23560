"""Earliest-arrival computations on temporal graphs.

Three interchangeable engines compute multi-source earliest arrivals:

* :func:`ea_dijkstra` — priority-queue scan over underlying edges; static
  edges are relaxed in O(1) without touching their (implied) label range,
  so runtime is insensitive to the interval length on static-heavy graphs.
* :func:`ea_wu` — one-pass scan of the chronological edge stream in which
  every static edge is duplicated once per admissible departure time.
* :func:`ea_bruteforce` — exhaustive expansion of the (node, time) product
  space; the test oracle.

All three agree exactly on arrival values.  Path enumeration/sampling and the
temporal-cut predicate round out the module.
"""

from __future__ import annotations

import heapq
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import (
    GraphError,
    Instance,
    Interval,
    TemporalGraph,
    TemporalPath,
    path_from_graph,
    remove_nodes,
)


class OracleCapExceeded(RuntimeError):
    """An exhaustive oracle was asked to explore beyond its configured cap."""


@dataclass
class ArrivalMap:
    """Earliest arrival time per reachable node, with a predecessor tree.

    ``arrival[s]`` equals the query start for every source; unreachable nodes
    are absent.  ``predecessor[v] = (u, departure_label)`` supports
    reconstruction of one optimal witness path.
    """

    graph: TemporalGraph
    sources: frozenset[int]
    start: int
    arrival: dict[int, int] = field(default_factory=dict)
    predecessor: dict[int, tuple[int, int]] = field(default_factory=dict)
    ops: int = 0
    algorithm: str = ""

    def reached(self, v: int) -> bool:
        return v in self.arrival


def _query_interval(graph: TemporalGraph, interval: Optional[Interval]) -> Interval:
    if interval is None:
        return graph.interval
    if not graph.interval.contains(interval):
        raise GraphError(
            f"query interval [{interval.t_alpha}, {interval.t_omega}] exceeds "
            f"graph interval [{graph.interval.t_alpha}, {graph.interval.t_omega}]"
        )
    return interval


def ea_dijkstra(
    graph: TemporalGraph,
    sources: Iterable[int],
    interval: Optional[Interval] = None,
) -> ArrivalMap:
    """Earliest arrivals by extract-min over (arrival, node id).

    Each node is finalized at most once; stale queue entries are skipped
    lazily.  ``ops`` counts underlying-edge relaxations, at most one per edge.
    """
    interval = _query_interval(graph, interval)
    qa, qo = interval.t_alpha, interval.t_omega
    srcs = frozenset(s for s in sources if graph.has_node(s))
    if not srcs:
        raise GraphError("no sources present in graph")
    result = ArrivalMap(graph=graph, sources=srcs, start=qa, algorithm="dijkstra")
    heap: list[tuple[int, int]] = [(qa, s) for s in sorted(srcs)]
    heapq.heapify(heap)
    seen: dict[int, int] = {s: qa for s in srcs}
    arrival = result.arrival
    pred = result.predecessor
    lo_static = graph.interval.t_alpha
    while heap:
        t_u, u = heapq.heappop(heap)
        if u in arrival:
            continue
        arrival[u] = t_u
        for v, info in graph.successors(u):
            result.ops += 1
            if v in arrival:
                continue
            dur = info.duration
            if info.labels is None:
                t_dep = t_u if t_u >= lo_static else lo_static
                if t_dep > graph.interval.t_omega - dur:
                    continue
            else:
                idx = bisect_left(info.labels, t_u)
                if idx == len(info.labels):
                    continue
                t_dep = info.labels[idx]
            v_arr = t_dep + dur
            if v_arr > qo:
                continue
            if v not in seen or v_arr < seen[v]:
                seen[v] = v_arr
                pred[v] = (u, t_dep)
                heapq.heappush(heap, (v_arr, v))
    return result


def edge_stream(
    graph: TemporalGraph, interval: Optional[Interval] = None
) -> list[tuple[int, int, int]]:
    """Chronological (u, v, departure) sequence; static edges duplicated per label.

    Sorted ascending by departure time, ties in adjacency enumeration order.
    """
    interval = _query_interval(graph, interval)
    qa, qo = interval.t_alpha, interval.t_omega
    entries: list[tuple[int, int, int]] = []
    for u, v, info in graph.edges():
        dur = info.duration
        if info.labels is None:
            lo, hi = graph.static_label_bounds(dur)
            lo = max(lo, qa)
            hi = min(hi, qo - dur)
            entries.extend((u, v, t) for t in range(lo, hi + 1))
        else:
            entries.extend(
                (u, v, t) for t in info.labels if t >= qa and t + dur <= qo
            )
    entries.sort(key=lambda e: e[2])
    return entries


def ea_wu(
    graph: TemporalGraph,
    sources: Iterable[int],
    interval: Optional[Interval] = None,
    stream: Optional[list[tuple[int, int, int]]] = None,
) -> ArrivalMap:
    """One-pass earliest arrivals over the edge stream.

    An edge occurrence (u, v, t) relaxes v when u is already reachable by t
    and t + duration beats v's current arrival.  ``ops`` counts scanned
    stream entries (always the full stream length).
    """
    interval = _query_interval(graph, interval)
    qa, qo = interval.t_alpha, interval.t_omega
    srcs = frozenset(s for s in sources if graph.has_node(s))
    if not srcs:
        raise GraphError("no sources present in graph")
    if stream is None:
        stream = edge_stream(graph, interval)
    durs = {(u, v): info.duration for u, v, info in graph.edges()}
    result = ArrivalMap(graph=graph, sources=srcs, start=qa, algorithm="wu")
    arrival = result.arrival
    pred = result.predecessor
    for s in srcs:
        arrival[s] = qa
    for u, v, t in stream:
        result.ops += 1
        a_u = arrival.get(u)
        if a_u is None or t < a_u:
            continue
        v_arr = t + durs[u, v]
        if v_arr > qo:
            continue
        a_v = arrival.get(v)
        if a_v is None or v_arr < a_v:
            arrival[v] = v_arr
            pred[v] = (u, t)
    return result


def ea_bruteforce(
    graph: TemporalGraph,
    sources: Iterable[int],
    interval: Optional[Interval] = None,
    cap: int = 2_000_000,
) -> ArrivalMap:
    """Exact earliest arrivals by expanding every (node, time) state.

    Only suitable for small instances; raises :class:`OracleCapExceeded`
    when ``|V| * lifetime`` exceeds ``cap``.
    """
    interval = _query_interval(graph, interval)
    qa, qo = interval.t_alpha, interval.t_omega
    if graph.node_count * (qo - qa) > cap:
        raise OracleCapExceeded(
            f"{graph.node_count} nodes x {qo - qa} time units exceeds cap {cap}"
        )
    srcs = frozenset(s for s in sources if graph.has_node(s))
    if not srcs:
        raise GraphError("no sources present in graph")
    result = ArrivalMap(graph=graph, sources=srcs, start=qa, algorithm="bruteforce")
    best = result.arrival
    pred = result.predecessor
    occupied: dict[int, set[int]] = {t: set() for t in range(qa, qo + 1)}
    for s in srcs:
        occupied[qa].add(s)
        best[s] = qa
    for t in range(qa, qo + 1):
        nodes_here = occupied[t]
        if not nodes_here:
            continue
        if t + 1 <= qo:
            occupied[t + 1] |= nodes_here
        for u in sorted(nodes_here):
            for v, info in graph.successors(u):
                result.ops += 1
                if not graph.has_label(u, v, t):
                    continue
                arr = t + info.duration
                if arr > qo:
                    continue
                occupied[arr].add(v)
                if v not in best or arr < best[v]:
                    best[v] = arr
                    pred[v] = (u, t)
    return result


def reconstruct_path(arrival_map: ArrivalMap, v: int) -> TemporalPath:
    """Witness temporal path from some source to ``v`` ending at its arrival.

    Sources reconstruct to the empty path; unreachable nodes raise.
    """
    if v not in arrival_map.arrival:
        raise GraphError(f"node {v} is unreachable in this arrival map")
    edges: list[tuple[int, int, int]] = []
    cur = v
    while cur not in arrival_map.sources:
        u, t = arrival_map.predecessor[cur]
        edges.append((u, cur, t))
        cur = u
    edges.reverse()
    return path_from_graph(arrival_map.graph, edges)


def enumerate_temporal_paths(
    graph: TemporalGraph,
    source: int,
    target: int,
    interval: Optional[Interval] = None,
    max_paths: int = 200_000,
    max_len: Optional[int] = None,
) -> list[TemporalPath]:
    """Every vertex-simple temporal (source, target)-path within the interval.

    Enumerates all admissible departure-label combinations in deterministic
    (node id, then label) order.  Raises :class:`OracleCapExceeded` past
    ``max_paths``.
    """
    interval = _query_interval(graph, interval)
    qa, qo = interval.t_alpha, interval.t_omega
    if source == target or not graph.has_node(source) or not graph.has_node(target):
        return []
    if max_len is None:
        max_len = graph.node_count
    paths: list[TemporalPath] = []
    edges: list[tuple[int, int, int]] = []
    visited = {source}

    def dfs(u: int, t_arr: int) -> None:
        if u == target:
            if len(paths) >= max_paths:
                raise OracleCapExceeded(f"more than {max_paths} paths")
            paths.append(path_from_graph(graph, edges))
            return
        if len(edges) >= max_len:
            return
        for v, info in graph.successors(u):
            if v in visited:
                continue
            dur = info.duration
            if info.labels is None:
                lo, hi = graph.static_label_bounds(dur)
                labels: Iterable[int] = range(max(lo, t_arr), hi + 1)
            else:
                labels = (t for t in info.labels if t >= t_arr)
            visited.add(v)
            for t in labels:
                if t + dur > qo:
                    break
                edges.append((u, v, t))
                dfs(v, t + dur)
                edges.pop()
            visited.discard(v)

    dfs(source, qa)
    return paths


def random_temporal_path(
    graph: TemporalGraph,
    sources: Iterable[int],
    target: int,
    interval: Optional[Interval] = None,
    rng: Optional[random.Random] = None,
) -> Optional[TemporalPath]:
    """Randomized temporal DFS from a shuffled source order.

    At each node the successor order is shuffled and the earliest admissible
    departure is taken; dead ends backtrack.  Returns None iff the target is
    unreachable within the interval.
    """
    interval = _query_interval(graph, interval)
    qa, qo = interval.t_alpha, interval.t_omega
    rng = rng or random.Random()
    order = sorted(s for s in sources if graph.has_node(s))
    rng.shuffle(order)
    if not graph.has_node(target):
        return None

    def dfs(u: int, t_arr: int, visited: set[int], edges: list[tuple[int, int, int]]):
        if u == target:
            return list(edges)
        succs = list(graph.successors(u))
        rng.shuffle(succs)
        for v, info in succs:
            if v in visited:
                continue
            dur = info.duration
            if info.labels is None:
                lo, hi = graph.static_label_bounds(dur)
                t_dep = max(lo, t_arr)
                if t_dep > hi:
                    continue
            else:
                idx = bisect_left(info.labels, t_arr)
                if idx == len(info.labels):
                    continue
                t_dep = info.labels[idx]
            if t_dep + dur > qo:
                continue
            visited.add(v)
            edges.append((u, v, t_dep))
            found = dfs(v, t_dep + dur, visited, edges)
            if found is not None:
                return found
            edges.pop()
            visited.discard(v)
        return None

    for s in order:
        if s == target:
            continue
        found = dfs(s, qa, {s}, [])
        if found is not None:
            return path_from_graph(graph, found)
    return None


def is_temporal_cut(instance: Instance, cut: Iterable[int]) -> bool:
    """True iff removing ``cut`` disconnects every temporal entry-to-target path."""
    cut = instance.check_placement(cut)
    reduced = remove_nodes(instance.graph, cut)
    amap = ea_dijkstra(reduced, instance.entries, instance.interval)
    return instance.da not in amap.arrival
