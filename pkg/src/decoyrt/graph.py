"""Core data model: temporal directed graphs, temporal paths, decoy placements.

A temporal graph lives on a bounded integer interval.  An edge is either
*static* (usable at every admissible departure time) or *dynamic* (usable only
at its stored, strictly ascending time labels).  Static edges never
materialize their label list; algorithms that only touch the underlying edge
set stay independent of the interval length.

Time convention: traversing an edge departing at label ``t`` arrives at
``t + duration`` (duration defaults to 1).  A departure label ``t`` is
admissible when ``t_alpha <= t <= t_omega - duration``.

All types here are immutable after construction and safe to share across
threads; derived graphs (see :func:`remove_nodes`) are new objects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence


class GraphError(ValueError):
    """Raised when graph construction or a graph operation violates an invariant."""


class NodeKind(str, enum.Enum):
    USER = "user"
    COMPUTER = "computer"
    GROUP = "group"
    DOMAIN_ADMIN = "domain_admin"
    OTHER = "other"


@dataclass(frozen=True)
class Node:
    id: int
    name: str
    kind: NodeKind = NodeKind.OTHER


@dataclass(frozen=True)
class Interval:
    """Closed integer time interval ``[t_alpha, t_omega]``."""

    t_alpha: int
    t_omega: int

    def __post_init__(self) -> None:
        if self.t_alpha < 0:
            raise GraphError(f"t_alpha must be >= 0, got {self.t_alpha}")
        if self.t_alpha >= self.t_omega:
            raise GraphError(
                f"interval must satisfy t_alpha < t_omega, got [{self.t_alpha}, {self.t_omega}]"
            )

    @property
    def lifetime(self) -> int:
        return self.t_omega - self.t_alpha

    def contains(self, other: "Interval") -> bool:
        return self.t_alpha <= other.t_alpha and other.t_omega <= self.t_omega


@dataclass(frozen=True)
class EdgeInfo:
    """Adjacency payload for one directed edge.

    ``labels`` is None for static edges (the full admissible range is implied)
    and a strictly ascending tuple for dynamic edges.
    """

    labels: Optional[tuple[int, ...]]
    duration: int = 1

    @property
    def is_static(self) -> bool:
        return self.labels is None


class TemporalGraph:
    """Directed temporal graph over dense integer node ids.

    Node ids need not be contiguous (subgraphs keep original ids); instance
    builders enforce contiguity separately.
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        succ: Mapping[int, Mapping[int, EdgeInfo]],
        interval: Interval,
    ) -> None:
        self._nodes: dict[int, Node] = {n.id: n for n in nodes}
        self._succ: dict[int, dict[int, EdgeInfo]] = {
            u: dict(vs) for u, vs in succ.items()
        }
        self._pred: dict[int, dict[int, EdgeInfo]] = {u: {} for u in self._nodes}
        for u, vs in self._succ.items():
            for v, info in vs.items():
                self._pred[v][u] = info
        self.interval = interval
        self._eps_s = sum(
            1 for vs in self._succ.values() for info in vs.values() if info.is_static
        )
        self._eps_d = sum(
            1 for vs in self._succ.values() for info in vs.values() if not info.is_static
        )

    # -- basic accessors ---------------------------------------------------

    @property
    def node_ids(self) -> list[int]:
        return sorted(self._nodes)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    def node(self, node_id: int) -> Node:
        return self._nodes[node_id]

    def has_node(self, node_id: int) -> bool:
        return node_id in self._nodes

    @property
    def nodes(self) -> list[Node]:
        return [self._nodes[i] for i in sorted(self._nodes)]

    @property
    def eps_s(self) -> int:
        """Number of static edges."""
        return self._eps_s

    @property
    def eps_d(self) -> int:
        """Number of dynamic edges."""
        return self._eps_d

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._succ and v in self._succ[u]

    def edge_info(self, u: int, v: int) -> EdgeInfo:
        try:
            return self._succ[u][v]
        except KeyError:
            raise GraphError(f"unknown edge ({u}, {v})") from None

    def successors(self, u: int) -> Iterator[tuple[int, EdgeInfo]]:
        return iter(sorted(self._succ.get(u, {}).items()))

    def predecessors(self, v: int) -> Iterator[tuple[int, EdgeInfo]]:
        return iter(sorted(self._pred.get(v, {}).items()))

    def edges(self) -> Iterator[tuple[int, int, EdgeInfo]]:
        for u in sorted(self._succ):
            for v in sorted(self._succ[u]):
                yield u, v, self._succ[u][v]

    def static_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, info in self.edges() if info.is_static]

    def dynamic_edges(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return {
            (u, v): info.labels
            for u, v, info in self.edges()
            if not info.is_static
        }

    # -- temporal semantics --------------------------------------------------

    def static_label_bounds(self, duration: int) -> tuple[int, int]:
        """Admissible departure range ``[lo, hi]`` for a static edge."""
        return self.interval.t_alpha, self.interval.t_omega - duration

    def time_labels(self, u: int, v: int) -> Sequence[int]:
        """All departure labels of edge (u, v), ascending.

        Static edges return a lazy range; dynamic edges their stored labels.
        """
        info = self.edge_info(u, v)
        if info.is_static:
            lo, hi = self.static_label_bounds(info.duration)
            return range(lo, hi + 1)
        return info.labels

    def has_label(self, u: int, v: int, t: int) -> bool:
        if u not in self._succ or v not in self._succ[u]:
            return False
        info = self._succ[u][v]
        if info.is_static:
            lo, hi = self.static_label_bounds(info.duration)
            return lo <= t <= hi
        return t in info.labels

    def domain_admin_ids(self) -> list[int]:
        return [i for i, n in self._nodes.items() if n.kind is NodeKind.DOMAIN_ADMIN]


def build_graph(
    nodes: Sequence[Node],
    static_edges: Iterable[tuple[int, int]],
    dynamic_edges: Mapping[tuple[int, int], Sequence[int]],
    interval: Interval,
    durations: Optional[Mapping[tuple[int, int], int]] = None,
    reclassify_full_dynamic: bool = False,
) -> TemporalGraph:
    """Validate inputs and assemble a :class:`TemporalGraph`.

    A dynamic edge whose labels cover every admissible departure time is a
    static edge in disguise; by default that is an error, with
    ``reclassify_full_dynamic=True`` it is silently stored as static.
    """
    durations = dict(durations or {})
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise GraphError("duplicate node ids")
    id_set = set(ids)

    succ: dict[int, dict[int, EdgeInfo]] = {i: {} for i in ids}

    def check_pair(u: int, v: int) -> None:
        if u == v:
            raise GraphError(f"self-loop on node {u}")
        if u not in id_set or v not in id_set:
            raise GraphError(f"edge ({u}, {v}) references unknown node")
        if v in succ[u]:
            raise GraphError(f"duplicate edge pair ({u}, {v})")

    for u, v in static_edges:
        check_pair(u, v)
        dur = durations.get((u, v), 1)
        if dur < 1:
            raise GraphError(f"duration of ({u}, {v}) must be >= 1")
        if interval.t_alpha > interval.t_omega - dur:
            raise GraphError(f"edge ({u}, {v}) cannot fit duration {dur} in interval")
        succ[u][v] = EdgeInfo(labels=None, duration=dur)

    for (u, v), raw_labels in dynamic_edges.items():
        check_pair(u, v)
        dur = durations.get((u, v), 1)
        if dur < 1:
            raise GraphError(f"duration of ({u}, {v}) must be >= 1")
        labels = tuple(raw_labels)
        if not labels:
            raise GraphError(f"dynamic edge ({u}, {v}) has no labels")
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise GraphError(f"unsorted labels on edge ({u}, {v})")
        lo, hi = interval.t_alpha, interval.t_omega - dur
        if labels[0] < lo or labels[-1] > hi:
            raise GraphError(
                f"label out of interval on edge ({u}, {v}): labels must lie in [{lo}, {hi}]"
            )
        if len(labels) == hi - lo + 1:
            if not reclassify_full_dynamic:
                raise GraphError(
                    f"dynamic edge ({u}, {v}) covers every admissible time; it is static"
                )
            succ[u][v] = EdgeInfo(labels=None, duration=dur)
        else:
            succ[u][v] = EdgeInfo(labels=labels, duration=dur)

    return TemporalGraph(nodes, succ, interval)


def remove_nodes(graph: TemporalGraph, removed: Iterable[int]) -> TemporalGraph:
    """Induced temporal subgraph on the complement of ``removed``.

    Removing a domain-admin node is rejected: every downstream operation
    treats that node as the fixed target.
    """
    removed = set(removed)
    for node_id in removed:
        if graph.has_node(node_id) and graph.node(node_id).kind is NodeKind.DOMAIN_ADMIN:
            raise GraphError(f"cannot remove domain admin node {node_id}")
    keep = [n for n in graph.nodes if n.id not in removed]
    succ: dict[int, dict[int, EdgeInfo]] = {n.id: {} for n in keep}
    for u, v, info in graph.edges():
        if u in removed or v in removed:
            continue
        succ[u][v] = info
    return TemporalGraph(keep, succ, graph.interval)


# -- temporal paths ----------------------------------------------------------


@dataclass(frozen=True)
class TemporalPath:
    """Vertex-simple edge sequence with physically consistent times.

    ``edges`` holds (u, v, departure label) triples; ``durations`` the travel
    time of each edge (defaults to all ones).  Arrival at edge i's head is
    ``t_i + durations[i]``.
    """

    edges: tuple[tuple[int, int, int], ...]
    durations: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.durations:
            object.__setattr__(self, "durations", (1,) * len(self.edges))
        if len(self.durations) != len(self.edges):
            raise GraphError("durations length must match edges length")

    def __len__(self) -> int:
        return len(self.edges)

    def __bool__(self) -> bool:
        return bool(self.edges)

    @property
    def source(self) -> int:
        return self.edges[0][0]

    @property
    def target(self) -> int:
        return self.edges[-1][1]

    def vertices(self) -> tuple[int, ...]:
        if not self.edges:
            return ()
        return (self.edges[0][0],) + tuple(v for _, v, _ in self.edges)

    def arrival_times(self) -> tuple[int, ...]:
        """Arrival time at each non-source vertex, in path order."""
        return tuple(t + d for (_, _, t), d in zip(self.edges, self.durations))

    def describe(self, graph: Optional[TemporalGraph] = None) -> str:
        if not self.edges:
            return "<empty path>"

        def nm(i: int) -> str:
            return graph.node(i).name if graph is not None and graph.has_node(i) else str(i)

        parts = [nm(self.edges[0][0])]
        for u, v, t in self.edges:
            parts.append(f"-{t}-> {nm(v)}")
        return " ".join(parts)


def path_from_graph(graph: TemporalGraph, edges: Sequence[tuple[int, int, int]]) -> TemporalPath:
    """Build a path picking up per-edge durations from ``graph``."""
    durations = tuple(graph.edge_info(u, v).duration for u, v, _ in edges)
    return TemporalPath(tuple(edges), durations)


def validate_path(graph: TemporalGraph, path: TemporalPath) -> bool:
    """True iff ``path`` is a valid vertex-simple temporal path of ``graph``."""
    return first_path_violation(graph, path) is None


def first_path_violation(graph: TemporalGraph, path: TemporalPath) -> Optional[tuple[int, str]]:
    """First violating edge index and reason, or None when the path is valid."""
    seen: set[int] = set()
    prev_arrival: Optional[int] = None
    prev_head: Optional[int] = None
    for i, ((u, v, t), dur) in enumerate(zip(path.edges, path.durations)):
        if prev_head is not None and u != prev_head:
            return i, "broken chain"
        if i == 0:
            seen.add(u)
        if v in seen:
            return i, "repeated vertex"
        if not graph.has_node(u) or not graph.has_node(v):
            return i, "unknown node"
        if not graph.has_label(u, v, t):
            return i, "edge not present at label"
        if graph.edge_info(u, v).duration != dur:
            return i, "duration mismatch"
        # departures may not precede the arrival at the tail vertex
        if prev_arrival is not None and t < prev_arrival:
            return i, "non-increasing time"
        prev_arrival = t + dur
        prev_head = v
        seen.add(v)
    return None


def path_metrics(path: TemporalPath) -> tuple[int, int, int]:
    """(start, end, duration) of a non-empty path; end = last label + its duration."""
    if not path.edges:
        raise GraphError("empty path has no metrics")
    start = path.edges[0][2]
    end = path.edges[-1][2] + path.durations[-1]
    return start, end, end - start


def first_contact(path: TemporalPath, cut: Iterable[int]) -> Optional[tuple[int, int]]:
    """Earliest path vertex inside ``cut`` and the time it is reached.

    The path's source vertex is never a contact (entry points cannot host
    decoys).  Returns None when the path avoids the cut entirely.
    """
    cut = set(cut)
    for (u, v, t), dur in zip(path.edges, path.durations):
        if v in cut:
            return v, t + dur
    return None


def response_time(
    path: TemporalPath, cut: Iterable[int], da: Optional[int] = None
) -> Optional[int]:
    """Time between triggering the first decoy on ``path`` and reaching its end.

    With ``da`` given, the path is required to terminate there.  Returns None
    when the path never touches the cut.
    """
    if not path.edges:
        raise GraphError("empty path has no response time")
    if da is not None and path.target != da:
        raise GraphError(f"path ends at {path.target}, not at target {da}")
    contact = first_contact(path, cut)
    if contact is None:
        return None
    _, end, _ = path_metrics(path)
    return end - contact[1]


# -- defense instances ---------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    """One defense problem: graph, entry set, target, blockable set, budget."""

    graph: TemporalGraph
    entries: frozenset[int]
    da: int
    blockable: frozenset[int]
    budget: Optional[int] = None
    name: str = ""
    _order: tuple[int, ...] = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        g = self.graph
        if not self.entries:
            raise GraphError("instance needs at least one entry node")
        for s in self.entries:
            if not g.has_node(s):
                raise GraphError(f"entry {s} not in graph")
        if not g.has_node(self.da):
            raise GraphError(f"target {self.da} not in graph")
        da_nodes = g.domain_admin_ids()
        if da_nodes != [self.da]:
            raise GraphError(
                f"instance must have exactly one domain admin node, which is the target; "
                f"found {da_nodes}, target {self.da}"
            )
        if self.da in self.entries:
            raise GraphError("target cannot be an entry")
        bad = self.blockable & (self.entries | {self.da})
        if bad:
            raise GraphError(f"entries and the target are never blockable: {sorted(bad)}")
        for b in self.blockable:
            if not g.has_node(b):
                raise GraphError(f"blockable node {b} not in graph")
        if self.budget is not None and self.budget < 0:
            raise GraphError("budget must be >= 0")
        object.__setattr__(self, "_order", tuple(sorted(self.blockable)))

    @property
    def interval(self) -> Interval:
        return self.graph.interval

    @property
    def blockable_order(self) -> tuple[int, ...]:
        """Canonical (ascending) order of blockable node ids; bit-vector layout."""
        return self._order

    def name_to_id(self) -> dict[str, int]:
        return {n.name: n.id for n in self.graph.nodes}

    def node_names(self, ids: Iterable[int]) -> list[str]:
        return [self.graph.node(i).name for i in sorted(ids)]

    def check_placement(self, cut: Iterable[int]) -> frozenset[int]:
        """Validate a decoy placement against the blockable set."""
        cut = frozenset(cut)
        bad = cut - self.blockable
        if bad:
            names = [self.graph.node(i).name if self.graph.has_node(i) else str(i) for i in sorted(bad)]
            raise GraphError(f"placement includes unblockable nodes: {names}")
        return cut
