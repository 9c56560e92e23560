"""Instance construction: files, authentication traces, generators, fixtures.

The instance file format is JSON with keys ``nodes`` (array of
``{id, name, kind, blockable}``), ``static_edges`` (array of ``[u, v]``),
``dynamic_edges`` (array of ``{u, v, times}``), ``interval``
(``{t_alpha, t_omega}``), ``entries``, ``da`` and optional ``budget``.

Real directory exports are out of scope; a mould (static infrastructure
skeleton) is loaded from the same file format with no dynamic edges, and
logon-session dynamics are merged in from an authentication trace CSV
(``time,user,computer[,end_time]``) or synthesized.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .graph import (
    GraphError,
    Instance,
    Interval,
    Node,
    NodeKind,
    TemporalGraph,
    build_graph,
)

KIND_NAMES = {k.value for k in NodeKind}


# -- instance files ------------------------------------------------------------


def instance_to_dict(instance: Instance) -> dict:
    g = instance.graph
    return {
        "nodes": [
            {
                "id": n.id,
                "name": n.name,
                "kind": n.kind.value,
                "blockable": n.id in instance.blockable,
            }
            for n in g.nodes
        ],
        "static_edges": [[u, v] for u, v in g.static_edges()],
        "dynamic_edges": [
            {"u": u, "v": v, "times": list(labels)}
            for (u, v), labels in sorted(g.dynamic_edges().items())
        ],
        "interval": {"t_alpha": g.interval.t_alpha, "t_omega": g.interval.t_omega},
        "entries": sorted(instance.entries),
        "da": instance.da,
        **({"budget": instance.budget} if instance.budget is not None else {}),
        **({"name": instance.name} if instance.name else {}),
    }


def instance_from_dict(data: Mapping) -> Instance:
    try:
        nodes = [
            Node(int(n["id"]), str(n["name"]), NodeKind(n.get("kind", "other")))
            for n in data["nodes"]
        ]
        static = [(int(u), int(v)) for u, v in data.get("static_edges", [])]
        dynamic = {
            (int(e["u"]), int(e["v"])): [int(t) for t in e["times"]]
            for e in data.get("dynamic_edges", [])
        }
        interval = Interval(
            int(data["interval"]["t_alpha"]), int(data["interval"]["t_omega"])
        )
        entries = frozenset(int(s) for s in data["entries"])
        da = int(data["da"])
        blockable = frozenset(
            int(n["id"]) for n in data["nodes"] if n.get("blockable")
        )
        budget = data.get("budget")
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed instance data: {exc}") from exc
    graph = build_graph(nodes, static, dynamic, interval)
    return Instance(
        graph=graph,
        entries=entries,
        da=da,
        blockable=blockable,
        budget=None if budget is None else int(budget),
        name=str(data.get("name", "")),
    )


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def instance_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def validate_instance_data(data: Mapping) -> list[str]:
    """All invariant violations in raw instance data, with field context.

    Works on the parsed JSON so broken files can be fully diagnosed instead
    of stopping at the first constructor error.
    """
    problems: list[str] = []
    nodes = data.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        return ["nodes: missing or empty"]
    ids: list[int] = []
    blockable: set[int] = set()
    da_kinds: list[int] = []
    for i, n in enumerate(nodes):
        if not isinstance(n, dict) or "id" not in n or "name" not in n:
            problems.append(f"nodes[{i}]: needs id and name")
            continue
        ids.append(n["id"])
        if n.get("kind", "other") not in KIND_NAMES:
            problems.append(f"nodes[{i}]: unknown kind {n.get('kind')!r}")
        if n.get("kind") == "domain_admin":
            da_kinds.append(n["id"])
        if n.get("blockable"):
            blockable.add(n["id"])
    if sorted(ids) != list(range(len(ids))):
        problems.append("nodes: ids must be contiguous 0..n-1 and unique")
    id_set = set(ids)

    if "da" not in data:
        problems.append("da: missing")
        da = None
    else:
        da = data["da"]
        if da not in id_set:
            problems.append(f"da: unknown node {da}")
    if len(da_kinds) != 1:
        problems.append(
            f"nodes: exactly one domain_admin kind expected, found {sorted(da_kinds)}"
        )
    elif da is not None and da_kinds != [da]:
        problems.append(f"da: node {da} is not the domain_admin-kind node {da_kinds[0]}")

    entries = data.get("entries")
    if not isinstance(entries, list) or not entries:
        problems.append("entries: missing or empty")
        entries = []
    for s in entries:
        if s not in id_set:
            problems.append(f"entries: unknown node {s}")
    if da is not None and da in entries:
        problems.append("entries: target cannot be an entry")
    if da is not None and da in blockable:
        problems.append("nodes: target must not be blockable")
    for s in entries:
        if s in blockable:
            problems.append(f"nodes: entry {s} must not be blockable")

    interval = data.get("interval")
    ta = to = None
    if not isinstance(interval, dict) or "t_alpha" not in interval or "t_omega" not in interval:
        problems.append("interval: needs t_alpha and t_omega")
    else:
        ta, to = interval["t_alpha"], interval["t_omega"]
        if not (isinstance(ta, int) and isinstance(to, int) and 0 <= ta < to):
            problems.append(f"interval: need integers 0 <= t_alpha < t_omega, got [{ta}, {to}]")
            ta = to = None

    seen_pairs: set[tuple[int, int]] = set()
    for i, e in enumerate(data.get("static_edges", [])):
        if not (isinstance(e, list) and len(e) == 2):
            problems.append(f"static_edges[{i}]: not a pair")
            continue
        u, v = e
        if u == v:
            problems.append(f"static_edges[{i}]: self-loop on {u}")
        if u not in id_set or v not in id_set:
            problems.append(f"static_edges[{i}]: unknown node in ({u}, {v})")
        if (u, v) in seen_pairs:
            problems.append(f"static_edges[{i}]: duplicate edge ({u}, {v})")
        seen_pairs.add((u, v))
    for i, e in enumerate(data.get("dynamic_edges", [])):
        if not isinstance(e, dict) or "u" not in e or "v" not in e or "times" not in e:
            problems.append(f"dynamic_edges[{i}]: needs u, v, times")
            continue
        u, v, times = e["u"], e["v"], e["times"]
        if u == v:
            problems.append(f"dynamic_edges[{i}]: self-loop on {u}")
        if u not in id_set or v not in id_set:
            problems.append(f"dynamic_edges[{i}]: unknown node in ({u}, {v})")
        if (u, v) in seen_pairs:
            problems.append(f"dynamic_edges[{i}]: duplicate edge ({u}, {v})")
        seen_pairs.add((u, v))
        if list(times) != sorted(set(times)):
            problems.append(f"dynamic_edges[{i}]: labels must be strictly ascending")
        elif ta is not None and times and (times[0] < ta or times[-1] > to - 1):
            problems.append(
                f"dynamic_edges[{i}]: labels outside [{ta}, {to - 1}]"
            )
        elif ta is not None and len(times) == to - ta:
            problems.append(f"dynamic_edges[{i}]: covers every time step; must be static")

    budget = data.get("budget")
    if budget is not None and (not isinstance(budget, int) or budget < 0):
        problems.append(f"budget: must be a nonnegative integer, got {budget!r}")
    return problems


# -- moulds and authentication traces -------------------------------------------


@dataclass(frozen=True)
class MouldGraph:
    """Static infrastructure skeleton: session edges stripped, one target."""

    nodes: tuple[Node, ...]
    static_edges: tuple[tuple[int, int], ...]
    da: int

    def users(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind is NodeKind.USER]

    def computers(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind is NodeKind.COMPUTER]


def load_mould(path: str) -> MouldGraph:
    """Load a mould from an instance-format file; dynamic edges are an error."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: not valid JSON ({exc})") from exc
    if data.get("dynamic_edges"):
        raise GraphError(f"{path}: mould must be static (dynamic_edges present)")
    try:
        nodes = tuple(
            Node(int(n["id"]), str(n["name"]), NodeKind(n.get("kind", "other")))
            for n in data["nodes"]
        )
        static = tuple((int(u), int(v)) for u, v in data.get("static_edges", []))
        da = int(data["da"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"{path}: malformed mould ({exc})") from exc
    da_nodes = [n.id for n in nodes if n.kind is NodeKind.DOMAIN_ADMIN]
    if da_nodes != [da]:
        raise GraphError(
            f"{path}: mould needs exactly one domain_admin node matching da; "
            f"found {da_nodes}, da={da}"
        )
    return MouldGraph(nodes=nodes, static_edges=static, da=da)


@dataclass(frozen=True)
class AuthEvent:
    """One logon: a user authenticated to a computer at ``time`` (seconds)."""

    time: int
    user: str
    computer: str
    end_time: Optional[int] = None


def _parse_time(raw: str) -> int:
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return int(datetime.datetime.fromisoformat(raw).timestamp())
    except ValueError as exc:
        raise ValueError(f"bad timestamp {raw!r}") from exc


def load_auth_trace(path: str) -> list[AuthEvent]:
    """Read an authentication trace CSV, sorted by time.

    Header ``time,user,computer`` with an optional ``end_time`` column.
    Malformed rows abort with a count and the first offending lines.
    """
    events: list[AuthEvent] = []
    bad: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        required = {"time", "user", "computer"}
        if not required <= set(reader.fieldnames):
            raise GraphError(
                f"{path}: header must contain time,user,computer; got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                end_raw = (row.get("end_time") or "").strip()
                events.append(
                    AuthEvent(
                        time=_parse_time(row["time"]),
                        user=row["user"].strip(),
                        computer=row["computer"].strip(),
                        end_time=_parse_time(end_raw) if end_raw else None,
                    )
                )
            except (ValueError, AttributeError, KeyError) as exc:
                bad.append(f"line {lineno}: {exc}")
    if bad:
        shown = "; ".join(bad[:3])
        raise GraphError(f"{path}: {len(bad)} malformed rows ({shown}, ...)")
    events.sort(key=lambda e: (e.time, e.user, e.computer))
    return events


def map_trace_entities(
    mould: MouldGraph, events: Sequence[AuthEvent], rng: random.Random
) -> dict[str, int]:
    """Random injective mapping of trace users/computers onto mould nodes."""
    users = sorted({e.user for e in events})
    computers = sorted({e.computer for e in events})
    user_pool = mould.users()
    computer_pool = mould.computers()
    if len(users) > len(user_pool):
        raise GraphError(
            f"mapping exhausted: {len(users)} trace users, {len(user_pool)} mould users"
        )
    if len(computers) > len(computer_pool):
        raise GraphError(
            f"mapping exhausted: {len(computers)} trace computers, "
            f"{len(computer_pool)} mould computers"
        )
    mapping = dict(zip(users, rng.sample(user_pool, len(users))))
    mapping.update(zip(computers, rng.sample(computer_pool, len(computers))))
    return mapping


def sessions_to_edges(
    events: Sequence[AuthEvent],
    snapshot_interval: int,
    horizon: int,
    mapping: Mapping[str, int],
    default_session_snapshots: int = 1,
    snapshot_mode: str = "instant",
) -> dict[tuple[int, int], list[int]]:
    """Discretize sessions into computer-to-user dynamic edge labels.

    Snapshot ``t`` (1..horizon) observes instant ``t * snapshot_interval``;
    a session alive there puts the credential-exposure edge
    (computer -> user) on at label ``t``.  ``snapshot_mode='overlap'``
    instead lights every snapshot whose whole window the session overlaps.
    Sessions without an explicit end last ``default_session_snapshots``.
    """
    if snapshot_interval <= 0:
        raise GraphError("snapshot_interval must be positive")
    if snapshot_mode not in ("instant", "overlap"):
        raise GraphError(f"unknown snapshot_mode {snapshot_mode!r}")
    edges: dict[tuple[int, int], set[int]] = {}
    for ev in events:
        start = ev.time
        end = (
            ev.end_time
            if ev.end_time is not None
            else start + default_session_snapshots * snapshot_interval
        )
        if end <= start:
            continue
        if snapshot_mode == "instant":
            # alive at instant t*dt when start <= t*dt < end
            first = max(1, -(-start // snapshot_interval))
            last = min(horizon, -(-end // snapshot_interval) - 1)
        else:
            # session overlaps window ((t-1)*dt, t*dt]
            first = max(1, -(-start // snapshot_interval))
            last = min(horizon, -(-end // snapshot_interval))
        if first > last:
            continue
        key = (mapping[ev.computer], mapping[ev.user])
        edges.setdefault(key, set()).update(range(first, last + 1))
    return {key: sorted(ts) for key, ts in sorted(edges.items())}


def merge_mould_and_sessions(
    mould: MouldGraph,
    dynamic_edges: Mapping[tuple[int, int], Sequence[int]],
    horizon: int,
) -> TemporalGraph:
    """Temporal graph over [1, horizon+1]: mould statics plus session edges.

    Session labels landing on pairs the mould already keeps always-on are
    subsumed by the static edge and dropped.
    """
    static = set(mould.static_edges)
    dynamic = {
        pair: list(labels)
        for pair, labels in dynamic_edges.items()
        if pair not in static and labels
    }
    return build_graph(
        mould.nodes,
        sorted(static),
        dynamic,
        Interval(1, horizon + 1),
        reclassify_full_dynamic=True,
    )


# -- synthetic generators --------------------------------------------------------


def _geometric(rng: random.Random, mean: float) -> int:
    """Geometric sample with the given mean (support 1, 2, ...)."""
    if mean <= 1:
        return 1
    p = 1.0 / mean
    u = rng.random()
    return int(math.log(1.0 - u) / math.log(1.0 - p)) + 1


def synth_trace(
    users: int,
    computers: int,
    events: int,
    mean_session_snapshots: float,
    rng: random.Random,
    snapshot_interval: int = 3600,
    horizon: int = 1000,
) -> list[AuthEvent]:
    """Synthetic authentication events with geometric session lengths."""
    out: list[AuthEvent] = []
    for _ in range(events):
        user = f"u{rng.randrange(users)}"
        computer = f"c{rng.randrange(computers)}"
        start = rng.randrange(horizon * snapshot_interval)
        length = _geometric(rng, mean_session_snapshots)
        out.append(
            AuthEvent(
                time=start,
                user=user,
                computer=computer,
                end_time=start + length * snapshot_interval,
            )
        )
    out.sort(key=lambda e: (e.time, e.user, e.computer))
    return out


def synth_mould(
    users: int,
    computers: int,
    groups: int,
    extra_edge_prob: float,
    rng: random.Random,
) -> MouldGraph:
    """Miniature directory-shaped static skeleton.

    Users join groups, groups administer computers, group chains escalate to
    the single admin target.  ``extra_edge_prob`` sprinkles additional
    kind-consistent edges; at zero the skeleton is a tree.
    """
    if users < 1 or groups < 1 or computers < 0:
        raise GraphError("need at least one user and one group")
    nodes: list[Node] = []
    user_ids = list(range(users))
    comp_ids = list(range(users, users + computers))
    group_ids = list(range(users + computers, users + computers + groups))
    da = users + computers + groups
    nodes += [Node(i, f"u{i}", NodeKind.USER) for i in user_ids]
    nodes += [Node(i, f"c{i - users}", NodeKind.COMPUTER) for i in comp_ids]
    nodes += [
        Node(i, f"g{i - users - computers}", NodeKind.GROUP) for i in group_ids
    ]
    nodes.append(Node(da, "da", NodeKind.DOMAIN_ADMIN))

    edges: set[tuple[int, int]] = set()
    # group escalation chain ending at the target
    for a, b in zip(group_ids, group_ids[1:]):
        edges.add((a, b))
    edges.add((group_ids[-1], da))
    # membership and admin-rights skeleton
    for u in user_ids:
        edges.add((u, rng.choice(group_ids)))
    for c in comp_ids:
        edges.add((rng.choice(group_ids), c))
    # optional extras, kind-consistent
    if extra_edge_prob > 0:
        for u in user_ids:
            for g in group_ids:
                if (u, g) not in edges and rng.random() < extra_edge_prob:
                    edges.add((u, g))
        for g in group_ids:
            for c in comp_ids:
                if (g, c) not in edges and rng.random() < extra_edge_prob:
                    edges.add((g, c))
        for i, a in enumerate(group_ids):
            for b in group_ids[i + 1 :]:
                if (a, b) not in edges and rng.random() < extra_edge_prob:
                    edges.add((a, b))
    return MouldGraph(nodes=tuple(nodes), static_edges=tuple(sorted(edges)), da=da)


def finalize_instance(
    mould: MouldGraph,
    dynamic_edges: Mapping[tuple[int, int], Sequence[int]],
    rng: random.Random,
    horizon: int,
    entries_count: int = 10,
    blockable_fraction: float = 0.9,
    budget_factor: float = 1.5,
    name: str = "",
) -> Instance:
    """Sample entries and the blockable set, then size the budget off the
    minimum cut.

    Entries prefer user-kind nodes; blockable nodes never include entries or
    the target.  Raises when no blockable cut exists (the instance would be
    undefendable) or when more entries are requested than nodes exist.
    """
    from .cutsolver import STATUS_INFEASIBLE, min_temporal_cut

    if not 0 < blockable_fraction <= 1:
        raise GraphError("blockable_fraction must be in (0, 1]")
    if budget_factor <= 1:
        raise GraphError("budget_factor must exceed 1")
    graph = merge_mould_and_sessions(mould, dynamic_edges, horizon)
    all_ids = graph.node_ids
    if entries_count > len(all_ids) - 1:
        raise GraphError(
            f"cannot sample {entries_count} entries from {len(all_ids) - 1} candidates"
        )
    user_pool = sorted(set(mould.users()) - {mould.da})
    pool = user_pool if len(user_pool) >= entries_count else [
        i for i in all_ids if i != mould.da
    ]
    entries = frozenset(rng.sample(pool, entries_count))

    candidates = [i for i in all_ids if i != mould.da and i not in entries]
    k = min(len(candidates), round(blockable_fraction * len(all_ids)))
    blockable = frozenset(rng.sample(candidates, k))

    probe = Instance(
        graph=graph, entries=entries, da=mould.da, blockable=blockable, name=name
    )
    cut = min_temporal_cut(probe)
    if cut.status == STATUS_INFEASIBLE:
        raise GraphError("instance undefendable: no blockable cut exists")
    budget = math.ceil(budget_factor * len(cut.blocks))
    return Instance(
        graph=graph,
        entries=entries,
        da=mould.da,
        blockable=blockable,
        budget=budget,
        name=name,
    )


# -- named fixtures ---------------------------------------------------------------


def _fixture_nine_node() -> Instance:
    """Two-entry graph with a static branch and a session-driven branch."""
    names = ["s1", "s2", "Gr1", "Cp1", "Cp2", "Cp3", "U2", "U3", "DA"]
    kinds = {
        "s1": NodeKind.USER,
        "s2": NodeKind.USER,
        "Gr1": NodeKind.GROUP,
        "Cp1": NodeKind.COMPUTER,
        "Cp2": NodeKind.COMPUTER,
        "Cp3": NodeKind.COMPUTER,
        "U2": NodeKind.USER,
        "U3": NodeKind.USER,
        "DA": NodeKind.DOMAIN_ADMIN,
    }
    nodes = [Node(i, nm, kinds[nm]) for i, nm in enumerate(names)]
    idx = {nm: i for i, nm in enumerate(names)}
    static = [
        (idx["s1"], idx["Gr1"]),
        (idx["Gr1"], idx["Cp2"]),
        (idx["Cp2"], idx["U2"]),
        (idx["U2"], idx["DA"]),
        (idx["Cp3"], idx["U3"]),
        (idx["U3"], idx["DA"]),
    ]
    dynamic = {
        (idx["s2"], idx["Cp1"]): [1],
        (idx["Cp1"], idx["Cp3"]): [2, 6],
    }
    graph = build_graph(nodes, static, dynamic, Interval(1, 10))
    entries = frozenset({idx["s1"], idx["s2"]})
    blockable = frozenset(
        i for i in range(len(names)) if i not in entries and names[i] != "DA"
    )
    return Instance(
        graph=graph,
        entries=entries,
        da=idx["DA"],
        blockable=blockable,
        budget=3,
        name="F1",
    )


def _fixture_chain4() -> Instance:
    nodes = [
        Node(0, "s", NodeKind.USER),
        Node(1, "a", NodeKind.COMPUTER),
        Node(2, "b", NodeKind.COMPUTER),
        Node(3, "DA", NodeKind.DOMAIN_ADMIN),
    ]
    graph = build_graph(nodes, [(0, 1), (1, 2), (2, 3)], {}, Interval(1, 10))
    return Instance(
        graph=graph,
        entries=frozenset({0}),
        da=3,
        blockable=frozenset({1, 2}),
        budget=2,
        name="chain4",
    )


def _fixture_disjoint(k: int) -> Instance:
    """k vertex-disjoint static three-hop routes from one entry to the target."""
    if k < 1:
        raise GraphError("disjoint_k needs k >= 1")
    nodes = [Node(0, "s", NodeKind.USER)]
    edges = []
    for i in range(k):
        x, y = 1 + 2 * i, 2 + 2 * i
        nodes.append(Node(x, f"x{i}", NodeKind.COMPUTER))
        nodes.append(Node(y, f"y{i}", NodeKind.USER))
        edges += [(0, x), (x, y), (y, 2 * k + 1)]
    da = 2 * k + 1
    nodes.append(Node(da, "DA", NodeKind.DOMAIN_ADMIN))
    graph = build_graph(nodes, edges, {}, Interval(1, 10))
    return Instance(
        graph=graph,
        entries=frozenset({0}),
        da=da,
        blockable=frozenset(range(1, da)),
        budget=math.ceil(1.5 * k),
        name=f"disjoint_{k}",
    )


def _fixture_star_static_heavy(n: int, t_max: int) -> Instance:
    """Static-dominated chain-of-spokes benchmark graph.

    About n static edges against n/60 dynamic ones over a lifetime of t_max;
    exercises the gap between underlying-edge scans and per-label scans.
    """
    if n < 10 or t_max < 10:
        raise GraphError("star_static_heavy needs n >= 10 and t_max >= 10")
    rng = random.Random(n * 1_000_003 + t_max)
    nodes = [Node(0, "s", NodeKind.USER)]
    nodes += [Node(i, f"h{i}", NodeKind.COMPUTER) for i in range(1, n + 1)]
    da = n + 1
    nodes.append(Node(da, "DA", NodeKind.DOMAIN_ADMIN))
    static = [(0, 1)]
    static += [(i, i + 1) for i in range(1, n)]
    static.append((n, da))
    # shortcut spokes off the entry keep the hub fan-out wide
    for i in range(2, n, 7):
        static.append((0, i))
    dynamic: dict[tuple[int, int], list[int]] = {}
    n_dynamic = max(1, len(static) // 60)
    lo, hi = 1, t_max
    while len(dynamic) < n_dynamic:
        u = rng.randrange(1, n)
        v = rng.randrange(1, n + 1)
        if u == v or (u, v) in dynamic or (v == u + 1):
            continue
        labels = sorted(rng.sample(range(lo, hi), min(3, hi - lo)))
        dynamic[(u, v)] = labels
    graph = build_graph(nodes, static, dynamic, Interval(1, 1 + t_max))
    blockable = frozenset(range(1, da))
    return Instance(
        graph=graph,
        entries=frozenset({0}),
        da=da,
        blockable=blockable,
        budget=None,
        name=f"star_static_heavy_{n}_{t_max}",
    )


_FIXTURE_RE = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(\((?P<args>[^)]*)\))?$")


def fixture(spec: str) -> Instance:
    """Named desk-scale fixtures.

    ``F1`` | ``chain4`` | ``disjoint_k(k)`` | ``star_static_heavy(n, t_max)``.
    """
    m = _FIXTURE_RE.match(spec.strip())
    if not m:
        raise GraphError(f"bad fixture spec {spec!r}")
    name = m.group("name")
    args = [int(a) for a in m.group("args").split(",")] if m.group("args") else []
    if name == "F1" and not args:
        return _fixture_nine_node()
    if name == "chain4" and not args:
        return _fixture_chain4()
    if name == "disjoint_k" and len(args) == 1:
        return _fixture_disjoint(args[0])
    if name == "star_static_heavy" and len(args) == 2:
        return _fixture_star_static_heavy(args[0], args[1])
    raise GraphError(f"unknown fixture {spec!r}")


# -- randomized desk-scale instances (oracle-checkable) ----------------------------


def random_instance(
    rng: random.Random,
    max_nodes: int = 12,
    max_lifetime: int = 12,
    edge_prob: float = 0.25,
    static_share: float = 0.5,
    entries_count: int = 2,
    blockable_fraction: float = 1.0,
    budget: Optional[int] = None,
) -> Instance:
    """Small random temporal instance for oracle-backed testing.

    Keeps everything within exhaustive-enumeration reach.  Budget defaults to
    the full blockable count (i.e. unconstrained).
    """
    n = rng.randint(4, max_nodes)
    lifetime = rng.randint(3, max_lifetime)
    interval = Interval(1, 1 + lifetime)
    da = n - 1
    nodes = [Node(i, f"n{i}", NodeKind.OTHER) for i in range(n - 1)]
    nodes.append(Node(da, "DA", NodeKind.DOMAIN_ADMIN))
    static: list[tuple[int, int]] = []
    dynamic: dict[tuple[int, int], list[int]] = {}
    hi = interval.t_omega - 1
    for u in range(n):
        for v in range(n):
            if u == v or rng.random() >= edge_prob:
                continue
            if rng.random() < static_share:
                static.append((u, v))
            else:
                count = rng.randint(1, min(4, hi - interval.t_alpha))
                labels = sorted(rng.sample(range(interval.t_alpha, hi + 1), count))
                dynamic[(u, v)] = labels
    graph = build_graph(nodes, static, dynamic, interval, reclassify_full_dynamic=True)
    entries_count = min(entries_count, n - 1)
    entries = frozenset(rng.sample(range(n - 1), entries_count))
    candidates = [i for i in range(n - 1) if i not in entries]
    k = max(1, round(blockable_fraction * len(candidates))) if candidates else 0
    blockable = frozenset(rng.sample(candidates, min(k, len(candidates))))
    return Instance(
        graph=graph,
        entries=entries,
        da=da,
        blockable=blockable,
        budget=len(blockable) if budget is None else budget,
        name="random",
    )
