"""Exact temporal-cut solvers and the reachability integer-program exporter.

The in-process engine is a path-branching branch and bound: find any
surviving entry-to-target temporal path, branch on blocking each of its
blockable nodes (latest-labeled first), prune on budget or incumbent.  The
reachability variables of the equivalent integer program are never
materialized — for any fixed blocking decision their minimal consistent
assignment is exactly the temporal reachability indicator, so a reachability
query replaces the whole variable layer.  :func:`export_ilp` still emits the
literal LP text for external solvers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import GraphError, Instance, TemporalPath, remove_nodes
from .reachability import ea_dijkstra, reconstruct_path

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible_within_budget"
STATUS_UNREACHABLE = "unreachable_trivial"


@dataclass(frozen=True)
class CutSolution:
    blocks: frozenset[int]
    objective_value: int
    status: str


def _surviving_path(instance: Instance, blocked: set[int]) -> Optional[TemporalPath]:
    reduced = remove_nodes(instance.graph, blocked)
    amap = ea_dijkstra(reduced, instance.entries, instance.interval)
    if instance.da not in amap.arrival:
        return None
    return reconstruct_path(amap, instance.da)


def _branch_nodes(instance: Instance, path: TemporalPath) -> list[int]:
    """Blockable interior nodes of a witness path, latest departure first."""
    ranked = [
        (t, v)
        for (_, v, t) in path.edges
        if v in instance.blockable
    ]
    ranked.sort(key=lambda p: (-p[0], p[1]))
    return [v for _, v in ranked]


def min_temporal_cut(instance: Instance) -> CutSolution:
    """Minimum-cardinality blockable set disconnecting all attack paths.

    ``unreachable_trivial`` with the empty set when the target is already
    unreachable; ``infeasible_within_budget`` when some path has no blockable
    node at all.
    """
    best: Optional[frozenset[int]] = None

    def search(blocked: set[int], forbidden: set[int]) -> None:
        nonlocal best
        path = _surviving_path(instance, blocked)
        if path is None:
            if best is None or len(blocked) < len(best):
                best = frozenset(blocked)
            return
        if best is not None and len(blocked) + 1 >= len(best):
            return
        shut_out = set(forbidden)
        for v in _branch_nodes(instance, path):
            if v in shut_out:
                continue
            blocked.add(v)
            search(blocked, shut_out)
            blocked.discard(v)
            shut_out.add(v)

    search(set(), set())
    if best is None:
        return CutSolution(frozenset(), 0, STATUS_INFEASIBLE)
    if not best:
        return CutSolution(frozenset(), 0, STATUS_UNREACHABLE)
    return CutSolution(best, len(best), STATUS_OPTIMAL)


def budgeted_cut(
    instance: Instance, fixed_blocks: Iterable[int], budget: int
) -> Optional[frozenset[int]]:
    """Any temporal cut containing ``fixed_blocks`` with at most ``budget``
    nodes, or None when no such cut exists."""
    fixed = instance.check_placement(fixed_blocks)
    if len(fixed) > budget:
        return None

    def search(blocked: set[int], forbidden: set[int]) -> Optional[frozenset[int]]:
        path = _surviving_path(instance, blocked)
        if path is None:
            return frozenset(blocked)
        if len(blocked) >= budget:
            return None
        shut_out = set(forbidden)
        for v in _branch_nodes(instance, path):
            if v in shut_out:
                continue
            blocked.add(v)
            found = search(blocked, shut_out)
            if found is not None:
                return found
            blocked.discard(v)
            shut_out.add(v)
        return None

    return search(set(fixed), set())


def repair(
    instance: Instance,
    blocks: Iterable[int],
    changed: Iterable[int],
    rng: random.Random,
    budget: Optional[int] = None,
) -> Optional[frozenset[int]]:
    """Patch an infeasible placement into a budget-respecting temporal cut.

    Step 1 unblocks each blocked node *not* touched by the generating
    operator with probability 1/2 (freeing room for the patch); step 2
    searches for a cut extending the survivors within the budget.  None
    signals that no such cut exists and the offspring should be discarded.
    """
    if budget is None:
        budget = instance.budget
    if budget is None:
        raise GraphError("repair needs a budget")
    blocks = instance.check_placement(blocks)
    changed = set(changed)
    kept = {
        v for v in sorted(blocks) if v in changed or rng.random() >= 0.5
    }
    if len(kept) > budget:
        return None
    return budgeted_cut(instance, kept, budget)


# -- LP text export ------------------------------------------------------------


def export_ilp(
    instance: Instance,
    variant: str,
    fixed_blocks: Iterable[int] = (),
    budget: Optional[int] = None,
    max_rows: int = 200_000,
) -> str:
    """Emit the reachability integer program as LP-format text.

    ``variant='repair'`` minimizes the number of (entry, time) pairs that can
    still reach the target under a block budget; ``variant='mincut'`` pins
    every entry unreachable and minimizes the number of blocks.  Variables
    are named ``R_<node>_<time>`` and ``B_<node>``.  The target's rows are
    anchored to 1 and, for mincut, entry rows at the interval start to 0 —
    without these anchors the all-zero assignment would satisfy everything.
    """
    if variant not in ("repair", "mincut"):
        raise GraphError(f"unknown ILP variant {variant!r}")
    g = instance.graph
    ta, to = g.interval.t_alpha, g.interval.t_omega
    fixed = instance.check_placement(fixed_blocks)
    if budget is None:
        budget = instance.budget
    if variant == "repair" and budget is None:
        raise GraphError("repair export needs a budget")

    times = range(ta, to + 1)
    n_rows = 0
    rows: list[str] = []

    def add_row(text: str) -> None:
        nonlocal n_rows
        n_rows += 1
        if n_rows > max_rows:
            raise GraphError(
                f"instance too large for LP export: more than {max_rows} rows"
            )
        rows.append(text)

    def r(node: int, t: int) -> str:
        return f"R_{node}_{t}"

    def b(node: int) -> str:
        return f"B_{node}"

    # objective
    if variant == "mincut":
        objective = " + ".join(b(v) for v in sorted(instance.blockable))
        objective = objective or f"0 {r(instance.da, ta)}"
    else:
        terms = [r(s, t) for s in sorted(instance.entries) for t in times]
        objective = " + ".join(terms)

    # edge propagation rows: reachability flows backwards from the target
    for u, v, info in g.edges():
        dur = info.duration
        labels = g.time_labels(u, v)
        for t in labels:
            if t + dur > to:
                continue
            if v in instance.blockable:
                add_row(f"{r(u, t)} - {r(v, t + dur)} + {b(v)} >= 0")
            else:
                add_row(f"{r(u, t)} - {r(v, t + dur)} >= 0")

    # waiting rows: reachable when departing later implies reachable earlier
    for node in g.node_ids:
        for t in range(ta, to):
            add_row(f"{r(node, t)} - {r(node, t + 1)} >= 0")

    # anchors
    for t in times:
        add_row(f"{r(instance.da, t)} = 1")
    if variant == "mincut":
        for s in sorted(instance.entries):
            add_row(f"{r(s, ta)} = 0")
    for v in sorted(fixed):
        add_row(f"{b(v)} = 1")
    if variant == "repair":
        total = " + ".join(b(v) for v in sorted(instance.blockable))
        add_row(f"{total} <= {budget}")

    binaries = [r(node, t) for node in g.node_ids for t in times]
    binaries += [b(v) for v in sorted(instance.blockable)]

    lines = ["Minimize", f" obj: {objective}", "Subject To"]
    lines += [f" c{i}: {row}" for i, row in enumerate(rows)]
    lines.append("Binary")
    lines += [f" {name}" for name in binaries]
    lines.append("End")
    return "\n".join(lines) + "\n"
