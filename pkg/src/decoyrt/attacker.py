"""Attacker best response and defender fitness.

Against a decoy placement that cuts every entry-to-target temporal path, the
rational attacker picks the path minimizing the *response time*: the gap
between triggering the first decoy and reaching the target.  Two engines
compute it:

* :func:`optimal_attack` — fast decomposition: for each decoy, enumerate the
  exact times at which it can be the first decoy hit (predecessor arrivals
  avoiding every decoy, plus free waiting), and chase the earliest target
  arrival from there with the other decoys removed.  Restricting the final
  leg to avoid other decoys can only overestimate the attacker's optimum,
  never underestimate it.
* :func:`optimal_attack_exhaustive` — literal minimum over every enumerated
  temporal attack path; the cross-validation oracle.

Placements that fail to cut score zero (the attacker walks around them).
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graph import (
    GraphError,
    Instance,
    Interval,
    TemporalGraph,
    TemporalPath,
    first_contact,
    path_from_graph,
    path_metrics,
    remove_nodes,
    response_time,
)
from .reachability import (
    ArrivalMap,
    ea_dijkstra,
    enumerate_temporal_paths,
    reconstruct_path,
)

MODE_FAST = "fast"
MODE_EXHAUSTIVE = "exhaustive"

STATUS_OK = "ok"
STATUS_INFEASIBLE = "infeasible"
STATUS_VACUOUS = "vacuous"
STATUS_NO_SINGLE_CONTACT = "no_single_contact"


@dataclass(frozen=True)
class AttackReport:
    """Outcome of one best-response computation.

    When feasible with a witness, ``path_to_contact`` + ``path_onward`` chain
    into a valid attack path whose first decoy hit is ``contact`` at
    ``contact_time`` and whose response time is ``response_time``.  A feasible
    report with ``response_time`` None means the fast engine found no attack
    that meets a single decoy (only multi-decoy routes exist).
    """

    feasible: bool
    mode: str
    response_time: Optional[int] = None
    contact: Optional[int] = None
    contact_time: Optional[int] = None
    path_to_contact: Optional[TemporalPath] = None
    path_onward: Optional[TemporalPath] = None

    def full_path(self) -> Optional[TemporalPath]:
        if self.path_to_contact is None or self.path_onward is None:
            return None
        return TemporalPath(
            self.path_to_contact.edges + self.path_onward.edges,
            self.path_to_contact.durations + self.path_onward.durations,
        )


@dataclass(frozen=True)
class FitnessReport:
    """Defender-side score of a placement: response time if it cuts, else 0."""

    value: float
    feasible: bool
    status: str
    witness: Optional[AttackReport] = None


def achievable_arrivals(
    g_minus: TemporalGraph,
    sources: Iterable[int],
    c: int,
    interval: Optional[Interval] = None,
) -> list[int]:
    """Every time at which ``c`` can be reached *first* among kept nodes.

    Predecessor arrivals are taken on ``g_minus`` with ``c`` itself removed,
    so no contributing route passes through ``c``; free waiting at a
    predecessor then makes every in-edge label at or after its arrival
    usable.  Includes the interval start when ``c`` is a source.
    """
    if not g_minus.has_node(c):
        raise GraphError(f"node {c} not present")
    if interval is None:
        interval = g_minus.interval
    qa, qo = interval.t_alpha, interval.t_omega
    sources = frozenset(sources)
    out: set[int] = set()
    if c in sources:
        out.add(qa)
    rest = sources - {c}
    if rest:
        reduced = remove_nodes(g_minus, {c})
        amap = ea_dijkstra(reduced, rest, interval)
        out |= _arrivals_from_in_edges(g_minus, amap, c, qo)
    return sorted(out)


def _arrivals_from_in_edges(
    graph: TemporalGraph, amap: ArrivalMap, c: int, qo: int
) -> set[int]:
    """Arrival times at ``c`` via in-edges whose tails carry ``amap`` arrivals."""
    out: set[int] = set()
    for u, info in graph.predecessors(c):
        arr_u = amap.arrival.get(u)
        if arr_u is None:
            continue
        dur = info.duration
        if info.labels is None:
            lo, hi = graph.static_label_bounds(dur)
            lo = max(lo, arr_u)
            hi = min(hi, qo - dur)
            out.update(t + dur for t in range(lo, hi + 1))
        else:
            out.update(
                t + dur for t in info.labels if t >= arr_u and t + dur <= qo
            )
    return out


def _witness_in_edge(
    graph: TemporalGraph, amap: ArrivalMap, c: int, arrival_time: int
) -> tuple[int, int]:
    """Deterministic (tail, label) realizing ``arrival_time`` at ``c``."""
    for u, info in graph.predecessors(c):
        arr_u = amap.arrival.get(u)
        if arr_u is None:
            continue
        dur = info.duration
        t = arrival_time - dur
        if t < arr_u:
            continue
        if info.labels is None:
            lo, hi = graph.static_label_bounds(dur)
            if lo <= t <= hi:
                return u, t
        elif t in info.labels:
            return u, t
    raise GraphError(f"no in-edge realizes arrival {arrival_time} at {c}")


def optimal_attack(
    instance: Instance,
    cut: Iterable[int],
    interval: Optional[Interval] = None,
) -> AttackReport:
    """Minimal response time over attacks that hit exactly one decoy.

    Returns an infeasible report when the placement is not a temporal cut.
    When it is, the returned value is an upper bound on — and in the
    single-decoy regime equal to — the exhaustive attacker optimum.
    """
    cut = instance.check_placement(cut)
    g = instance.graph
    if interval is None:
        interval = instance.interval
    qa, qo = interval.t_alpha, interval.t_omega
    decoy_free = remove_nodes(g, cut)
    base = ea_dijkstra(decoy_free, instance.entries, interval)
    if instance.da in base.arrival:
        return AttackReport(feasible=False, mode=MODE_FAST)

    best: Optional[tuple[int, int, int]] = None  # (rt, contact, contact_time)
    best_leg: Optional[ArrivalMap] = None
    for c in sorted(cut):
        keep_c = remove_nodes(g, cut - {c})
        arrivals = sorted(_arrivals_from_in_edges(g, base, c, qo))
        for t_c in arrivals:
            if t_c >= qo:
                continue
            leg = ea_dijkstra(keep_c, {c}, Interval(t_c, qo))
            arr_da = leg.arrival.get(instance.da)
            if arr_da is None:
                continue
            rt = arr_da - t_c
            if best is None or rt < best[0]:
                best = (rt, c, t_c)
                best_leg = leg
    if best is None:
        return AttackReport(feasible=True, mode=MODE_FAST)

    rt, c, t_c = best
    u, t_in = _witness_in_edge(g, base, c, t_c)
    prefix = reconstruct_path(base, u)
    pi1 = path_from_graph(g, prefix.edges + ((u, c, t_in),))
    pi2 = reconstruct_path(best_leg, instance.da)
    return AttackReport(
        feasible=True,
        mode=MODE_FAST,
        response_time=rt,
        contact=c,
        contact_time=t_c,
        path_to_contact=pi1,
        path_onward=pi2,
    )


def optimal_attack_exhaustive(
    instance: Instance,
    cut: Iterable[int],
    interval: Optional[Interval] = None,
    max_paths: int = 200_000,
) -> AttackReport:
    """Literal attacker optimum via enumeration of every temporal attack path.

    Paths may cross several decoys; only the first contact matters.  A path
    that avoids every decoy proves the placement infeasible.  Raises
    :class:`~decoyrt.reachability.OracleCapExceeded` past ``max_paths``.
    """
    cut = instance.check_placement(cut)
    g = instance.graph
    if interval is None:
        interval = instance.interval
    best_rt: Optional[int] = None
    best_path: Optional[TemporalPath] = None
    any_path = False
    remaining = max_paths
    for s in sorted(instance.entries):
        paths = enumerate_temporal_paths(
            g, s, instance.da, interval, max_paths=remaining
        )
        remaining -= len(paths)
        for path in paths:
            any_path = True
            contact = first_contact(path, cut)
            if contact is None:
                return AttackReport(feasible=False, mode=MODE_EXHAUSTIVE)
            rt = path_metrics(path)[1] - contact[1]
            if best_rt is None or rt < best_rt:
                best_rt = rt
                best_path = path
    if not any_path:
        # target unreachable even without decoys
        return AttackReport(feasible=True, mode=MODE_EXHAUSTIVE)
    assert best_path is not None
    contact = first_contact(best_path, cut)
    assert contact is not None
    idx = next(
        i for i, (_, v, _) in enumerate(best_path.edges) if v == contact[0]
    )
    pi1 = TemporalPath(best_path.edges[: idx + 1], best_path.durations[: idx + 1])
    pi2 = TemporalPath(best_path.edges[idx + 1 :], best_path.durations[idx + 1 :])
    return AttackReport(
        feasible=True,
        mode=MODE_EXHAUSTIVE,
        response_time=best_rt,
        contact=contact[0],
        contact_time=contact[1],
        path_to_contact=pi1,
        path_onward=pi2,
    )


_reachable_cache: "weakref.WeakKeyDictionary[Instance, bool]" = weakref.WeakKeyDictionary()


def target_reachable(instance: Instance) -> bool:
    """Whether the target is reachable from the entries with no decoys placed."""
    cached = _reachable_cache.get(instance)
    if cached is None:
        amap = ea_dijkstra(instance.graph, instance.entries, instance.interval)
        cached = instance.da in amap.arrival
        _reachable_cache[instance] = cached
    return cached


def fitness_full(
    instance: Instance,
    cut: Iterable[int],
    mode: str = MODE_FAST,
    max_paths: int = 200_000,
) -> FitnessReport:
    """Defender fitness: attacker's minimal response time if the placement
    cuts, zero otherwise.

    A target unreachable even without decoys yields the distinct ``vacuous``
    status (value 0) so optimizers gain nothing from it.  The fast engine's
    no-single-contact outcome scores +inf with the divergence observable in
    the report status.
    """
    cut = instance.check_placement(cut)
    if instance.budget is not None and len(cut) > instance.budget:
        raise GraphError(f"placement size {len(cut)} exceeds budget {instance.budget}")
    if not target_reachable(instance):
        return FitnessReport(value=0, feasible=True, status=STATUS_VACUOUS)
    if mode == MODE_FAST:
        rep = optimal_attack(instance, cut)
    elif mode == MODE_EXHAUSTIVE:
        rep = optimal_attack_exhaustive(instance, cut, max_paths=max_paths)
    else:
        raise GraphError(f"unknown attack mode {mode!r}")
    if not rep.feasible:
        return FitnessReport(value=0, feasible=False, status=STATUS_INFEASIBLE, witness=rep)
    if rep.response_time is None:
        return FitnessReport(
            value=math.inf, feasible=True, status=STATUS_NO_SINGLE_CONTACT, witness=rep
        )
    return FitnessReport(
        value=rep.response_time, feasible=True, status=STATUS_OK, witness=rep
    )


def surrogate_fitness(
    instance: Instance, cut: Iterable[int], pool: Sequence[TemporalPath]
) -> float:
    """Cheap stand-in fitness over a pool of known attack paths.

    Placements touching every pooled path score the minimal response time
    over the pool (an over-estimate of the true fitness for genuine cuts);
    others are penalized by minus the count of untouched paths.  An empty
    pool is vacuously satisfied and scores +inf.
    """
    cut = instance.check_placement(cut)
    untouched = sum(1 for path in pool if first_contact(path, cut) is None)
    if untouched:
        return -untouched
    if not pool:
        return math.inf
    return min(response_time(path, cut) for path in pool)
