"""Decoy placement on temporal attack graphs.

Library layout:

* :mod:`decoyrt.graph` — temporal graphs, paths, placements, response time
* :mod:`decoyrt.reachability` — earliest-arrival engines, enumeration, cuts
* :mod:`decoyrt.attacker` — attacker best response and defender fitness
* :mod:`decoyrt.cutsolver` — exact minimum-cut / repair solvers, LP export
* :mod:`decoyrt.optimizer` — the six evolutionary variants
* :mod:`decoyrt.instances` — file format, traces, generators, fixtures
* :mod:`decoyrt.bench` — timing harness
* :mod:`decoyrt.cli` — the ``decoyrt`` command
"""

__version__ = "0.1.0"

from .graph import (
    EdgeInfo,
    GraphError,
    Instance,
    Interval,
    Node,
    NodeKind,
    TemporalGraph,
    TemporalPath,
    build_graph,
    first_contact,
    path_from_graph,
    path_metrics,
    remove_nodes,
    response_time,
    validate_path,
)
from .reachability import (
    ArrivalMap,
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
from .attacker import (
    AttackReport,
    FitnessReport,
    achievable_arrivals,
    fitness_full,
    optimal_attack,
    optimal_attack_exhaustive,
    surrogate_fitness,
)
from .cutsolver import CutSolution, budgeted_cut, export_ilp, min_temporal_cut, repair
from .instances import (
    AuthEvent,
    MouldGraph,
    finalize_instance,
    fixture,
    instance_from_dict,
    instance_to_dict,
    load_auth_trace,
    load_instance,
    load_mould,
    random_instance,
    save_instance,
    sessions_to_edges,
    synth_mould,
    synth_trace,
)
from .optimizer import (
    Individual,
    OptimizerConfig,
    RunResult,
    run,
    run_ilp_repair,
    run_surrogate,
    run_vanilla,
)

__all__ = [name for name in dir() if not name.startswith("_")]
