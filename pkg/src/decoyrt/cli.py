"""Command-line surface.

Subcommands: generate | mincut | attack | solve | bench-ea | validate.

Every command is deterministic given its inputs and ``--seed``: result and
history files are byte-reproducible.  Physical timing never lands in result
files — it goes to stdout and to the run manifest (``*.manifest.json``).
The solve history CSV's ``wallclock_ms`` column therefore carries the run's
deterministic cost clock (cumulative full-fitness evaluations) instead of
the machine's wall clock; bench CSVs report measured wall time and are the
one deliberately non-reproducible output.

Exit codes: 0 ok, 1 infeasible/undefendable, 2 usage or I/O error,
3 oracle/solver caps exceeded.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import random
import sys
import time
from typing import Optional

from . import __version__, bench, cutsolver, instances, optimizer
from .attacker import MODE_EXHAUSTIVE, MODE_FAST, fitness_full
from .graph import GraphError, Instance
from .reachability import OracleCapExceeded

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_CAPS = 3

HISTORY_HEADER = "iteration,wallclock_ms,best_fitness"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoyrt",
        description="Decoy placement on temporal attack graphs",
    )
    parser.add_argument("--version", action="version", version=f"decoyrt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build an instance file")
    p.add_argument("--fixture", help="named fixture, e.g. F1 or disjoint_k(4)")
    p.add_argument("--synth", action="store_true", help="synthesize mould + trace")
    p.add_argument("--mould", help="mould file to merge a trace into")
    p.add_argument("--trace", help="authentication trace CSV")
    p.add_argument("--users", type=int, default=20)
    p.add_argument("--computers", type=int, default=10)
    p.add_argument("--groups", type=int, default=5)
    p.add_argument("--events", type=int, default=60)
    p.add_argument("--extra-edge-prob", type=float, default=0.05)
    p.add_argument("--mean-session", type=float, default=3.0)
    p.add_argument("--horizon", type=int, default=48)
    p.add_argument("--snapshot-interval", type=int, default=3600)
    p.add_argument("--entries", type=int, default=None)
    p.add_argument("--blockable-frac", type=float, default=None)
    p.add_argument("--bf", type=float, default=None, help="budget factor")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="JSON config file (CLI flags win)")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("mincut", help="minimum temporal cut of an instance")
    p.add_argument("instance")
    p.add_argument("--export-lp", metavar="PATH", help="write the LP text instead of solving")
    p.set_defaults(func=cmd_mincut)

    p = sub.add_parser("attack", help="attacker best response to a placement")
    p.add_argument("instance")
    p.add_argument("--block", required=True, help="comma-separated node names or ids")
    p.add_argument("--mode", choices=[MODE_FAST, MODE_EXHAUSTIVE], default=MODE_FAST)
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("solve", help="run an optimizer variant")
    p.add_argument("instance")
    p.add_argument("--variant", choices=list(optimizer.VARIANTS), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="JSON config file (CLI flags win)")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--wallclock-s", type=float, default=None)
    p.add_argument("--population", type=int, default=None)
    p.add_argument("--local-batch", type=int, default=None)
    p.add_argument("--bf", type=float, default=None, help="budget factor when the instance has no budget")
    p.add_argument("--target-fitness", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("-o", "--out", required=True, help="result stem; writes .json/.history.csv/.manifest.json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench-ea", help="time the earliest-arrival engines")
    p.add_argument("graphs", nargs="+", help="fixture specs or instance files")
    p.add_argument("--reps", type=int, default=7)
    p.add_argument("--warmups", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_bench_ea)

    p = sub.add_parser("validate", help="check an instance file against all invariants")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        return args.func(args)
    except OracleCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPS
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise GraphError(f"{path}: config must be a JSON object")
    return data


def _pick(cli_value, config: dict, key: str, default):
    """CLI flag > config file > built-in default."""
    if cli_value is not None:
        return cli_value
    if key in config:
        return config[key]
    return default


def _write_manifest(
    stem: str,
    command: str,
    config_snapshot: dict,
    seed: Optional[int],
    instance_path: Optional[str],
    started: float,
    extra: Optional[dict] = None,
) -> None:
    manifest = {
        "command": command,
        "config": config_snapshot,
        "seed": seed,
        "instance_digest": instances.instance_digest(instance_path) if instance_path else None,
        "artifact_version": __version__,
        "started_utc": datetime.datetime.utcfromtimestamp(started).isoformat() + "Z",
        "finished_utc": datetime.datetime.utcnow().isoformat() + "Z",
        "elapsed_s": round(time.time() - started, 6),
    }
    if extra:
        manifest.update(extra)
    with open(stem + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- commands ---------------------------------------------------------------------


def cmd_generate(args) -> int:
    started = time.time()
    config = _load_config(args.config)
    seed = _pick(args.seed, config, "seed", 0)
    entries = _pick(args.entries, config, "entries", 10)
    frac = _pick(args.blockable_frac, config, "blockable_frac", 0.9)
    bf = _pick(args.bf, config, "bf", 1.5)
    rng = random.Random(seed)

    if args.fixture:
        instance = instances.fixture(args.fixture)
    elif args.synth or (args.mould and args.trace):
        if args.mould:
            mould = instances.load_mould(args.mould)
            events = instances.load_auth_trace(args.trace) if args.trace else []
        else:
            mould = instances.synth_mould(
                args.users, args.computers, args.groups, args.extra_edge_prob, rng
            )
            events = instances.synth_trace(
                args.users,
                max(1, args.computers),
                args.events,
                args.mean_session,
                rng,
                snapshot_interval=args.snapshot_interval,
                horizon=args.horizon,
            )
        mapping = instances.map_trace_entities(mould, events, rng)
        dynamic = instances.sessions_to_edges(
            events, args.snapshot_interval, args.horizon, mapping
        )
        instance = instances.finalize_instance(
            mould,
            dynamic,
            rng,
            horizon=args.horizon,
            entries_count=entries,
            blockable_fraction=frac,
            budget_factor=bf,
        )
    else:
        raise GraphError("generate needs --fixture, --synth, or --mould/--trace")

    instances.save_instance(instance, args.out)
    cut = cutsolver.min_temporal_cut(instance)
    if cut.status == cutsolver.STATUS_INFEASIBLE:
        print("warning: instance has no blockable cut", file=sys.stderr)
    g = instance.graph
    budget = instance.budget if instance.budget is not None else "none"
    print(
        f"wrote {args.out}: nodes={g.node_count} eps_s={g.eps_s} eps_d={g.eps_d} "
        f"mincut={len(cut.blocks)} budget={budget}"
    )
    _write_manifest(
        args.out,
        "generate",
        {"fixture": args.fixture, "entries": entries, "blockable_frac": frac, "bf": bf},
        seed,
        args.out,
        started,
    )
    return EXIT_OK


def cmd_mincut(args) -> int:
    instance = instances.load_instance(args.instance)
    if args.export_lp:
        text = cutsolver.export_ilp(instance, "mincut")
        with open(args.export_lp, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.export_lp}")
        return EXIT_OK
    solution = cutsolver.min_temporal_cut(instance)
    if solution.status == cutsolver.STATUS_INFEASIBLE:
        print("undefendable: no blockable cut exists")
        return EXIT_INFEASIBLE
    if solution.status == cutsolver.STATUS_UNREACHABLE:
        print("mincut=0 (target already unreachable)")
        return EXIT_OK
    names = ",".join(instance.node_names(solution.blocks))
    print(f"mincut={len(solution.blocks)} witness={names}")
    return EXIT_OK


def _parse_placement(instance: Instance, spec: str) -> frozenset[int]:
    lookup = instance.name_to_id()
    out = set()
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if token in lookup:
            out.add(lookup[token])
        else:
            try:
                out.add(int(token))
            except ValueError:
                raise GraphError(f"unknown node {token!r}") from None
    return instance.check_placement(out)


def cmd_attack(args) -> int:
    instance = instances.load_instance(args.instance)
    placement = _parse_placement(instance, args.block)
    report = fitness_full(instance, placement, mode=args.mode)
    witness = report.witness
    lines = [
        f"placement={','.join(instance.node_names(placement))}",
        f"mode={args.mode}",
        f"feasible={'yes' if report.feasible else 'no'}",
        f"status={report.status}",
        f"response_time={report.value if report.value != math.inf else 'inf'}",
    ]
    doc: dict = {
        "placement": sorted(placement),
        "mode": args.mode,
        "feasible": report.feasible,
        "status": report.status,
        "response_time": None if report.value == math.inf else report.value,
    }
    if witness is not None and witness.response_time is not None:
        full = witness.full_path()
        lines.append(f"contact={instance.graph.node(witness.contact).name}")
        lines.append(f"contact_time={witness.contact_time}")
        lines.append(f"attack_path={full.describe(instance.graph)}")
        doc["contact"] = witness.contact
        doc["contact_time"] = witness.contact_time
        doc["attack_path"] = [list(e) for e in full.edges]
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.time()
    file_config = _load_config(args.config)
    instance = instances.load_instance(args.instance)
    if instance.budget is None:
        bf = _pick(args.bf, file_config, "bf", None)
        if bf is None:
            raise GraphError(
                "instance has no budget; pass --bf to derive one from the minimum cut"
            )
        cut = cutsolver.min_temporal_cut(instance)
        if cut.status == cutsolver.STATUS_INFEASIBLE:
            print("undefendable: no blockable cut exists", file=sys.stderr)
            return EXIT_INFEASIBLE
        budget = math.ceil(bf * len(cut.blocks))
        instance = Instance(
            graph=instance.graph,
            entries=instance.entries,
            da=instance.da,
            blockable=instance.blockable,
            budget=budget,
            name=instance.name,
        )
        print(f"derived budget={budget} from mincut={len(cut.blocks)}")

    config = optimizer.OptimizerConfig(
        variant=_pick(args.variant, file_config, "variant", "est_d"),
        population_size=_pick(args.population, file_config, "population_size", 10),
        poisson_lambda=file_config.get("poisson_lambda", 1.0),
        fitness_slack=file_config.get("fitness_slack", 0.1),
        local_batch=_pick(args.local_batch, file_config, "local_batch", 1000),
        paths_per_infeasible=file_config.get("paths_per_infeasible", 1),
        pool_seed_paths=file_config.get("pool_seed_paths", 5),
        max_iterations=_pick(args.max_iters, file_config, "max_iterations", 10_000),
        wallclock_limit_s=_pick(args.wallclock_s, file_config, "wallclock_limit_s", None),
        seed=_pick(args.seed, file_config, "seed", 0),
        target_fitness=_pick(args.target_fitness, file_config, "target_fitness", None),
        jobs=_pick(args.jobs, file_config, "jobs", 1),
    )
    result = optimizer.run(instance, config)
    _write_solve_outputs(args.out, instance, config, result)
    _write_manifest(
        args.out,
        "solve",
        _config_snapshot(config),
        config.seed,
        args.instance,
        started,
        extra={
            "last_improvement_wall_ms": (
                None if result.last_improvement is None else round(result.last_improvement.elapsed_ms, 3)
            )
        },
    )
    last = result.last_improvement
    last_iter = last.iteration if last else "-"
    last_ms = f"{last.elapsed_ms:.0f}" if last else "-"
    best = result.best_value if result.best_value != math.inf else "inf"
    print(
        f"variant={config.variant} best_fitness={best} status={result.status} "
        f"iterations={result.iterations} evals={result.stats['fitness_full_evals']} "
        f"last_improvement_iter={last_iter} last_improvement_wall_ms={last_ms}"
    )
    return EXIT_OK if result.status == "ok" else EXIT_INFEASIBLE


def _config_snapshot(config: optimizer.OptimizerConfig) -> dict:
    snap = dict(vars(config))
    return snap


def _write_solve_outputs(
    stem: str,
    instance: Instance,
    config: optimizer.OptimizerConfig,
    result: optimizer.RunResult,
) -> None:
    def enc(v: float):
        return "inf" if v == math.inf else v

    doc = {
        "variant": result.variant,
        "seed": result.seed,
        "best_fitness": enc(result.best_value),
        "best_blocks": instance.node_names(result.best_blocks),
        "status": result.status,
        "iterations": result.iterations,
        "last_improvement": (
            None
            if result.last_improvement is None
            else {
                "iteration": result.last_improvement.iteration,
                "fitness_evals": result.last_improvement.fitness_evals,
            }
        ),
        "population": [
            {"blocks": instance.node_names(ind.blocks(instance)), "fitness": enc(value)}
            for ind, value in result.population
        ],
        "stats": {k: v for k, v in sorted(result.stats.items())},
        "config": _config_snapshot(config),
    }
    with open(stem + ".json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(stem + ".history.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTORY_HEADER.split(","))
        for point in result.history:
            writer.writerow([point.iteration, point.fitness_evals, enc(point.best_value)])


def cmd_bench_ea(args) -> int:
    pairs = []
    for spec in args.graphs:
        if spec.endswith(".json"):
            pairs.append((spec, instances.load_instance(spec)))
        else:
            pairs.append((spec, instances.fixture(spec)))
    records = bench.bench_earliest_arrival(
        pairs, warmups=args.warmups, repetitions=args.reps, jobs=args.jobs
    )
    text = bench.records_to_csv(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            print(f"{args.instance}: invalid JSON: {exc}")
            return EXIT_USAGE
    problems = instances.validate_instance_data(data)
    if problems:
        for problem in problems:
            print(f"{args.instance}: {problem}")
        print(f"{len(problems)} problem(s) found")
        return EXIT_INFEASIBLE
    print(f"{args.instance}: ok")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
