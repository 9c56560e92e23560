"""Evolutionary search for high-response-time decoy placements.

Six variants share the same mutation/crossover operators and differ on two
axes: what an offspring must beat to enter the population, and which member
leaves.  Diversity-driven eviction ("*_d") drops the member contributing
least to population diversity; value-driven eviction ("*_v") drops the worst
scorer.  Constraint handling is either absent (van), an exact repair of every
infeasible offspring (ilp), or a surrogate objective over a growing pool of
known attack paths with penalties for unccovered paths (est).

Everything is driven by one seeded random stream; identical (instance,
config, seed) reproduce identical results bit for bit.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import cutsolver
from .attacker import (
    STATUS_INFEASIBLE,
    STATUS_OK,
    fitness_full,
    surrogate_fitness,
)
from .graph import GraphError, Instance, TemporalPath, remove_nodes
from .reachability import random_temporal_path

VARIANTS = ("van_d", "van_v", "ilp_d", "ilp_v", "est_d", "est_v")


@dataclass(frozen=True)
class Individual:
    """Candidate placement as a bit vector over the blockable-node order."""

    bits: tuple[int, ...]
    birth_iteration: int = 0

    @property
    def popcount(self) -> int:
        return sum(self.bits)

    def blocks(self, instance: Instance) -> frozenset[int]:
        order = instance.blockable_order
        return frozenset(order[i] for i, bit in enumerate(self.bits) if bit)


@dataclass
class OptimizerConfig:
    variant: str = "van_d"
    population_size: int = 10
    budget: Optional[int] = None
    poisson_lambda: float = 1.0
    fitness_slack: float = 0.1
    local_batch: int = 1000
    paths_per_infeasible: int = 1
    pool_seed_paths: int = 5
    max_iterations: int = 10_000
    wallclock_limit_s: Optional[float] = None
    seed: int = 0
    target_fitness: Optional[float] = None
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise GraphError(f"unknown variant {self.variant!r}; pick one of {VARIANTS}")
        if self.population_size < 1 or self.poisson_lambda <= 0:
            raise GraphError("population_size and poisson_lambda must be positive")
        if not 0 <= self.fitness_slack < 1:
            raise GraphError("fitness_slack must lie in [0, 1)")
        if self.local_batch < 1 or self.paths_per_infeasible < 1:
            raise GraphError("local_batch and paths_per_infeasible must be positive")

    @property
    def diversity_eviction(self) -> bool:
        return self.variant.endswith("_d")


@dataclass(frozen=True)
class HistoryPoint:
    iteration: int
    elapsed_ms: float
    fitness_evals: int
    best_value: float


@dataclass
class RunResult:
    variant: str
    seed: int
    best_value: float
    best_blocks: frozenset[int]
    population: list[tuple[Individual, float]]
    history: list[HistoryPoint]
    iterations: int
    last_improvement: Optional[HistoryPoint]
    status: str
    stats: dict = field(default_factory=dict)


# -- operators -------------------------------------------------------------------


def sample_change_count(rng: random.Random, lam: float, n_bits: int) -> int:
    """At-least-one Poisson draw, capped at the vector length."""
    if lam <= 0:
        raise GraphError("poisson rate must be positive")
    # Knuth inversion keeps everything on the single seeded stream
    threshold = math.exp(-lam)
    k, acc = 0, 1.0
    while True:
        acc *= rng.random()
        if acc <= threshold:
            break
        k += 1
    return max(1, min(k, n_bits))


def _enforce_budget(bits: list[int], rng: random.Random, budget: int) -> set[int]:
    """Unblock uniformly random set bits until the budget holds."""
    trimmed: set[int] = set()
    over = sum(bits) - budget
    if over > 0:
        ones = [i for i, bit in enumerate(bits) if bit]
        for i in rng.sample(ones, over):
            bits[i] = 0
            trimmed.add(i)
    return trimmed


def init_population(
    instance: Instance, config: OptimizerConfig, rng: random.Random
) -> list[Individual]:
    """Uniformly random individuals, each within budget and nonempty."""
    n = len(instance.blockable_order)
    budget = _budget(instance, config)
    hi = min(budget, n)
    population = []
    for _ in range(config.population_size):
        k = rng.randint(min(1, hi), hi)
        bits = [0] * n
        for i in rng.sample(range(n), k):
            bits[i] = 1
        population.append(Individual(tuple(bits), birth_iteration=0))
    return population


def mutate(
    parent: Individual, x: int, rng: random.Random, budget: int
) -> tuple[Individual, set[int]]:
    """Flip exactly ``x`` distinct uniformly chosen bits, then re-enforce budget."""
    if x < 1:
        raise GraphError("mutation must flip at least one bit")
    n = len(parent.bits)
    bits = list(parent.bits)
    changed = set(rng.sample(range(n), min(x, n)))
    for i in changed:
        bits[i] ^= 1
    changed |= _enforce_budget(bits, rng, budget)
    return Individual(tuple(bits)), changed


def crossover(
    p1: Individual, p2: Individual, x: int, rng: random.Random, budget: int
) -> tuple[tuple[Individual, set[int]], tuple[Individual, set[int]]]:
    """Swap up to ``x`` coordinates from each mismatch class on both parents."""
    n = len(p1.bits)
    zeros_ones = [i for i in range(n) if p1.bits[i] == 0 and p2.bits[i] == 1]
    ones_zeros = [i for i in range(n) if p1.bits[i] == 1 and p2.bits[i] == 0]
    picked = set(rng.sample(zeros_ones, min(x, len(zeros_ones))))
    picked |= set(rng.sample(ones_zeros, min(x, len(ones_zeros))))
    b1, b2 = list(p1.bits), list(p2.bits)
    for i in picked:
        b1[i] ^= 1
        b2[i] ^= 1
    c1 = set(picked) | _enforce_budget(b1, rng, budget)
    c2 = set(picked) | _enforce_budget(b2, rng, budget)
    return (Individual(tuple(b1)), c1), (Individual(tuple(b2)), c2)


def diversity_counts(population: Sequence[Individual]) -> list[int]:
    """Per-coordinate count of individuals blocking that node."""
    if not population:
        return []
    counts = [0] * len(population[0].bits)
    for ind in population:
        for i, bit in enumerate(ind.bits):
            counts[i] += bit
    return counts


def diversity_contribution(counts: Sequence[int], individual: Individual) -> int:
    """Sum of population counts over the individual's blocked nodes.

    Lower means the individual blocks rarer nodes and contributes more
    diversity.
    """
    return sum(c for c, bit in zip(counts, individual.bits) if bit)


def _admission_threshold(best: float, slack: float) -> float:
    """Entry bar: ``(1 - slack) * best`` for nonnegative scores, the symmetric
    ``best - slack * |best|`` once penalties drive the best negative."""
    return best - slack * abs(best)


def accept_reject_edo(
    population: list[Individual],
    values: list[float],
    offspring: Individual,
    value: float,
    config: OptimizerConfig,
) -> bool:
    """Diversity-driven admission: near-best offspring enter, the least
    diverse member leaves; the best member is immune.

    Members sitting below the admission bar themselves (stragglers the gate
    would no longer let in) are evicted ahead of gate-worthy members —
    otherwise a low-popcount straggler looks maximally "unique" to the
    counting measure and squats in the population forever.
    """
    best = max(values) if values else -math.inf
    threshold = _admission_threshold(best, config.fitness_slack)
    if not (value > best or value >= threshold):
        return False
    _admit_and_evict(
        population, values, offspring, value, diversity_rule=True, threshold=threshold
    )
    return True


def accept_reject_vec(
    population: list[Individual],
    values: list[float],
    offspring: Individual,
    value: float,
) -> bool:
    """Value-driven admission: always enter, the worst scorer leaves
    (diversity breaks ties); the best member is immune."""
    _admit_and_evict(
        population, values, offspring, value, diversity_rule=False, threshold=None
    )
    return True


def _admit_and_evict(
    population: list[Individual],
    values: list[float],
    offspring: Individual,
    value: float,
    diversity_rule: bool,
    threshold: Optional[float],
) -> None:
    population.append(offspring)
    values.append(value)
    counts = diversity_counts(population)
    contribs = [diversity_contribution(counts, ind) for ind in population]
    best_idx = max(range(len(values)), key=lambda i: (values[i], -i))
    candidates = [i for i in range(len(population)) if i != best_idx]
    if diversity_rule:
        stale = [1 if values[i] < threshold else 0 for i in range(len(values))]
        # stragglers first, then highest overlap; ties: worse fitness, older, earlier slot
        evict = max(
            candidates,
            key=lambda i: (
                stale[i],
                contribs[i],
                -values[i],
                -population[i].birth_iteration,
                -i,
            ),
        )
    else:
        evict = max(
            candidates,
            key=lambda i: (
                -values[i],
                contribs[i],
                -population[i].birth_iteration,
                -i,
            ),
        )
    population.pop(evict)
    values.pop(evict)


def _offer(
    population: list[Individual],
    values: list[float],
    offspring: Individual,
    value: float,
    config: OptimizerConfig,
) -> bool:
    if len(population) < config.population_size:
        population.append(offspring)
        values.append(value)
        return True
    if config.diversity_eviction:
        return accept_reject_edo(population, values, offspring, value, config)
    return accept_reject_vec(population, values, offspring, value)


def _budget(instance: Instance, config: OptimizerConfig) -> int:
    budget = config.budget if config.budget is not None else instance.budget
    if budget is None:
        raise GraphError("no budget: set it on the instance or the config")
    return budget


# -- run bookkeeping ---------------------------------------------------------------


class _Tracker:
    """Clock, counters, best-so-far history, and stop conditions for one run."""

    def __init__(self, instance: Instance, config: OptimizerConfig):
        self.instance = instance
        self.config = config
        self.t0 = time.monotonic()
        self.fitness_evals = 0
        self.surrogate_evals = 0
        self.best_value: float = 0
        self.best_blocks: frozenset[int] = frozenset()
        self.history: list[HistoryPoint] = []
        self.last_improvement: Optional[HistoryPoint] = None
        self.first_feasible_iteration: Optional[int] = None
        self.stats: dict = {}

    def elapsed_ms(self) -> float:
        return (time.monotonic() - self.t0) * 1000.0

    def full_fitness(self, individual: Individual) -> float:
        report = fitness_full(self.instance, individual.blocks(self.instance))
        self.fitness_evals += 1
        return report.value

    def note(self, iteration: int, value: float, individual: Individual) -> None:
        if value > 0 and self.first_feasible_iteration is None:
            self.first_feasible_iteration = iteration
        if value > self.best_value:
            self.best_value = value
            self.best_blocks = individual.blocks(self.instance)
            point = HistoryPoint(iteration, self.elapsed_ms(), self.fitness_evals, value)
            self.history.append(point)
            self.last_improvement = point

    def mark_start(self) -> None:
        self.history.append(HistoryPoint(0, self.elapsed_ms(), self.fitness_evals, self.best_value))

    def should_stop(self, iteration: int) -> bool:
        cfg = self.config
        if cfg.target_fitness is not None and self.best_value >= cfg.target_fitness:
            return True
        if cfg.wallclock_limit_s is not None and (
            time.monotonic() - self.t0 >= cfg.wallclock_limit_s
        ):
            return True
        return False

    def result(
        self,
        population: list[Individual],
        values: list[float],
        iterations: int,
    ) -> RunResult:
        final = HistoryPoint(iterations, self.elapsed_ms(), self.fitness_evals, self.best_value)
        if not self.history or self.history[-1].iteration != iterations:
            self.history.append(final)
        stats = {
            "fitness_full_evals": self.fitness_evals,
            "surrogate_evals": self.surrogate_evals,
            "first_feasible_iteration": self.first_feasible_iteration,
            **self.stats,
        }
        return RunResult(
            variant=self.config.variant,
            seed=self.config.seed,
            best_value=self.best_value,
            best_blocks=self.best_blocks,
            population=list(zip(population, values)),
            history=self.history,
            iterations=iterations,
            last_improvement=self.last_improvement,
            status="ok" if self.best_value > 0 else "no_feasible_found",
            stats=stats,
        )


def _spawn(
    population: list[Individual],
    config: OptimizerConfig,
    rng: random.Random,
    budget: int,
    iteration: int,
) -> list[tuple[Individual, set[int]]]:
    """One mutation-or-crossover step; crossover yields both children."""
    n_bits = len(population[0].bits)
    x = sample_change_count(rng, config.poisson_lambda, n_bits)
    if rng.random() < 0.5 or len(population) < 2:
        parent = population[rng.randrange(len(population))]
        child, changed = mutate(parent, x, rng, budget)
        out = [(child, changed)]
    else:
        i, j = rng.sample(range(len(population)), 2)
        out = list(crossover(population[i], population[j], x, rng, budget))
    return [
        (replace(ind, birth_iteration=iteration), changed) for ind, changed in out
    ]


# -- run engines -------------------------------------------------------------------


def run_vanilla(
    instance: Instance, config: OptimizerConfig, rng: Optional[random.Random] = None
) -> RunResult:
    """Plain evolution: every offspring pays the full fitness evaluation."""
    if config.variant not in ("van_d", "van_v"):
        raise GraphError(f"run_vanilla cannot run variant {config.variant!r}")
    return _run_full_fitness(instance, config, rng, repair_offspring=False)


def run_ilp_repair(
    instance: Instance, config: OptimizerConfig, rng: Optional[random.Random] = None
) -> RunResult:
    """Evolution with exact repair: infeasible offspring are patched into
    budget-respecting cuts, or discarded when no patch exists."""
    if config.variant not in ("ilp_d", "ilp_v"):
        raise GraphError(f"run_ilp_repair cannot run variant {config.variant!r}")
    return _run_full_fitness(instance, config, rng, repair_offspring=True)


def _bits_from_blocks(instance: Instance, blocks: frozenset[int], iteration: int) -> Individual:
    order = instance.blockable_order
    index = {node: i for i, node in enumerate(order)}
    bits = [0] * len(order)
    for node in blocks:
        bits[index[node]] = 1
    return Individual(tuple(bits), birth_iteration=iteration)


def _run_full_fitness(
    instance: Instance,
    config: OptimizerConfig,
    rng: Optional[random.Random],
    repair_offspring: bool,
) -> RunResult:
    from .reachability import is_temporal_cut

    rng = rng or random.Random(config.seed)
    budget = _budget(instance, config)
    tracker = _Tracker(instance, config)
    repairs_ok = repairs_failed = 0

    population = init_population(instance, config, rng)
    if repair_offspring:
        fixed = []
        for ind in population:
            blocks = ind.blocks(instance)
            if blocks and is_temporal_cut(instance, blocks):
                fixed.append(ind)
                continue
            patched = cutsolver.repair(
                instance, blocks, blocks, rng, budget=budget
            )
            if patched is None:
                repairs_failed += 1
                fixed.append(ind)
            else:
                repairs_ok += 1
                fixed.append(_bits_from_blocks(instance, patched, 0))
        population = fixed
    values = [tracker.full_fitness(ind) for ind in population]
    for ind, val in zip(population, values):
        tracker.note(0, val, ind)
    tracker.mark_start()

    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        if tracker.should_stop(iteration):
            iteration -= 1
            break
        for child, changed in _spawn(population, config, rng, budget, iteration):
            if repair_offspring:
                blocks = child.blocks(instance)
                if not blocks or not is_temporal_cut(instance, blocks):
                    patched = cutsolver.repair(instance, blocks, changed, rng, budget=budget)
                    if patched is None:
                        repairs_failed += 1
                        continue
                    repairs_ok += 1
                    child = _bits_from_blocks(instance, patched, iteration)
            value = tracker.full_fitness(child)
            tracker.note(iteration, value, child)
            _offer(population, values, child, value, config)
    tracker.stats.update(repairs_ok=repairs_ok, repairs_failed=repairs_failed)
    return tracker.result(population, values, iteration)


# -- surrogate-assisted engine -------------------------------------------------------


def seed_path_pool(
    instance: Instance, config: OptimizerConfig, rng: random.Random
) -> list[TemporalPath]:
    """Initial pool of random attack paths (deduplicated by node sequence)."""
    pool: list[TemporalPath] = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(config.pool_seed_paths):
        path = random_temporal_path(
            instance.graph, instance.entries, instance.da, instance.interval, rng
        )
        if path is not None and path.vertices() not in seen:
            seen.add(path.vertices())
            pool.append(path)
    return pool


def local_search(
    population: list[Individual],
    values: list[float],
    pool: Sequence[TemporalPath],
    instance: Instance,
    config: OptimizerConfig,
    rng: random.Random,
    tracker: "_Tracker",
    iteration: int,
) -> None:
    """One surrogate-scored offspring round against the local population."""
    budget = _budget(instance, config)
    for child, _ in _spawn(population, config, rng, budget, iteration):
        value = surrogate_fitness(instance, child.blocks(instance), pool)
        tracker.surrogate_evals += 1
        _offer(population, values, child, value, config)


def global_search(
    global_population: list[Individual],
    global_values: list[float],
    local_population: Sequence[Individual],
    instance: Instance,
    config: OptimizerConfig,
    tracker: "_Tracker",
    iteration: int,
) -> None:
    """Promote local candidates through a full-fitness gate."""
    if config.jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            reports = list(
                pool.map(
                    lambda ind: fitness_full(instance, ind.blocks(instance)),
                    local_population,
                )
            )
        tracker.fitness_evals += len(reports)
        evaluated = [(ind, rep.value) for ind, rep in zip(local_population, reports)]
    else:
        evaluated = [
            (ind, tracker.full_fitness(ind)) for ind in local_population
        ]
    for ind, value in evaluated:
        tracker.note(iteration, value, ind)
        _offer(global_population, global_values, ind, value, config)


def update_path_pool(
    pool: list[TemporalPath],
    local_population: Sequence[Individual],
    instance: Instance,
    config: OptimizerConfig,
    rng: random.Random,
    tracker: "_Tracker",
) -> None:
    """Grow the surrogate pool from the current population's weaknesses.

    Feasible members contribute the attacker's optimal path against them;
    infeasible members contribute random surviving attack paths that dodge
    them.  Deduplication is by node sequence, so time-shifted copies of a
    known route never bloat the pool.
    """
    seen = {path.vertices() for path in pool}

    def add(path: Optional[TemporalPath]) -> None:
        if path is not None and path.vertices() not in seen:
            seen.add(path.vertices())
            pool.append(path)

    for ind in local_population:
        blocks = ind.blocks(instance)
        report = fitness_full(instance, blocks)
        tracker.fitness_evals += 1
        if report.status == STATUS_OK and report.witness is not None:
            add(report.witness.full_path())
        elif report.status == STATUS_INFEASIBLE:
            reduced = remove_nodes(instance.graph, blocks)
            for _ in range(config.paths_per_infeasible):
                add(
                    random_temporal_path(
                        reduced, instance.entries, instance.da, instance.interval, rng
                    )
                )


def run_surrogate(
    instance: Instance, config: OptimizerConfig, rng: Optional[random.Random] = None
) -> RunResult:
    """Two-tier evolution: cheap surrogate locally, full fitness globally.

    A global round fires once the whole local population covers every pooled
    path and ``local_batch`` local iterations have passed since the previous
    round; it promotes candidates into the global population and then
    refreshes the pool.
    """
    if config.variant not in ("est_d", "est_v"):
        raise GraphError(f"run_surrogate cannot run variant {config.variant!r}")
    rng = rng or random.Random(config.seed)
    tracker = _Tracker(instance, config)

    local_population = init_population(instance, config, rng)
    pool = seed_path_pool(instance, config, rng)
    local_values = [
        surrogate_fitness(instance, ind.blocks(instance), pool)
        for ind in local_population
    ]
    tracker.surrogate_evals += len(local_values)
    global_population: list[Individual] = []
    global_values: list[float] = []
    tracker.mark_start()

    global_rounds = 0
    rounds_to_first_feasible: Optional[int] = None
    since_global = 0
    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        if tracker.should_stop(iteration):
            iteration -= 1
            break
        local_search(
            local_population, local_values, pool, instance, config, rng, tracker, iteration
        )
        since_global += 1
        if since_global >= config.local_batch and all(v >= 0 for v in local_values):
            global_rounds += 1
            global_search(
                global_population,
                global_values,
                local_population,
                instance,
                config,
                tracker,
                iteration,
            )
            if rounds_to_first_feasible is None and tracker.best_value > 0:
                rounds_to_first_feasible = global_rounds
            update_path_pool(pool, local_population, instance, config, rng, tracker)
            # the pool changed; surrogate scores must be refreshed
            local_values = [
                surrogate_fitness(instance, ind.blocks(instance), pool)
                for ind in local_population
            ]
            tracker.surrogate_evals += len(local_values)
            since_global = 0
    tracker.stats.update(
        global_rounds=global_rounds,
        rounds_to_first_feasible=rounds_to_first_feasible,
        pool_size=len(pool),
    )
    return tracker.result(global_population, global_values, iteration)


def run(instance: Instance, config: OptimizerConfig, rng: Optional[random.Random] = None) -> RunResult:
    """Dispatch on the configured variant."""
    if config.variant.startswith("van"):
        return run_vanilla(instance, config, rng)
    if config.variant.startswith("ilp"):
        return run_ilp_repair(instance, config, rng)
    return run_surrogate(instance, config, rng)
