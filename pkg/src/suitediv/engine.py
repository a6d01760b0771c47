"""NSGA-II test-suite search with four optional diversity mechanisms.

With every mechanism switched off the engine is a plain NSGA-II over whole
test suites. The mechanisms are:

* ``diverse_init``: draw ``size_init`` random suites and keep the
  ``size_pop`` most mutually distant ones.
* ``adaptive_control``: when the average population diameter falls to
  ``div_limit`` times its initial value, replace variation by a batch of
  fresh random suites and select the most distant survivors.
* ``duplicate_elim``: drop suites at distance 0 from an earlier one before
  survivor selection.
* ``hybrid_selection``: fill ``size_pop - n_div`` slots by rank and crowding,
  the remaining ``n_div`` with the most distant suites of parents+offspring.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from .dominance import crowding_distance, dominates, non_dominated_sort
from .genotype import GenotypeConfig, TestSuite, pairwise_distances, random_suite
from .landscape import GenerationSnapshot, default_reference, hypervolume, snapshot
from .sut import AppModel, CrashReport, EvaluatedIndividual, evaluate
from .variation import VariationConfig, select_most_distant_indices, whole_suite_variation

__all__ = [
    "Mechanisms",
    "EngineConfig",
    "StepRecord",
    "RunState",
    "initialize",
    "step",
    "run",
    "survivor_order",
    "non_dominated_sort",
    "crowding_distance",
]

logger = logging.getLogger(__name__)

MECHANISM_NAMES = ("diverse_init", "adaptive_control", "duplicate_elim", "hybrid_selection")


@dataclass(frozen=True)
class Mechanisms:
    diverse_init: bool = False
    adaptive_control: bool = False
    duplicate_elim: bool = False
    hybrid_selection: bool = False

    @classmethod
    def all(cls) -> "Mechanisms":
        return cls(True, True, True, True)

    @classmethod
    def none(cls) -> "Mechanisms":
        return cls()

    @classmethod
    def parse(cls, text: str) -> "Mechanisms":
        """``all``, ``none`` or a comma list of mechanism names."""
        text = text.strip()
        if text == "all":
            return cls.all()
        if text in ("none", ""):
            return cls.none()
        names = [t.strip().replace("-", "_") for t in text.split(",") if t.strip()]
        unknown = [n for n in names if n not in MECHANISM_NAMES]
        if unknown:
            raise ValueError(f"unknown mechanism(s): {', '.join(unknown)}")
        return cls(**{n: True for n in names})

    def label(self) -> str:
        on = [n for n in MECHANISM_NAMES if getattr(self, n)]
        if len(on) == len(MECHANISM_NAMES):
            return "all"
        return ",".join(on) if on else "none"


@dataclass(frozen=True)
class EngineConfig:
    size_pop: int = 50
    size_off: int = 50
    g_max: int = 40
    vcfg: VariationConfig = field(default_factory=VariationConfig)
    size_init: int = 100
    div_limit: float = 0.5
    n_div: int = 15
    mechanisms: Mechanisms = field(default_factory=Mechanisms)
    rng_seed: int = 0
    genotype: GenotypeConfig = field(default_factory=GenotypeConfig)
    k: int = 300
    count_singletons: bool = True
    log_selections: bool = False

    def __post_init__(self) -> None:
        if self.size_pop < 2:
            raise ValueError(f"size_pop must be >= 2, got {self.size_pop}")
        if self.size_off < 1:
            raise ValueError(f"size_off must be >= 1, got {self.size_off}")
        if self.g_max < 0:
            raise ValueError(f"g_max must be >= 0, got {self.g_max}")
        if self.size_init < self.size_pop:
            raise ValueError(f"size_init ({self.size_init}) must be >= size_pop ({self.size_pop})")
        if not 0.0 <= self.div_limit <= 1.0:
            raise ValueError(f"div_limit must be in [0, 1], got {self.div_limit}")
        if not 0 <= self.n_div < self.size_pop:
            raise ValueError(f"n_div must be in [0, size_pop), got {self.n_div}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")

    def with_seed(self, seed: int) -> "EngineConfig":
        return replace(self, rng_seed=seed)


@dataclass
class StepRecord:
    """What happened in one generation; enough to audit every mechanism."""

    generation: int
    branch: str  # "init", "restart" or "variation"
    div_pop: float
    threshold: float
    pool_size: int = 0
    pool_min_distance: int = -1
    refilled: int = 0
    sorted_order: list[int] = field(default_factory=list)
    best_slice: list[int] = field(default_factory=list)
    div_slice: list[int] = field(default_factory=list)
    hybrid_refill: list[int] = field(default_factory=list)
    survivors: list[int] = field(default_factory=list)


@dataclass
class RunState:
    population: list[EvaluatedIndividual]
    rng: random.Random
    archive: list[EvaluatedIndividual] = field(default_factory=list)
    crash_log: dict[int, CrashReport] = field(default_factory=dict)
    div_init: float = 0.0
    generation: int = 0
    evaluations: int = 0
    executed_events: int = 0
    crash_events: int = 0
    snapshots: list[GenerationSnapshot] = field(default_factory=list)
    records: list[StepRecord] = field(default_factory=list)
    archive_hv: list[float] = field(default_factory=list)
    selection_log: list[dict[str, Any]] = field(default_factory=list)
    last_pool: list[EvaluatedIndividual] = field(default_factory=list)


# -- helpers -------------------------------------------------------------------


def _avgdiam(suites: Sequence[TestSuite]) -> float:
    n = len(suites)
    if n < 2:
        return 0.0
    return float(pairwise_distances(suites).sum()) / (n * (n - 1))


def _evaluate_all(state: RunState, suites: Sequence[TestSuite], app: AppModel) -> list[EvaluatedIndividual]:
    out = []
    for s in suites:
        ev = evaluate(s, app, suite_index=state.evaluations)
        state.evaluations += 1
        state.executed_events += ev.executed_events
        state.crash_events += len(ev.crashes)
        for rep in ev.crashes:
            best = state.crash_log.get(rep.crash_id)
            if best is None or rep.revealing_prefix_length < best.revealing_prefix_length:
                state.crash_log[rep.crash_id] = rep
        ind = EvaluatedIndividual(s, ev.fitness)
        _update_archive(state.archive, ind)
        out.append(ind)
    return out


def _update_archive(archive: list[EvaluatedIndividual], ind: EvaluatedIndividual) -> None:
    f = ind.fitness
    for a in archive:
        if dominates(a.fitness, f) or a.fitness == f:
            return
    archive[:] = [a for a in archive if not dominates(f, a.fitness)]
    archive.append(ind)


def _select_distant(state: RunState, cfg: EngineConfig, pool: Sequence[TestSuite], count: int,
                    distances: np.ndarray | None = None) -> list[int]:
    trace = state.selection_log if cfg.log_selections else None
    return select_most_distant_indices(pool, count, distances=distances, trace=trace)


def _record(state: RunState, cfg: EngineConfig, rec: StepRecord) -> None:
    state.records.append(rec)
    state.snapshots.append(
        snapshot(
            state.population,
            cfg.genotype,
            cfg.k,
            default_reference(cfg.genotype.seq_max),
            generation=state.generation,
            count_singletons=cfg.count_singletons,
        )
    )
    state.archive_hv.append(
        hypervolume([a.fitness for a in state.archive], default_reference(cfg.genotype.seq_max))
    )


def survivor_order(pool: Sequence[EvaluatedIndividual], size: int) -> tuple[list[int], list[int], list[float]]:
    """NSGA-II ordering of ``pool``.

    Whole fronts are taken until at least ``size`` members are collected;
    those members are sorted by rank, then by descending crowding distance
    (stable on pool order). Returns ``(order, rank, crowding)`` where rank and
    crowding are indexed by pool position (unset entries are -1 / 0.0).
    """
    fitness = [p.fitness for p in pool]
    rank = [-1] * len(pool)
    crowd = [0.0] * len(pool)
    taken: list[int] = []
    for r, front in enumerate(non_dominated_sort(fitness)):
        if len(taken) >= size:
            break
        cd = crowding_distance([fitness[i] for i in front])
        for i, c in zip(front, cd):
            rank[i] = r
            crowd[i] = c
        taken.extend(front)
    order = sorted(taken, key=lambda i: (rank[i], -crowd[i], i))
    return order, rank, crowd


# -- public API ----------------------------------------------------------------


def initialize(cfg: EngineConfig, app: AppModel) -> RunState:
    """Initial population, its evaluation, ``div_init`` and the generation-0 snapshot."""
    if app.alphabet_size != cfg.genotype.alphabet_size:
        raise ValueError(
            f"app alphabet ({app.alphabet_size}) differs from genotype alphabet ({cfg.genotype.alphabet_size})"
        )
    rng = random.Random(cfg.rng_seed)
    state = RunState(population=[], rng=rng)
    if cfg.mechanisms.diverse_init:
        candidates = [random_suite(cfg.genotype, rng) for _ in range(cfg.size_init)]
        keep = _select_distant(state, cfg, candidates, cfg.size_pop)
        suites = [candidates[i] for i in sorted(keep)]
    else:
        suites = [random_suite(cfg.genotype, rng) for _ in range(cfg.size_pop)]
    state.population = _evaluate_all(state, suites, app)
    state.div_init = _avgdiam(suites)
    _record(state, cfg, StepRecord(0, "init", state.div_init, cfg.div_limit * state.div_init))
    return state


def step(state: RunState, cfg: EngineConfig, app: AppModel) -> RunState:
    """Advance ``state`` by one generation (in place) and return it."""
    if state.generation >= cfg.g_max:
        raise ValueError(f"generation {state.generation} already reached g_max={cfg.g_max}")
    rng = state.rng
    mech = cfg.mechanisms
    parents = state.population
    state.generation += 1

    div_pop = _avgdiam([p.suite for p in parents])
    threshold = cfg.div_limit * state.div_init
    rec = StepRecord(state.generation, "variation", div_pop, threshold)

    if mech.adaptive_control and div_pop <= threshold:
        rec.branch = "restart"
        fresh = [random_suite(cfg.genotype, rng) for _ in range(cfg.size_off)]
        offspring = _evaluate_all(state, fresh, app)
        pool = parents + offspring
        rec.pool_size = len(pool)
        keep = _select_distant(state, cfg, [p.suite for p in pool], cfg.size_pop)
        rec.survivors = sorted(keep)
        state.population = [pool[i] for i in rec.survivors]
        state.last_pool = pool
        _record(state, cfg, rec)
        return state

    children = whole_suite_variation(parents, cfg.vcfg, rng, cfg.size_off, cfg.genotype)
    offspring = _evaluate_all(state, children, app)
    pool = parents + offspring

    if mech.duplicate_elim:
        seen: set[TestSuite] = set()
        unique = []
        for p in pool:
            if p.suite not in seen:
                seen.add(p.suite)
                unique.append(p)
        pool = unique
        while len(pool) < cfg.size_pop:
            s = random_suite(cfg.genotype, rng)
            if s in seen:
                continue
            seen.add(s)
            pool.extend(_evaluate_all(state, [s], app))
            rec.refilled += 1

    rec.pool_size = len(pool)
    need_distances = mech.duplicate_elim or (mech.hybrid_selection and cfg.n_div > 0)
    d = pairwise_distances([p.suite for p in pool]) if need_distances else None
    if mech.duplicate_elim and d is not None and len(pool) > 1:
        rec.pool_min_distance = int(d[~np.eye(len(pool), dtype=bool)].min())

    order, _, _ = survivor_order(pool, cfg.size_pop)
    rec.sorted_order = order
    if mech.hybrid_selection and cfg.n_div > 0:
        best = order[: cfg.size_pop - cfg.n_div]
        div = _select_distant(state, cfg, [p.suite for p in pool], cfg.n_div, distances=d)
        chosen = list(best)
        taken = set(best)
        for i in div:
            if i not in taken:
                chosen.append(i)
                taken.add(i)
        refill = []
        for i in order[cfg.size_pop - cfg.n_div :]:
            if len(chosen) >= cfg.size_pop:
                break
            if i not in taken:
                chosen.append(i)
                taken.add(i)
                refill.append(i)
        rec.best_slice, rec.div_slice, rec.hybrid_refill = best, div, refill
        survivors = chosen
    else:
        survivors = order[: cfg.size_pop]
    rec.survivors = survivors
    state.population = [pool[i] for i in survivors]
    state.last_pool = pool
    _record(state, cfg, rec)
    return state


def run(cfg: EngineConfig, app: AppModel) -> RunState:
    """Initialise, then step until ``g_max``; yields ``g_max + 1`` snapshots."""
    state = initialize(cfg, app)
    while state.generation < cfg.g_max:
        step(state, cfg, app)
        rec = state.records[-1]
        logger.debug("generation %d branch=%s div_pop=%.1f", state.generation, rec.branch, rec.div_pop)
    return state
