"""Whole-test-suite variation and most-distant subset selection.

Crossover is single-point at the sequence-list level and mutation is one of
the two shuffle moves (swap two sequences, or swap two events within a
sequence). Neither operator changes a sequence's length, so offspring stay
inside the configured length bounds; :func:`clamp_suite` is still applied to
every child as a guard.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .dominance import rank_and_crowding
from .genotype import GenotypeConfig, TestSuite, pairwise_distances
from .sut import EvaluatedIndividual

__all__ = [
    "VariationConfig",
    "crossover",
    "mutate",
    "clamp_suite",
    "whole_suite_variation",
    "select_most_distant",
    "select_most_distant_indices",
]


@dataclass(frozen=True)
class VariationConfig:
    crossover_prob: float = 0.7
    mutation_prob: float = 0.3

    def __post_init__(self) -> None:
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def crossover(a: TestSuite, b: TestSuite, rng: random.Random) -> tuple[TestSuite, TestSuite]:
    """Swap the sequence tails of two suites after a random cut ``c`` in ``[1, m-1]``."""
    if len(a) != len(b):
        raise ValueError(f"suite size mismatch: {len(a)} vs {len(b)}")
    m = len(a)
    if m < 2:
        return a, b
    c = rng.randint(1, m - 1)
    return (
        TestSuite(a.sequences[:c] + b.sequences[c:]),
        TestSuite(b.sequences[:c] + a.sequences[c:]),
    )


def mutate(t: TestSuite, rng: random.Random) -> TestSuite:
    """Apply one shuffle move, chosen with equal probability.

    Either two distinct sequence positions are swapped, or two distinct event
    positions inside one randomly chosen sequence. A move with fewer than two
    positions to pick from leaves the suite unchanged.
    """
    seqs = list(t.sequences)
    if rng.random() < 0.5:
        if len(seqs) < 2:
            return t
        i, j = rng.sample(range(len(seqs)), 2)
        seqs[i], seqs[j] = seqs[j], seqs[i]
    else:
        k = rng.randrange(len(seqs))
        s = list(seqs[k])
        if len(s) < 2:
            return t
        i, j = rng.sample(range(len(s)), 2)
        s[i], s[j] = s[j], s[i]
        seqs[k] = tuple(s)
    return TestSuite(tuple(seqs))


def clamp_suite(t: TestSuite, cfg: GenotypeConfig) -> TestSuite:
    """Force sequence lengths into ``[seq_min, seq_max]``.

    Long sequences are truncated; short non-empty ones are extended by
    repeating their own events cyclically, empty ones with event 0.
    """
    out = []
    changed = False
    for s in t.sequences:
        if len(s) > cfg.seq_max:
            s = s[: cfg.seq_max]
            changed = True
        elif len(s) < cfg.seq_min:
            src = s or (0,)
            s = tuple(src[i % len(src)] for i in range(cfg.seq_min))
            changed = True
        out.append(s)
    return TestSuite(tuple(out)) if changed else t


def _tournament(rank: Sequence[int], crowd: Sequence[float], rng: random.Random) -> int:
    n = len(rank)
    i, j = rng.randrange(n), rng.randrange(n)
    if rank[i] != rank[j]:
        return i if rank[i] < rank[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i if rng.random() < 0.5 else j


def whole_suite_variation(
    parents: Sequence[EvaluatedIndividual],
    vcfg: VariationConfig,
    rng: random.Random,
    size_off: int | None = None,
    cfg: GenotypeConfig | None = None,
) -> list[TestSuite]:
    """Produce ``size_off`` offspring (default: as many as parents).

    Parents are paired by binary tournament on (dominance rank, crowding
    distance), crossed over with probability ``crossover_prob`` and each
    child is mutated with probability ``mutation_prob``.
    """
    if not parents:
        raise ValueError("whole_suite_variation needs at least one parent")
    size_off = len(parents) if size_off is None else size_off
    rank, crowd = rank_and_crowding([p.fitness for p in parents])
    offspring: list[TestSuite] = []
    while len(offspring) < size_off:
        a = parents[_tournament(rank, crowd, rng)].suite
        b = parents[_tournament(rank, crowd, rng)].suite
        if rng.random() < vcfg.crossover_prob:
            a, b = crossover(a, b, rng)
        for child in (a, b):
            if rng.random() < vcfg.mutation_prob:
                child = mutate(child, rng)
            if cfg is not None:
                child = clamp_suite(child, cfg)
            offspring.append(child)
    return offspring[:size_off]


def select_most_distant_indices(
    pool: Sequence[TestSuite],
    count: int,
    distances: np.ndarray | None = None,
    trace: list[dict[str, Any]] | None = None,
) -> list[int]:
    """Greedy farthest-point selection; returns pool indices in selection order.

    Seeds with the pair at maximum distance, then repeatedly adds the
    element whose minimum distance to the selected set is largest. Ties go
    to the lowest index. ``count == 1`` picks the element with the largest
    summed distance to the rest.

    If ``trace`` is given, a record of the call (pool, count, order) is
    appended so the selection can be replayed later.
    """
    n = len(pool)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if count > n:
        raise ValueError(f"cannot select {count} from a pool of {n}")
    d = pairwise_distances(pool) if distances is None else distances

    if count == 1:
        order = [int(np.argmax(d.sum(axis=1)))]
    else:
        # argmax on the upper triangle scans row-major, i.e. lowest (i, j) first
        upper = np.triu(d + 1, k=1)
        flat = int(np.argmax(upper))
        i, j = divmod(flat, n)
        order = [i, j]
        chosen = np.zeros(n, dtype=bool)
        chosen[[i, j]] = True
        nearest = np.minimum(d[i], d[j])
        while len(order) < count:
            cand = np.where(chosen, -1, nearest)
            k = int(np.argmax(cand))
            order.append(k)
            chosen[k] = True
            nearest = np.minimum(nearest, d[k])
    if trace is not None:
        trace.append({"pool": list(pool), "count": count, "order": list(order)})
    return order


def select_most_distant(
    pool: Sequence[TestSuite],
    count: int,
    cfg: GenotypeConfig | None = None,
) -> list[TestSuite]:
    """The ``count`` most mutually distant suites of ``pool``, in pool order."""
    if cfg is not None and any(len(t) != cfg.suite_max for t in pool):
        raise ValueError("pool contains suites that do not match cfg.suite_max")
    order = select_most_distant_indices(pool, count)
    return [pool[i] for i in sorted(order)]
