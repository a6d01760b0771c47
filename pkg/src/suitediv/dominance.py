"""Pareto dominance, fast non-dominated sorting and crowding distance.

Objective orientation is fixed: crashes and coverage are maximised, sequence
length is minimised.
"""

from __future__ import annotations

import math
from typing import Sequence

from .sut import FitnessVector

__all__ = ["dominates", "non_dominated_sort", "crowding_distance", "rank_and_crowding"]


def dominates(a: FitnessVector, b: FitnessVector) -> bool:
    """True if ``a`` is at least as good as ``b`` everywhere and strictly better somewhere."""
    if a.crashes < b.crashes or a.coverage < b.coverage or a.length > b.length:
        return False
    return a.crashes > b.crashes or a.coverage > b.coverage or a.length < b.length


def non_dominated_sort(pool: Sequence[FitnessVector]) -> list[list[int]]:
    """Fast non-dominated sort.

    Returns fronts as lists of indices into ``pool``; indices inside a front
    are in ascending order.
    """
    n = len(pool)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    counts = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(pool[i], pool[j]):
                dominated_by[i].append(j)
                counts[j] += 1
            elif dominates(pool[j], pool[i]):
                dominated_by[j].append(i)
                counts[i] += 1
    fronts: list[list[int]] = []
    current = [i for i in range(n) if counts[i] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
    return fronts


def crowding_distance(front: Sequence[FitnessVector]) -> list[float]:
    """NSGA-II crowding distance of each member of ``front``.

    Members holding the minimum or maximum value of an objective get
    ``inf``. Every other member accumulates the normalised gap between the
    nearest distinct values below and above its own. An objective with zero
    range contributes nothing. Treating tied values as one group makes the
    result independent of the order of ``front``; for distinct values it is
    the textbook definition.
    """
    n = len(front)
    if n <= 2:
        return [math.inf] * n
    dist = [0.0] * n
    for values in (
        [f.crashes for f in front],
        [f.coverage for f in front],
        [f.length for f in front],
    ):
        lo, hi = min(values), max(values)
        span = hi - lo
        if span == 0:
            continue
        distinct = sorted(set(values))
        pos = {v: k for k, v in enumerate(distinct)}
        for i, v in enumerate(values):
            if v == lo or v == hi:
                dist[i] = math.inf
            else:
                k = pos[v]
                dist[i] += (distinct[k + 1] - distinct[k - 1]) / span
    return dist


def rank_and_crowding(pool: Sequence[FitnessVector]) -> tuple[list[int], list[float]]:
    """Per-member (rank, crowding) computed front by front over the whole pool."""
    rank = [0] * len(pool)
    crowd = [0.0] * len(pool)
    for r, front in enumerate(non_dominated_sort(pool)):
        cd = crowding_distance([pool[i] for i in front])
        for i, d in zip(front, cd):
            rank[i] = r
            crowd[i] = d
    return rank, crowd
