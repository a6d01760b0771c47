"""Non-parametric comparison of two experiment arms.

Kruskal-Wallis for significance, Vargha-Delaney A12 for effect size.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import chi2

__all__ = [
    "SampleGroup",
    "ComparisonResult",
    "vargha_delaney_a12",
    "effect_label",
    "kruskal_wallis",
    "midranks",
    "compare",
    "SMALL",
    "MEDIUM",
    "LARGE",
]

SMALL, MEDIUM, LARGE = 0.56, 0.64, 0.71
ALPHA = 0.05


@dataclass(frozen=True)
class SampleGroup:
    label: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError(f"sample group {self.label!r} is empty")

    @classmethod
    def of(cls, label: str, values: Sequence[float]) -> "SampleGroup":
        return cls(label, tuple(float(v) for v in values))


@dataclass(frozen=True)
class ComparisonResult:
    metric: str
    a12: float
    effect_label: str
    kw_h: float
    p_value: float
    significant: bool


def _values(g: SampleGroup | Sequence[float]) -> tuple[float, ...]:
    vals = g.values if isinstance(g, SampleGroup) else tuple(g)
    if not vals:
        raise ValueError("A12 needs non-empty groups")
    return vals


def vargha_delaney_a12(g1: SampleGroup | Sequence[float], g2: SampleGroup | Sequence[float]) -> float:
    """Probability that a draw from ``g1`` exceeds one from ``g2`` (ties count half)."""
    xs, ys = _values(g1), _values(g2)
    greater = ties = 0
    for x in xs:
        for y in ys:
            if x > y:
                greater += 1
            elif x == y:
                ties += 1
    return (greater + 0.5 * ties) / (len(xs) * len(ys))


def effect_label(a12: float) -> str:
    """``none``/``small``/``medium``/``large``, mirrored around 0.5."""
    # mirrored bounds spelled out: 1 - 0.71 is not exactly 0.29 in binary
    if a12 > LARGE or a12 < 0.29:
        return "large"
    if a12 > MEDIUM or a12 < 0.36:
        return "medium"
    if a12 > SMALL or a12 < 0.44:
        return "small"
    return "none"


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def _h_statistic(groups: Sequence[Sequence[float]]) -> float:
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    ranks = midranks(pooled)
    tie_sizes: dict[float, int] = {}
    for v in pooled:
        tie_sizes[v] = tie_sizes.get(v, 0) + 1
    correction = 1.0 - sum(t**3 - t for t in tie_sizes.values()) / (n**3 - n) if n > 1 else 0.0
    if correction <= 0:
        return 0.0
    centre = (n + 1) / 2
    h = 0.0
    pos = 0
    for g in groups:
        r = ranks[pos : pos + len(g)]
        pos += len(g)
        h += len(g) * (sum(r) / len(g) - centre) ** 2
    return 12.0 / (n * (n + 1)) * h / correction


def _exact_p(groups: Sequence[Sequence[float]], observed: float, limit: int) -> float:
    pooled = [v for g in groups for v in g]
    sizes = [len(g) for g in groups]
    total = math.factorial(len(pooled))
    for s in sizes:
        total //= math.factorial(s)
    if total > limit:
        raise ValueError(f"exact test would enumerate {total} partitions (limit {limit})")

    hits = count = 0

    def assign(remaining: list[int], k: int, acc: list[list[float]]) -> None:
        nonlocal hits, count
        if k == len(sizes) - 1:
            h = _h_statistic(acc + [[pooled[i] for i in remaining]])
            count += 1
            if h >= observed - 1e-12:
                hits += 1
            return
        for combo in itertools.combinations(remaining, sizes[k]):
            rest = [i for i in remaining if i not in combo]
            assign(rest, k + 1, acc + [[pooled[i] for i in combo]])

    assign(list(range(len(pooled))), 0, [])
    return hits / count


def kruskal_wallis(
    groups: Sequence[SampleGroup | Sequence[float]],
    exact: bool = False,
    exact_limit: int = 200_000,
) -> tuple[float, float]:
    """Kruskal-Wallis H (tie-corrected) and its p-value.

    The p-value comes from the chi-square distribution with ``len(groups) - 1``
    degrees of freedom, or from full enumeration of group assignments when
    ``exact`` is set. If every observation is identical, returns ``(0.0, 1.0)``.
    """
    vals = [_values(g) for g in groups]
    if len(vals) < 2:
        raise ValueError("Kruskal-Wallis needs at least two groups")
    h = _h_statistic(vals)
    pooled = [v for g in vals for v in g]
    if len(set(pooled)) == 1:
        return 0.0, 1.0
    if exact:
        return h, _exact_p(vals, h, exact_limit)
    return h, float(chi2.sf(h, len(vals) - 1))


def compare(metric: str, treatment: SampleGroup, baseline: SampleGroup) -> ComparisonResult:
    """A12 of ``treatment`` over ``baseline`` plus the Kruskal-Wallis verdict."""
    a12 = vargha_delaney_a12(treatment, baseline)
    h, p = kruskal_wallis([treatment, baseline])
    return ComparisonResult(metric, a12, effect_label(a12), h, p, p < ALPHA)
