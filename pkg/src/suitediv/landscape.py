"""Global-topology landscape metrics, computed once per generation.

Pareto-optimal solutions (``ppos``, ``hv``), population spread (``maxdiam``,
``avgdiam``, ``mindiam``, ``reldiam``) and connectedness of the Pareto-optimal
solutions in genotype space (``pconnec``, ``nconnec``, ``kconnec``,
``lconnec``, ``hvconnec``).
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, field, fields
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dominance import dominates
from .genotype import GenotypeConfig, max_possible_distance, pairwise_distances
from .sut import EvaluatedIndividual, FitnessVector

__all__ = [
    "EvaluatedIndividual",
    "ParetoGraph",
    "GenerationSnapshot",
    "SNAPSHOT_COLUMNS",
    "default_reference",
    "pareto_front",
    "pareto_indices",
    "ppos",
    "hypervolume",
    "diameters",
    "reldiam",
    "build_pareto_graph",
    "pconnec",
    "nconnec",
    "kconnec",
    "lconnec",
    "hvconnec",
    "snapshot",
]


def default_reference(seq_max: int = 500) -> FitnessVector:
    """Nadir point: no crashes, no coverage, longest allowed sequences."""
    return FitnessVector(0, 0.0, float(seq_max))


# -- Pareto-optimal solutions -------------------------------------------------


def pareto_indices(fitness: Sequence[FitnessVector]) -> list[int]:
    return [
        i
        for i, f in enumerate(fitness)
        if not any(dominates(g, f) for j, g in enumerate(fitness) if j != i)
    ]


def pareto_front(pop: Sequence[EvaluatedIndividual]) -> list[EvaluatedIndividual]:
    """Mutually non-dominated members of ``pop`` (individuals with equal fitness all survive)."""
    return [pop[i] for i in pareto_indices([p.fitness for p in pop])]


def ppos(pop: Sequence[EvaluatedIndividual]) -> float:
    if not pop:
        raise ValueError("ppos of an empty population is undefined")
    return len(pareto_front(pop)) / len(pop)


def hypervolume(front: Sequence[FitnessVector], reference: FitnessVector | None = None) -> float:
    """Exact volume dominated by ``front`` relative to ``reference``.

    Crashes and coverage count upwards from the reference, length counts
    downwards (``reference.length - length``). Arithmetic is done on exact
    rationals, so adding a point can never lower the result through
    rounding. Slabs along the crash axis are swept; inside each slab the
    2-D union of anchored rectangles is a staircase.

    Raises:
        ValueError: if a point lies outside the reference box.
    """
    ref = default_reference() if reference is None else reference
    boxes = []
    for f in front:
        x = Fraction(f.crashes) - Fraction(ref.crashes)
        y = Fraction(f.coverage) - Fraction(ref.coverage)
        z = Fraction(ref.length) - Fraction(f.length)
        if x < 0 or y < 0 or z < 0:
            raise ValueError(f"point {f} lies outside the reference box {ref}")
        if x and y and z:
            boxes.append((x, y, z))
    if not boxes:
        return 0.0

    xs = sorted({b[0] for b in boxes}, reverse=True)
    total = Fraction(0)
    for k, x in enumerate(xs):
        width = x - (xs[k + 1] if k + 1 < len(xs) else 0)
        active = sorted((b[1], b[2]) for b in boxes if b[0] >= x)
        # staircase, scanning y from high to low while tracking the tallest z
        area = Fraction(0)
        zmax = Fraction(0)
        for i in range(len(active) - 1, -1, -1):
            y, z = active[i]
            zmax = max(zmax, z)
            below = active[i - 1][0] if i > 0 else 0
            area += (y - below) * zmax
        total += width * area
    return float(total)


# -- population spread ----------------------------------------------------------


def _distances(pop: Sequence[EvaluatedIndividual]) -> np.ndarray:
    return pairwise_distances([p.suite for p in pop])


def _diameters_from(d: np.ndarray) -> tuple[int, float, int]:
    n = d.shape[0]
    if n < 2:
        raise ValueError(f"population diameters need at least 2 individuals, got {n}")
    off = d[~np.eye(n, dtype=bool)]
    return int(off.max()), float(off.sum()) / (n * (n - 1)), int(off.min())


def diameters(pop: Sequence[EvaluatedIndividual], cfg: GenotypeConfig | None = None) -> tuple[int, float, int]:
    """``(maxdiam, avgdiam, mindiam)`` over all ordered pairs of distinct members."""
    return _diameters_from(_distances(pop))


def reldiam(pop: Sequence[EvaluatedIndividual], cfg: GenotypeConfig) -> float:
    return diameters(pop, cfg)[1] / max_possible_distance(cfg)


# -- connectedness of Pareto-optimal solutions ----------------------------------


def _components(n: int, adjacent: np.ndarray) -> list[list[int]]:
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in zip(*np.nonzero(np.triu(adjacent, k=1))):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


@dataclass
class ParetoGraph:
    """Pareto-optimal solutions joined when their genotypic distance is below ``k``."""

    vertices: list[EvaluatedIndividual]
    weights: np.ndarray
    k: int
    components: list[list[int]] = field(default_factory=list)

    @property
    def edges(self) -> list[tuple[int, int]]:
        n = len(self.vertices)
        return [(i, j) for i in range(n) for j in range(i + 1, n) if self.weights[i, j] < self.k]

    def __len__(self) -> int:
        return len(self.vertices)


def build_pareto_graph(
    front: Sequence[EvaluatedIndividual],
    k: int = 300,
    cfg: GenotypeConfig | None = None,
    weights: np.ndarray | None = None,
) -> ParetoGraph:
    """Connectedness graph over ``front``: an edge for every pair at distance ``< k``."""
    front = list(front)
    w = _distances(front) if weights is None else weights
    comps = _components(len(front), w < k) if front else []
    return ParetoGraph(front, w, k, comps)


def pconnec(graph: ParetoGraph) -> float:
    """Share of vertices lying in components of two or more."""
    n = len(graph)
    if n == 0:
        return 0.0
    return sum(len(c) for c in graph.components if len(c) >= 2) / n


def nconnec(graph: ParetoGraph, count_singletons: bool = True) -> int:
    """Number of connected components; singletons count unless ``count_singletons`` is off."""
    if count_singletons:
        return len(graph.components)
    return sum(1 for c in graph.components if len(c) >= 2)


def _kconnec_from(w: np.ndarray) -> int:
    n = w.shape[0]
    if n < 2:
        return 0
    # Prim on the complete graph; the answer is one past the heaviest MST edge
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = w[0].astype(np.int64).copy()
    heaviest = 0
    for _ in range(n - 1):
        cand = np.where(in_tree, np.iinfo(np.int64).max, best)
        j = int(np.argmin(cand))
        heaviest = max(heaviest, int(cand[j]))
        in_tree[j] = True
        best = np.minimum(best, w[j])
    return heaviest + 1


def kconnec(front: Sequence[EvaluatedIndividual], cfg: GenotypeConfig | None = None) -> int:
    """Smallest threshold whose connectedness graph over ``front`` is a single component."""
    return _kconnec_from(_distances(front))


def lconnec(graph: ParetoGraph) -> int:
    return max((len(c) for c in graph.components), default=0)


def _largest_component(graph: ParetoGraph, reference: FitnessVector) -> list[int]:
    def key(c: list[int]) -> tuple[int, float, int]:
        own = hypervolume([graph.vertices[i].fitness for i in c], reference)
        return (-len(c), -own, c[0])

    return min(graph.components, key=key)


def hvconnec(graph: ParetoGraph, reference: FitnessVector | None = None) -> float:
    """Hypervolume of the largest component relative to that of all vertices.

    The largest component is the one with most members; ties go to the
    larger own hypervolume, then to the lowest vertex index.
    """
    ref = default_reference() if reference is None else reference
    if not graph.components:
        return 0.0
    full = hypervolume([v.fitness for v in graph.vertices], ref)
    if full == 0:
        return 0.0
    largest = _largest_component(graph, ref)
    return hypervolume([graph.vertices[i].fitness for i in largest], ref) / full


# -- per-generation record -----------------------------------------------------

SNAPSHOT_COLUMNS = (
    "generation",
    "ppos",
    "hv",
    "maxdiam",
    "avgdiam",
    "mindiam",
    "reldiam",
    "pconnec",
    "nconnec",
    "kconnec",
    "lconnec",
    "hvconnec",
)


@dataclass(frozen=True)
class GenerationSnapshot:
    generation: int
    ppos: float
    hv: float
    maxdiam: int
    avgdiam: float
    mindiam: int
    reldiam: float
    pconnec: float
    nconnec: int
    kconnec: int
    lconnec: int
    hvconnec: float

    def as_row(self) -> list[str]:
        """CSV cells in :data:`SNAPSHOT_COLUMNS` order, locale-independent."""
        return [_fmt(v) for v in astuple(self)]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "GenerationSnapshot":
        vals = []
        for f, cell in zip(fields(cls), row):
            vals.append(int(cell) if f.type in ("int", int) else float(cell))
        return cls(*vals)


def _fmt(v: float | int) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.6f}"


def snapshot(
    pop: Sequence[EvaluatedIndividual],
    cfg: GenotypeConfig,
    k: int = 300,
    reference: FitnessVector | None = None,
    generation: int = 0,
    count_singletons: bool = True,
) -> GenerationSnapshot:
    """All eleven metrics for one population state."""
    ref = default_reference(cfg.seq_max) if reference is None else reference
    d = _distances(pop)
    maxd, avgd, mind = _diameters_from(d)
    front_idx = pareto_indices([p.fitness for p in pop])
    front = [pop[i] for i in front_idx]
    w = d[np.ix_(front_idx, front_idx)]
    graph = build_pareto_graph(front, k, cfg, weights=w)
    return GenerationSnapshot(
        generation=generation,
        ppos=len(front) / len(pop),
        hv=hypervolume([p.fitness for p in front], ref),
        maxdiam=maxd,
        avgdiam=avgd,
        mindiam=mind,
        reldiam=avgd / max_possible_distance(cfg),
        pconnec=pconnec(graph),
        nconnec=nconnec(graph, count_singletons),
        kconnec=_kconnec_from(w),
        lconnec=lconnec(graph),
        hvconnec=hvconnec(graph, ref),
    )
