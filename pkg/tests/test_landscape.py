import random

import numpy as np
import pytest

from conftest import make_ind
from oracles import (
    grid_hv,
    monte_carlo_hv,
    naive_front,
    naive_snapshot,
    random_population,
    reachability_components,
    sweep_kconnec,
)
from suitediv.genotype import GenotypeConfig, TestSuite
from suitediv.landscape import (
    SNAPSHOT_COLUMNS,
    GenerationSnapshot,
    build_pareto_graph,
    default_reference,
    diameters,
    hvconnec,
    hypervolume,
    kconnec,
    lconnec,
    nconnec,
    pareto_front,
    pconnec,
    ppos,
    reldiam,
    snapshot,
)
from suitediv.landscape import _kconnec_from
from suitediv.sut import FitnessVector

REF = default_reference()


def zeros(n):
    return TestSuite.of([[0] * n])


def line(lengths, fits=None):
    """Individuals whose pairwise distance is the difference of their lengths."""
    fits = fits or [(1, 0.5, 10.0)] * len(lengths)
    return [make_ind(*f, zeros(n)) for n, f in zip(lengths, fits)]


def nondominated_points(rng, n):
    pts = []
    while len(pts) < n:
        cand = FitnessVector(rng.randint(0, 6), round(rng.random(), 3), float(rng.randint(1, 500)))
        pts.append(cand)
        keep = naive_front(pts)
        pts = [pts[i] for i in keep]
    return pts


class TestParetoFront:
    def test_single(self):
        pop = [make_ind(1, 0.1, 5.0)]
        assert pareto_front(pop) == pop

    def test_strictly_better(self):
        a, b = make_ind(2, 0.5, 5.0), make_ind(1, 0.1, 9.0)
        assert pareto_front([a, b]) == [a]

    def test_ppos(self):
        assert ppos([make_ind(1, 0.2, 3.0)] * 7) == 1.0
        pop = [make_ind(5, 0.9, 1.0, zeros(i)) for i in range(5)]
        pop += [make_ind(0, 0.1, 100.0 + i) for i in range(45)]
        assert ppos(pop) == 0.1
        with pytest.raises(ValueError):
            ppos([])

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_oracle(self, seed):
        rng = random.Random(seed)
        pop = [make_ind(rng.randrange(3), rng.randrange(3) / 3, float(rng.randrange(3))) for _ in range(50)]
        ids = {id(p): i for i, p in enumerate(pop)}
        assert [ids[id(p)] for p in pareto_front(pop)] == naive_front([p.fitness for p in pop])


class TestHypervolume:
    def test_single_box(self):
        assert hypervolume([FitnessVector(2, 0.5, 100.0)], REF) == 400.0

    def test_empty(self):
        assert hypervolume([], REF) == 0.0

    def test_degenerate_point(self):
        assert hypervolume([FitnessVector(0, 0.9, 10.0)], REF) == 0.0

    def test_two_overlapping_boxes(self):
        # 1*1*400 + 2*0.5*200 - 1*0.5*200
        pts = [FitnessVector(1, 1.0, 100.0), FitnessVector(2, 0.5, 300.0)]
        assert hypervolume(pts, REF) == pytest.approx(400 + 200 - 100)

    def test_outside_box(self):
        with pytest.raises(ValueError):
            hypervolume([FitnessVector(1, 0.5, 600.0)], REF)
        with pytest.raises(ValueError):
            hypervolume([FitnessVector(-1, 0.5, 100.0)], REF)

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_grid_oracle(self, seed):
        rng = random.Random(seed)
        pts = [FitnessVector(rng.randint(0, 4), rng.randrange(5) / 4, float(rng.randint(0, 500)))
               for _ in range(rng.randint(1, 10))]
        assert hypervolume(pts, REF) == pytest.approx(grid_hv(pts, REF), rel=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_monte_carlo(self, seed):
        pts = nondominated_points(random.Random(seed), 8)
        est = monte_carlo_hv(pts, REF, 1_000_000, seed)
        assert hypervolume(pts, REF) == pytest.approx(est, rel=0.03)

    @pytest.mark.parametrize("seed", range(20))
    def test_monotone(self, seed):
        rng = random.Random(seed)
        pts = []
        last = 0.0
        for _ in range(15):
            pts.append(FitnessVector(rng.randint(0, 5), rng.random(), float(rng.randint(0, 500))))
            hv = hypervolume(pts, REF)
            assert hv >= last
            last = hv
        front = [pts[i] for i in naive_front(pts)]
        assert hypervolume(front, REF) == hypervolume(pts, REF)


class TestDiameters:
    def test_two(self):
        assert diameters(line([0, 10])) == (10, 10.0, 10)

    def test_duplicate(self):
        assert diameters(line([3, 3, 9]))[2] == 0

    def test_too_small(self):
        with pytest.raises(ValueError):
            diameters(line([1]))

    def test_ordered_pair_average(self):
        # pairs 1,4,3 -> each counted twice over 6 ordered pairs
        assert diameters(line([0, 1, 4])) == (4, 8 / 3, 1)

    def test_reldiam(self):
        cfg = GenotypeConfig(suite_max=1, seq_min=1, seq_max=2500)
        assert reldiam(line([0, 1000]), cfg) == 0.4
        assert reldiam(line([7, 7, 7]), cfg) == 0.0


class TestGraph:
    def test_strict_threshold(self):
        assert build_pareto_graph(line([0, 299]), k=300).edges == [(0, 1)]
        assert build_pareto_graph(line([0, 300]), k=300).edges == []

    def test_empty(self):
        g = build_pareto_graph([], k=300)
        assert len(g) == 0 and g.components == []
        assert pconnec(g) == 0.0 and nconnec(g) == 0 and lconnec(g) == 0 and hvconnec(g) == 0.0

    def test_pconnec(self):
        g = build_pareto_graph(line([0, 5, 100]), k=10)
        assert pconnec(g) == 2 / 3
        assert pconnec(build_pareto_graph(line([0, 50, 100]), k=10)) == 0.0
        assert pconnec(build_pareto_graph(line([0, 5, 8]), k=10)) == 1.0

    def test_nconnec(self):
        g = build_pareto_graph(line([0, 5, 10, 15, 100]), k=6)
        assert g.edges == [(0, 1), (1, 2), (2, 3)]
        assert nconnec(g) == 2
        assert nconnec(g, count_singletons=False) == 1
        assert nconnec(build_pareto_graph(line([0, 1, 2]), k=10)) == 1
        assert nconnec(build_pareto_graph(line([0, 20, 40, 60]), k=10)) == 4

    def test_kconnec(self):
        assert kconnec(line([0, 100])) == 101
        assert kconnec(line([0])) == 0
        assert kconnec([]) == 0
        # distance matrix 100/200/500: the chain through the two short edges
        w = np.array([[0, 100, 500], [100, 0, 200], [500, 200, 0]])
        assert _kconnec_from(w) == 201 == sweep_kconnec(w.tolist())
        assert kconnec(line([0, 100, 300])) == 201

    def test_lconnec(self):
        assert lconnec(build_pareto_graph(line([0, 50, 100]), k=10)) == 1
        lengths = list(range(20)) + [100 * (i + 1) for i in range(5)]
        assert lconnec(build_pareto_graph(line(lengths), k=2)) == 20

    def test_hvconnec(self):
        one = build_pareto_graph(line([0, 1], [(1, 0.5, 100.0), (2, 0.2, 200.0)]), k=10)
        assert hvconnec(one, REF) == 1.0
        # component {0,1} holds both extremes; the isolated dominated-region point adds nothing
        three = line([0, 1, 500], [(2, 1.0, 0.0), (0, 0.0, 500.0), (1, 0.5, 100.0)])
        assert hvconnec(build_pareto_graph(three, k=10), REF) == 1.0
        # two singletons with disjoint-gain boxes: tie on size, larger own hv wins
        two = line([0, 500], [(1, 1.0, 400.0), (2, 0.5, 100.0)])
        g = build_pareto_graph(two, k=10)
        a, b = 1 * 1.0 * 100, 2 * 0.5 * 400
        overlap = 1 * 0.5 * 100
        assert hvconnec(g, REF) == pytest.approx(b / (a + b - overlap))

    def test_zero_hv_front(self):
        g = build_pareto_graph(line([0, 1], [(0, 0.0, 10.0)] * 2), k=10)
        assert hvconnec(g, REF) == 0.0

    @pytest.mark.parametrize("seed", range(25))
    def test_components_match_reachability(self, seed):
        rng = random.Random(seed)
        lengths = [rng.randint(0, 60) for _ in range(rng.randint(1, 12))]
        k = rng.randint(1, 20)
        g = build_pareto_graph(line(lengths), k=k)
        oracle = reachability_components(len(lengths), lambda u, v: u != v and abs(lengths[u] - lengths[v]) < k)
        assert sorted(g.components) == oracle
        assert sum(len(c) for c in g.components) == len(lengths)


@pytest.mark.parametrize("seed", range(100))
def test_snapshot_matches_brute_force(seed):
    rng = random.Random(seed)
    cfg = GenotypeConfig(suite_max=2, seq_min=1, seq_max=6, alphabet_size=3)
    pop = random_population(rng, rng.randint(2, 12))
    k = rng.randint(1, 8)
    ref = default_reference(cfg.seq_max)
    singletons = rng.random() < 0.7
    snap = snapshot(pop, cfg, k, ref, generation=seed, count_singletons=singletons)
    oracle = naive_snapshot(pop, 2, 6, k, ref, singletons)
    assert snap.generation == seed
    for name, expected in oracle.items():
        assert getattr(snap, name) == pytest.approx(expected, rel=1e-12, abs=1e-12), name
    front = pareto_front(pop)
    graph = build_pareto_graph(front, snap.kconnec, cfg)
    assert nconnec(graph) == 1
    if snap.kconnec > 0:
        assert nconnec(build_pareto_graph(front, snap.kconnec - 1, cfg)) > 1


def test_snapshot_hand_fixture():
    cfg = GenotypeConfig(suite_max=1, seq_min=1, seq_max=500)
    pop = line([10, 30], [(1, 0.5, 100.0), (2, 0.25, 300.0)])
    s = snapshot(pop, cfg, k=300)
    assert s == GenerationSnapshot(
        generation=0,
        ppos=1.0,
        hv=1 * 0.5 * 400 + 2 * 0.25 * 200 - 1 * 0.25 * 200,
        maxdiam=20,
        avgdiam=20.0,
        mindiam=20,
        reldiam=20 / 500,
        pconnec=1.0,
        nconnec=1,
        kconnec=21,
        lconnec=2,
        hvconnec=1.0,
    )


def test_snapshot_duplicates():
    cfg = GenotypeConfig(suite_max=1, seq_min=1, seq_max=500)
    s = snapshot(line([5, 5, 5]), cfg)
    assert (s.mindiam, s.reldiam, s.ppos) == (0, 0.0, 1.0)
    assert s == snapshot(line([5, 5, 5]), cfg)


def test_snapshot_row_round_trip():
    cfg = GenotypeConfig(suite_max=1, seq_min=1, seq_max=500)
    s = snapshot(line([10, 30, 45], [(1, 0.5, 100.0), (2, 0.25, 300.0), (0, 0.125, 50.0)]), cfg, generation=3)
    row = s.as_row()
    assert len(row) == len(SNAPSHOT_COLUMNS)
    assert row[0] == "3" and row[SNAPSHOT_COLUMNS.index("hv")] == f"{s.hv:.6f}"
    back = GenerationSnapshot.from_row(row)
    assert back.as_row() == row
    assert isinstance(back.kconnec, int)
