import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_distance, random_small_suite
from suitediv.genotype import (
    GenotypeConfig,
    TestSuite,
    dumps_suites,
    loads_suites,
    max_possible_distance,
    pairwise_distances,
    random_suite,
    suite_distance,
)

A, B, C, X = 0, 1, 2, 9


def suites(suite_max=2, max_len=5, alphabet=3):
    seq = st.lists(st.integers(0, alphabet - 1), min_size=0, max_size=max_len).map(tuple)
    return st.lists(seq, min_size=suite_max, max_size=suite_max).map(lambda s: TestSuite(tuple(s)))


class TestSuiteDistance:
    def test_identity(self):
        t = TestSuite.of([[A, B, C], [C]])
        assert suite_distance(t, t) == 0

    def test_hand_trace(self):
        # length difference 1, mismatch at index 1
        assert suite_distance(TestSuite.of([[A, B, C]]), TestSuite.of([[A, X]])) == 2

    def test_empty_against_twenty(self):
        t1 = TestSuite.of([[]])
        t2 = TestSuite.of([[3] * 20])
        assert suite_distance(t1, t2) == 20

    def test_mismatched_suite_size(self):
        with pytest.raises(ValueError):
            suite_distance(TestSuite.of([[A]]), TestSuite.of([[A], [B]]))

    def test_config_suite_size_checked(self):
        with pytest.raises(ValueError):
            suite_distance(TestSuite.of([[A]]), TestSuite.of([[A]]), GenotypeConfig(suite_max=2))

    @pytest.mark.parametrize("seed", range(200))
    def test_matches_naive_transcription(self, seed):
        rng = random.Random(seed)
        m = rng.randint(1, 2)
        t1 = random_small_suite(rng, m, 5, 3)
        t2 = random_small_suite(rng, m, 5, 3)
        assert suite_distance(t1, t2) == naive_distance(t1, t2, m, 5)

    @given(suites(), suites())
    def test_symmetry(self, t1, t2):
        assert suite_distance(t1, t2) == suite_distance(t2, t1)

    @given(suites(), suites())
    def test_identity_iff_equal(self, t1, t2):
        assert (suite_distance(t1, t2) == 0) == (t1 == t2)
        assert suite_distance(t1, t2) >= 0

    @given(suites(max_len=5), suites(max_len=5))
    def test_upper_bound(self, t1, t2):
        cfg = GenotypeConfig(suite_max=2, seq_min=1, seq_max=5, alphabet_size=3)
        assert suite_distance(t1, t2) <= max_possible_distance(cfg)

    @settings(max_examples=300)
    @given(suites(), suites(), suites())
    def test_triangle_inequality_empirical(self, t1, t2, t3):
        # not a stated property of the metric; checked empirically (it is a
        # Hamming distance over sequences padded with an "absent" symbol)
        assert suite_distance(t1, t3) <= suite_distance(t1, t2) + suite_distance(t2, t3)


@pytest.mark.parametrize(
    "suite_max,seq_max,expected", [(5, 500, 2500), (1, 1, 1), (3, 10, 30)]
)
def test_max_possible_distance(suite_max, seq_max, expected):
    cfg = GenotypeConfig(suite_max=suite_max, seq_min=1, seq_max=seq_max)
    assert max_possible_distance(cfg) == expected


def test_default_config_bound_is_2500(cfg):
    assert max_possible_distance(cfg) == 2500


@pytest.mark.parametrize("seed", range(10))
def test_pairwise_matrix_matches_scalar(seed):
    rng = random.Random(seed)
    pool = [random_small_suite(rng, 3, 12, 4) for _ in range(9)]
    d = pairwise_distances(pool)
    for i in range(len(pool)):
        for j in range(len(pool)):
            assert d[i, j] == suite_distance(pool[i], pool[j])
    assert np.array_equal(d, d.T)


class TestRandomSuite:
    def test_shape(self, cfg):
        t = random_suite(cfg, random.Random(0))
        assert len(t) == 5
        assert all(20 <= n <= 500 for n in t.lengths)
        assert t.conforms(cfg)

    def test_deterministic(self, cfg):
        assert random_suite(cfg, random.Random(7)) == random_suite(cfg, random.Random(7))

    def test_distinct_seeds_differ(self):
        cfg = GenotypeConfig(alphabet_size=2)
        for s in range(100):
            a = random_suite(cfg, random.Random(2 * s))
            b = random_suite(cfg, random.Random(2 * s + 1))
            assert suite_distance(a, b) > 0


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(suite_max=0), dict(seq_min=0), dict(seq_min=10, seq_max=5), dict(alphabet_size=0)],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            GenotypeConfig(**kwargs)


def test_text_round_trip(cfg):
    rng = random.Random(3)
    pool = [random_suite(cfg, rng) for _ in range(4)] + [TestSuite.of([[], [1, 2]] + [[0]] * 3)]
    text = dumps_suites(pool)
    assert text.endswith("\n")
    assert loads_suites(text) == pool


def test_text_format_layout():
    text = dumps_suites([TestSuite.of([[1, 2], [3]]), TestSuite.of([[4], [5, 6]])])
    assert text == "1 2\n3\n\n4\n5 6\n"
