"""Test-suite genotype: representation, genotypic distance, random construction.

A test suite is a fixed-size ordered list of event sequences, and an event is
an opaque non-negative integer token. Suites are immutable so they can be
shared freely between populations, archives and worker threads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GenotypeConfig",
    "TestSuite",
    "suite_distance",
    "max_possible_distance",
    "pairwise_distances",
    "random_suite",
    "dumps_suites",
    "loads_suites",
]


@dataclass(frozen=True)
class GenotypeConfig:
    """Representation parameters shared by every individual of a run."""

    suite_max: int = 5
    seq_min: int = 20
    seq_max: int = 500
    alphabet_size: int = 24
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.suite_max < 1:
            raise ValueError(f"suite_max must be >= 1, got {self.suite_max}")
        if not 0 < self.seq_min <= self.seq_max:
            raise ValueError(
                f"need 0 < seq_min <= seq_max, got seq_min={self.seq_min}, seq_max={self.seq_max}"
            )
        if self.alphabet_size < 1:
            raise ValueError(f"alphabet_size must be >= 1, got {self.alphabet_size}")


@dataclass(frozen=True, eq=True)
class TestSuite:
    """An individual: ``sequences[i]`` is the i-th event sequence."""

    __test__ = False  # not a pytest class

    sequences: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, sequences: Iterable[Iterable[int]]) -> "TestSuite":
        return cls(tuple(tuple(int(e) for e in s) for s in sequences))

    def __len__(self) -> int:
        return len(self.sequences)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.sequences[i]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sequences)

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(np.asarray(s, dtype=np.int32) for s in self.sequences)

    def conforms(self, cfg: GenotypeConfig) -> bool:
        """True if the suite satisfies every construction-time invariant of ``cfg``."""
        if len(self.sequences) != cfg.suite_max:
            return False
        for s in self.sequences:
            if not cfg.seq_min <= len(s) <= cfg.seq_max:
                return False
            if any(e < 0 or e >= cfg.alphabet_size for e in s):
                return False
        return True


def _sequence_distance(a: Sequence[int], b: Sequence[int]) -> int:
    mismatches = sum(1 for x, y in zip(a, b) if x != y)
    return abs(len(a) - len(b)) + mismatches


def suite_distance(t1: TestSuite, t2: TestSuite, cfg: GenotypeConfig | None = None) -> int:
    """Genotypic distance between two suites.

    Sequences are paired by index. Each pair contributes the difference of
    their lengths plus one for every index, within the shorter length, where
    the events differ.

    Raises:
        ValueError: if the suites hold different numbers of sequences, or
            disagree with ``cfg.suite_max`` when a config is given.
    """
    if len(t1) != len(t2):
        raise ValueError(f"suite size mismatch: {len(t1)} vs {len(t2)}")
    if cfg is not None and len(t1) != cfg.suite_max:
        raise ValueError(f"suites have {len(t1)} sequences, config expects {cfg.suite_max}")
    return sum(_sequence_distance(a, b) for a, b in zip(t1.sequences, t2.sequences))


def max_possible_distance(cfg: GenotypeConfig) -> int:
    return cfg.suite_max * cfg.seq_max


def pairwise_distances(suites: Sequence[TestSuite]) -> np.ndarray:
    """Symmetric ``(n, n)`` int64 matrix of :func:`suite_distance` values.

    Vectorised equivalent of calling :func:`suite_distance` on every pair.
    Sequences are padded with ``-1`` so that positions beyond a sequence's end
    never count as mismatches (the length term accounts for them).
    """
    n = len(suites)
    out = np.zeros((n, n), dtype=np.int64)
    if n < 2:
        return out
    m = len(suites[0])
    if any(len(t) != m for t in suites):
        raise ValueError("all suites must hold the same number of sequences")
    width = max((len(s) for t in suites for s in t.sequences), default=0)
    packed = np.full((n, m, max(width, 1)), -1, dtype=np.int32)
    lengths = np.zeros((n, m), dtype=np.int64)
    for i, t in enumerate(suites):
        for k, arr in enumerate(t._arrays):
            packed[i, k, : arr.size] = arr
            lengths[i, k] = arr.size
    valid = packed >= 0
    for i in range(n - 1):
        rest = packed[i + 1 :]
        diff = (rest != packed[i]) & valid[i + 1 :] & valid[i]
        mism = diff.sum(axis=(1, 2))
        lend = np.abs(lengths[i + 1 :] - lengths[i]).sum(axis=1)
        out[i, i + 1 :] = mism + lend
        out[i + 1 :, i] = mism + lend
    return out


def random_suite(cfg: GenotypeConfig, rng: random.Random) -> TestSuite:
    """Uniform random suite: lengths in ``[seq_min, seq_max]``, events uniform over the alphabet."""
    alphabet = range(cfg.alphabet_size)
    sequences = []
    for _ in range(cfg.suite_max):
        n = rng.randint(cfg.seq_min, cfg.seq_max)
        sequences.append(tuple(rng.choices(alphabet, k=n)))
    return TestSuite(tuple(sequences))


# -- text serialisation -----------------------------------------------------
# One sequence per line as space-separated decimal event ids; suites are
# separated by a blank line. An empty sequence is written as a lone "-".


def dumps_suites(suites: Iterable[TestSuite]) -> str:
    blocks = []
    for t in suites:
        lines = [" ".join(map(str, s)) if s else "-" for s in t.sequences]
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def loads_suites(text: str) -> list[TestSuite]:
    suites: list[TestSuite] = []
    current: list[tuple[int, ...]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            if current:
                suites.append(TestSuite(tuple(current)))
                current = []
            continue
        if line == "-":
            current.append(())
        else:
            current.append(tuple(int(tok) for tok in line.split()))
    if current:
        suites.append(TestSuite(tuple(current)))
    return suites
