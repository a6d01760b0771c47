import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from suitediv.genotype import GenotypeConfig, TestSuite  # noqa: E402
from suitediv.sut import EvaluatedIndividual, FitnessVector  # noqa: E402


@pytest.fixture
def cfg() -> GenotypeConfig:
    return GenotypeConfig()


@pytest.fixture
def small_cfg() -> GenotypeConfig:
    return GenotypeConfig(suite_max=3, seq_min=2, seq_max=8, alphabet_size=4)


def make_ind(crashes, coverage, length, suite=None) -> EvaluatedIndividual:
    suite = suite or TestSuite(((0,),))
    return EvaluatedIndividual(suite, FitnessVector(crashes, coverage, length))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
