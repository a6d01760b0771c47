"""Seeded synthetic app-under-test.

The model is a graph of activities. In every activity each event either moves
to another activity or does nothing, may trigger a crash, and executes a
fixed subset of the activity's statements. Evaluating a test suite runs every
sequence from the launch activity (index 0) and reports the objective triple.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .genotype import TestSuite

__all__ = [
    "AppModel",
    "FitnessVector",
    "CrashReport",
    "Evaluation",
    "EvaluatedIndividual",
    "generate_app_model",
    "evaluate",
    "app_to_json",
    "app_from_json",
    "save_app",
    "load_app",
]

APP_FORMAT = "suitediv-app"
APP_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FitnessVector:
    """Objective triple: crashes and coverage are maximised, length minimised."""

    crashes: int
    coverage: float
    length: float

    def as_tuple(self) -> tuple[int, float, float]:
        return (self.crashes, self.coverage, self.length)


@dataclass(frozen=True)
class CrashReport:
    crash_id: int
    revealing_prefix_length: int
    suite_index: int
    sequence_index: int


@dataclass(frozen=True)
class Evaluation:
    fitness: FitnessVector
    crashes: tuple[CrashReport, ...]
    executed_events: int


@dataclass(frozen=True)
class AppModel:
    """Immutable synthetic app.

    ``transitions[a][e]`` is the target activity or ``-1`` for a no-op,
    ``crash_ids[a][e]`` is a positive crash id or ``0``, and
    ``statements[a][e]`` lists the global statement indices executed by
    event ``e`` in activity ``a``.
    """

    activity_count: int
    statements_per_activity: int
    alphabet_size: int
    transitions: tuple[tuple[int, ...], ...]
    crash_ids: tuple[tuple[int, ...], ...]
    statements: tuple[tuple[tuple[int, ...], ...], ...]
    model_seed: int = 0
    crash_density: float = 0.0

    def __post_init__(self) -> None:
        if len(self.transitions) != self.activity_count:
            raise ValueError("transition table has wrong number of activities")
        seen: set[int] = set()
        for a in range(self.activity_count):
            if len(self.transitions[a]) != self.alphabet_size:
                raise ValueError(f"transition row {a} has wrong width")
            if len(self.crash_ids[a]) != self.alphabet_size:
                raise ValueError(f"crash row {a} has wrong width")
            for e in range(self.alphabet_size):
                t = self.transitions[a][e]
                if t != -1 and not 0 <= t < self.activity_count:
                    raise ValueError(f"transition ({a}, {e}) -> {t} out of range")
                c = self.crash_ids[a][e]
                if c < 0:
                    raise ValueError(f"crash id must be positive, got {c}")
                if c:
                    if c in seen:
                        raise ValueError(f"crash id {c} used twice")
                    seen.add(c)
                lo = a * self.statements_per_activity
                hi = lo + self.statements_per_activity
                if any(not lo <= s < hi for s in self.statements[a][e]):
                    raise ValueError(f"statement outside activity {a} at event {e}")
        # bitmask per (activity, event), built once
        masks = tuple(
            tuple(sum(1 << s for s in set(self.statements[a][e])) for e in range(self.alphabet_size))
            for a in range(self.activity_count)
        )
        object.__setattr__(self, "_masks", masks)

    @property
    def total_statements(self) -> int:
        return self.activity_count * self.statements_per_activity

    @property
    def crash_table(self) -> dict[tuple[int, int], int]:
        return {
            (a, e): c
            for a, row in enumerate(self.crash_ids)
            for e, c in enumerate(row)
            if c
        }

    @property
    def transition_table(self) -> dict[tuple[int, int], int]:
        return {
            (a, e): t
            for a, row in enumerate(self.transitions)
            for e, t in enumerate(row)
            if t != -1
        }


def generate_app_model(
    model_seed: int,
    activity_count: int = 12,
    statements_per_activity: int = 40,
    alphabet_size: int = 24,
    crash_density: float = 0.01,
    statement_fraction: float = 0.15,
) -> AppModel:
    """Build a pseudo-random app model, fully determined by ``model_seed``.

    Each (activity, event) pair moves to a uniformly random activity with
    probability 0.5 (else it is a no-op), crashes with probability
    ``crash_density``, and executes each of the activity's statements
    independently with probability ``statement_fraction``.
    """
    if min(activity_count, statements_per_activity, alphabet_size) < 1:
        raise ValueError("activity_count, statements_per_activity and alphabet_size must be >= 1")
    if not 0.0 <= crash_density <= 1.0:
        raise ValueError(f"crash_density must be in [0, 1], got {crash_density}")
    if not 0.0 <= statement_fraction <= 1.0:
        raise ValueError(f"statement_fraction must be in [0, 1], got {statement_fraction}")

    rng = random.Random(model_seed)
    transitions = []
    crash_ids = []
    statements = []
    next_crash = 1
    for a in range(activity_count):
        t_row, c_row, s_row = [], [], []
        base = a * statements_per_activity
        for _ in range(alphabet_size):
            t_row.append(rng.randrange(activity_count) if rng.random() < 0.5 else -1)
            if rng.random() < crash_density:
                c_row.append(next_crash)
                next_crash += 1
            else:
                c_row.append(0)
            s_row.append(
                tuple(base + s for s in range(statements_per_activity) if rng.random() < statement_fraction)
            )
        transitions.append(tuple(t_row))
        crash_ids.append(tuple(c_row))
        statements.append(tuple(s_row))
    return AppModel(
        activity_count=activity_count,
        statements_per_activity=statements_per_activity,
        alphabet_size=alphabet_size,
        transitions=tuple(transitions),
        crash_ids=tuple(crash_ids),
        statements=tuple(statements),
        model_seed=model_seed,
        crash_density=crash_density,
    )


def evaluate(suite: TestSuite, app: AppModel, suite_index: int = 0) -> Evaluation:
    """Run ``suite`` against ``app``.

    Every sequence starts in activity 0. An event first executes its
    statements, then, if it is a crash trigger, ends that sequence (the
    crashing event counts as executed); otherwise the app follows the
    transition. Other sequences of the suite are unaffected by a crash.

    Raises:
        ValueError: if an event id is outside the app's alphabet.
    """
    transitions = app.transitions
    crash_ids = app.crash_ids
    masks = app._masks  # type: ignore[attr-defined]
    alphabet = app.alphabet_size

    covered = 0
    found: set[int] = set()
    reports: list[CrashReport] = []
    executed_total = 0
    for k, seq in enumerate(suite.sequences):
        activity = 0
        executed = 0
        for e in seq:
            if not 0 <= e < alphabet:
                raise ValueError(f"event {e} outside alphabet of size {alphabet}")
            executed += 1
            covered |= masks[activity][e]
            crash = crash_ids[activity][e]
            if crash:
                found.add(crash)
                reports.append(CrashReport(crash, executed, suite_index, k))
                break
            target = transitions[activity][e]
            if target != -1:
                activity = target
        executed_total += executed

    n = len(suite.sequences)
    fitness = FitnessVector(
        crashes=len(found),
        coverage=covered.bit_count() / app.total_statements,
        length=executed_total / n if n else 0.0,
    )
    return Evaluation(fitness, tuple(reports), executed_total)


# -- JSON form ----------------------------------------------------------------


def app_to_json(app: AppModel) -> dict[str, Any]:
    return {
        "format": APP_FORMAT,
        "version": APP_FORMAT_VERSION,
        "model_seed": app.model_seed,
        "activity_count": app.activity_count,
        "statements_per_activity": app.statements_per_activity,
        "alphabet_size": app.alphabet_size,
        "crash_density": app.crash_density,
        "transitions": [list(r) for r in app.transitions],
        "crash_ids": [list(r) for r in app.crash_ids],
        "statements": [[list(s) for s in row] for row in app.statements],
    }


def app_from_json(data: dict[str, Any]) -> AppModel:
    if data.get("format") != APP_FORMAT:
        raise ValueError(f"not an app model file (format={data.get('format')!r})")
    if data.get("version") != APP_FORMAT_VERSION:
        raise ValueError(f"unsupported app model version {data.get('version')!r}")
    return AppModel(
        activity_count=int(data["activity_count"]),
        statements_per_activity=int(data["statements_per_activity"]),
        alphabet_size=int(data["alphabet_size"]),
        transitions=tuple(tuple(int(x) for x in r) for r in data["transitions"]),
        crash_ids=tuple(tuple(int(x) for x in r) for r in data["crash_ids"]),
        statements=tuple(tuple(tuple(int(x) for x in s) for s in row) for row in data["statements"]),
        model_seed=int(data.get("model_seed", 0)),
        crash_density=float(data.get("crash_density", 0.0)),
    )


def save_app(app: AppModel, path: str | Path) -> None:
    text = json.dumps(app_to_json(app), separators=(",", ":"), sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_app(path: str | Path) -> AppModel:
    return app_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class EvaluatedIndividual:
    """A suite paired with the fitness ``evaluate`` produced for it."""

    suite: TestSuite
    fitness: FitnessVector
