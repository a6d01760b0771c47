"""Experiment orchestration and artifact emission.

Every artifact is written deterministically: CSVs have a fixed header, use
``\\n`` line endings and a fixed decimal format; JSON is key-sorted. Rerunning
an experiment with the same spec therefore reproduces its files byte for
byte. Wall-clock time is only written when explicitly requested.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

from .engine import EngineConfig, Mechanisms, RunState, run
from .genotype import GenotypeConfig, dumps_suites
from .landscape import SNAPSHOT_COLUMNS, GenerationSnapshot
from .stats import SampleGroup, compare
from .sut import AppModel, generate_app_model, load_app, save_app
from .variation import VariationConfig

__all__ = [
    "AppSpec",
    "ExperimentSpec",
    "derive_seed",
    "engine_config_to_dict",
    "engine_config_from_dict",
    "run_summary",
    "write_run",
    "run_landscape_campaign",
    "run_comparison",
    "snapshot_csv",
    "COMPARISON_COLUMNS",
    "COMPARISON_METRICS",
]

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = ("model", "metric", "a12", "effect", "h", "p", "significant")
COMPARISON_METRICS = ("coverage", "crashes", "length", "time")


@dataclass(frozen=True)
class AppSpec:
    """Parameters of a generated app model, or the path of a pinned one."""

    model_seed: int = 4
    activity_count: int = 8
    statements_per_activity: int = 20
    alphabet_size: int = 20
    crash_density: float = 0.005
    statement_fraction: float = 0.3
    path: str | None = None

    def build(self) -> AppModel:
        if self.path is not None:
            return load_app(self.path)
        return generate_app_model(
            self.model_seed,
            self.activity_count,
            self.statements_per_activity,
            self.alphabet_size,
            self.crash_density,
            self.statement_fraction,
        )


@dataclass(frozen=True)
class ExperimentSpec:
    app: AppSpec = field(default_factory=AppSpec)
    baseline: EngineConfig = field(default_factory=EngineConfig)
    treatment: EngineConfig = field(default_factory=lambda: EngineConfig(mechanisms=Mechanisms.all()))
    repetitions: int = 5
    out_dir: str = "out"
    master_seed: int = 0
    model_id: str = "synthetic"
    jobs: int = 1
    record_wall_time: bool = False

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.baseline.genotype != self.treatment.genotype:
            raise ValueError("both arms must share one genotype configuration")


def derive_seed(master: int, repetition: int) -> int:
    """64-bit run seed; a pure function of the master seed and repetition index."""
    digest = hashlib.sha256(f"{master}:{repetition}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# -- (de)serialisation of configs ----------------------------------------------


def engine_config_to_dict(cfg: EngineConfig) -> dict[str, Any]:
    return asdict(cfg)


def engine_config_from_dict(data: dict[str, Any]) -> EngineConfig:
    data = dict(data)
    data["vcfg"] = VariationConfig(**data["vcfg"])
    data["mechanisms"] = Mechanisms(**data["mechanisms"])
    data["genotype"] = GenotypeConfig(**data["genotype"])
    return EngineConfig(**data)


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.6f}"
    return str(v)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([c if isinstance(c, str) else _fmt(c) for c in r])
    return buf.getvalue()


def snapshot_csv(snapshots: Sequence[GenerationSnapshot], branches: Sequence[str] | None = None) -> str:
    header = list(SNAPSHOT_COLUMNS) + (["branch"] if branches is not None else [])
    rows = []
    for i, s in enumerate(snapshots):
        row = s.as_row()
        if branches is not None:
            row.append(branches[i])
        rows.append(row)
    return _csv_text(header, rows)


# -- single runs -----------------------------------------------------------------


def run_summary(state: RunState, cfg: EngineConfig, wall_time: float | None = None) -> dict[str, Any]:
    """Final coverage, distinct crashes, minimal revealing lengths and cost of one run."""
    minimal = {str(cid): rep.revealing_prefix_length for cid, rep in sorted(state.crash_log.items())}
    out: dict[str, Any] = {
        "seed": cfg.rng_seed,
        "mechanisms": cfg.mechanisms.label(),
        "generations": state.generation,
        "evaluations": state.evaluations,
        "coverage": max((a.fitness.coverage for a in state.archive), default=0.0),
        "coverage_percent": 100.0 * max((a.fitness.coverage for a in state.archive), default=0.0),
        "crashes": len(state.crash_log),
        "crash_ids": sorted(state.crash_log),
        "total_crashes": state.crash_events,
        "minimal_lengths": minimal,
        "length": statistics.fmean(minimal.values()) if minimal else None,
        "time": state.executed_events,
        "archive_size": len(state.archive),
        "restarts": sum(1 for r in state.records if r.branch == "restart"),
    }
    if wall_time is not None:
        out["wall_time_s"] = wall_time
    return out


def write_run(state: RunState, cfg: EngineConfig, app: AppModel, out: Path,
              wall_time: float | None = None) -> dict[str, Any]:
    out.mkdir(parents=True, exist_ok=True)
    (out / "snapshots.csv").write_text(
        snapshot_csv(state.snapshots, [r.branch for r in state.records]), encoding="utf-8"
    )
    (out / "pareto_front.txt").write_text(dumps_suites(a.suite for a in state.archive), encoding="utf-8")
    (out / "population.txt").write_text(dumps_suites(p.suite for p in state.population), encoding="utf-8")
    (out / "config.json").write_text(_dump_json(engine_config_to_dict(cfg)), encoding="utf-8")
    save_app(app, out / "app.json")
    summary = run_summary(state, cfg, wall_time)
    (out / "summary.json").write_text(_dump_json(summary), encoding="utf-8")
    return summary


def _execute(args: tuple[EngineConfig, AppModel, str, bool]) -> dict[str, Any]:
    cfg, app, out, record_wall = args
    t0 = time.perf_counter()
    state = run(cfg, app)
    wall = time.perf_counter() - t0
    logger.info("run seed=%d mechanisms=%s done in %.1fs", cfg.rng_seed, cfg.mechanisms.label(), wall)
    return write_run(state, cfg, app, Path(out), wall if record_wall else None)


def _execute_all(tasks: list[tuple[EngineConfig, AppModel, str, bool]], jobs: int) -> list[dict[str, Any]]:
    if jobs <= 1:
        return [_execute(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_execute, tasks))


# -- campaigns -------------------------------------------------------------------


def run_landscape_campaign(spec: ExperimentSpec, cfg: EngineConfig | None = None) -> Path:
    """Repeat one engine configuration and average every metric per generation.

    Writes ``rep_XX/`` run directories and ``mean.csv`` into ``spec.out_dir``.
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    app = spec.app.build()
    cfg = _fit_alphabet(spec.baseline if cfg is None else cfg, app)
    tasks = [
        (cfg.with_seed(derive_seed(spec.master_seed, r)), app, str(out / f"rep_{r:02d}"), spec.record_wall_time)
        for r in range(spec.repetitions)
    ]
    _execute_all(tasks, spec.jobs)

    runs = [_read_snapshots(Path(t[2]) / "snapshots.csv") for t in tasks]
    rows = []
    for g in range(len(runs[0])):
        cells: list[Any] = [g]
        for col in SNAPSHOT_COLUMNS[1:]:
            cells.append(statistics.fmean(float(r[g][col]) for r in runs))
        rows.append(cells)
    (out / "mean.csv").write_text(_csv_text(SNAPSHOT_COLUMNS, rows), encoding="utf-8")
    return out


def _fit_alphabet(cfg: EngineConfig, app: AppModel) -> EngineConfig:
    """``cfg`` with its genotype alphabet set to the app's event alphabet."""
    if cfg.genotype.alphabet_size == app.alphabet_size:
        return cfg
    return replace(cfg, genotype=replace(cfg.genotype, alphabet_size=app.alphabet_size))


def _read_snapshots(path: Path) -> list[dict[str, str]]:
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_comparison(spec: ExperimentSpec) -> Path:
    """Run baseline and treatment arms on paired seeds and compare them.

    Repetition ``r`` of both arms uses the same derived seed. Writes
    ``baseline/rep_XX``, ``treatment/rep_XX`` and ``comparison.csv``.
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    app = spec.app.build()
    save_app(app, out / "app.json")
    tasks = []
    for arm, cfg in (("baseline", spec.baseline), ("treatment", spec.treatment)):
        cfg = _fit_alphabet(cfg, app)
        for r in range(spec.repetitions):
            seed = derive_seed(spec.master_seed, r)
            tasks.append((cfg.with_seed(seed), app, str(out / arm / f"rep_{r:02d}"), spec.record_wall_time))
    summaries = _execute_all(tasks, spec.jobs)
    base, treat = summaries[: spec.repetitions], summaries[spec.repetitions :]

    rows = []
    for metric in COMPARISON_METRICS:
        t_vals = [s[metric] for s in treat if s[metric] is not None]
        b_vals = [s[metric] for s in base if s[metric] is not None]
        if not t_vals or not b_vals:
            rows.append([spec.model_id, metric, math.nan, "n/a", math.nan, math.nan, False])
            continue
        res = compare(metric, SampleGroup.of("treatment", t_vals), SampleGroup.of("baseline", b_vals))
        rows.append([spec.model_id, metric, res.a12, res.effect_label, res.kw_h, res.p_value, res.significant])
    (out / "comparison.csv").write_text(_csv_text(COMPARISON_COLUMNS, rows), encoding="utf-8")
    return out


def spec_with(spec: ExperimentSpec, **changes: Any) -> ExperimentSpec:
    return replace(spec, **changes)
