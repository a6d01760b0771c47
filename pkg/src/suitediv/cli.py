"""Command-line interface: ``suitediv {gen-app,run,landscape,compare,metrics}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Sequence

from .engine import EngineConfig, Mechanisms, run
from .genotype import GenotypeConfig, loads_suites
from .harness import (
    AppSpec,
    ExperimentSpec,
    engine_config_from_dict,
    run_comparison,
    run_landscape_campaign,
    snapshot_csv,
    write_run,
)
from .landscape import snapshot
from .sut import EvaluatedIndividual, evaluate, load_app, save_app
from .variation import VariationConfig

EXIT_INVALID = 2


def _app_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("app model")
    g.add_argument("--app", help="pinned app model JSON (overrides the generator flags)")
    g.add_argument("--app-seed", type=int, default=AppSpec.model_seed)
    g.add_argument("--activities", type=int, default=AppSpec.activity_count)
    g.add_argument("--statements", type=int, default=AppSpec.statements_per_activity)
    g.add_argument("--alphabet", type=int, default=AppSpec.alphabet_size)
    g.add_argument("--crash-density", type=float, default=AppSpec.crash_density)
    g.add_argument("--statement-fraction", type=float, default=AppSpec.statement_fraction)


def _genotype_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("genotype")
    g.add_argument("--suite-size", type=int, default=5)
    g.add_argument("--seq-min", type=int, default=20)
    g.add_argument("--seq-max", type=int, default=500)


def _engine_args(p: argparse.ArgumentParser, generations: int, mechanisms: str) -> None:
    g = p.add_argument_group("engine")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--generations", type=int, default=generations)
    g.add_argument("--pop-size", type=int, default=50)
    g.add_argument("--offspring-size", type=int, default=50)
    g.add_argument("--crossover-prob", type=float, default=0.7)
    g.add_argument("--mutation-prob", type=float, default=0.3)
    g.add_argument("--size-init", type=int, default=100)
    g.add_argument("--div-limit", type=float, default=0.5)
    g.add_argument("--n-div", type=int, default=15)
    g.add_argument("--k", type=int, default=300)
    g.add_argument("--mechanisms", default=mechanisms, help="all | none | comma list")
    g.add_argument("--exclude-singletons", action="store_true", help="nconnec ignores singleton clusters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="suitediv", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-app", help="write a pinned app model")
    _app_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="single engine run")
    _app_args(p)
    _genotype_args(p)
    _engine_args(p, generations=40, mechanisms="none")
    p.add_argument("--out", required=True)
    p.add_argument("--save-populations", action="store_true", help="archive every generation's population")
    p.add_argument("--record-wall-time", action="store_true")

    p = sub.add_parser("landscape", help="repeated runs, mean metrics per generation")
    _app_args(p)
    _genotype_args(p)
    _engine_args(p, generations=40, mechanisms="none")
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--record-wall-time", action="store_true")

    p = sub.add_parser("compare", help="baseline vs treatment with statistics")
    _app_args(p)
    _genotype_args(p)
    _engine_args(p, generations=10, mechanisms="all")
    p.add_argument("--baseline-mechanisms", default="none")
    p.add_argument("--repetitions", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--model-id", default="synthetic")
    p.add_argument("--out", required=True)
    p.add_argument("--record-wall-time", action="store_true")

    p = sub.add_parser("metrics", help="recompute a snapshot row from an archived population")
    p.add_argument("population", help="population file in suite text format")
    p.add_argument("--run-dir", required=True, help="run directory holding config.json and app.json")
    p.add_argument("--generation", type=int, default=None)
    p.add_argument("--out", help="write CSV here instead of stdout")
    return parser


def _app_spec(args: argparse.Namespace) -> AppSpec:
    return AppSpec(
        model_seed=args.app_seed,
        activity_count=args.activities,
        statements_per_activity=args.statements,
        alphabet_size=args.alphabet,
        crash_density=args.crash_density,
        statement_fraction=args.statement_fraction,
        path=args.app,
    )


def _engine_config(args: argparse.Namespace, alphabet: int, mechanisms: str | None = None) -> EngineConfig:
    genotype = GenotypeConfig(
        suite_max=args.suite_size, seq_min=args.seq_min, seq_max=args.seq_max, alphabet_size=alphabet
    )
    return EngineConfig(
        size_pop=args.pop_size,
        size_off=args.offspring_size,
        g_max=args.generations,
        vcfg=VariationConfig(args.crossover_prob, args.mutation_prob),
        size_init=args.size_init,
        div_limit=args.div_limit,
        n_div=args.n_div,
        mechanisms=Mechanisms.parse(args.mechanisms if mechanisms is None else mechanisms),
        rng_seed=args.seed,
        genotype=genotype,
        k=args.k,
        count_singletons=not args.exclude_singletons,
    )


def _cmd_gen_app(args: argparse.Namespace) -> None:
    app = _app_spec(args).build()
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_app(app, args.out)


def _cmd_run(args: argparse.Namespace) -> None:
    app = _app_spec(args).build()
    cfg = _engine_config(args, app.alphabet_size)
    t0 = time.perf_counter()
    state = run(cfg, app) if not args.save_populations else _run_archiving(cfg, app, Path(args.out))
    wall = time.perf_counter() - t0
    summary = write_run(state, cfg, app, Path(args.out), wall if args.record_wall_time else None)
    logging.getLogger(__name__).info("coverage=%.3f crashes=%d", summary["coverage"], summary["crashes"])


def _run_archiving(cfg: EngineConfig, app, out: Path):
    from .engine import initialize, step
    from .genotype import dumps_suites

    pops = out / "populations"
    pops.mkdir(parents=True, exist_ok=True)
    state = initialize(cfg, app)
    (pops / "gen_000.txt").write_text(dumps_suites(p.suite for p in state.population), encoding="utf-8")
    while state.generation < cfg.g_max:
        step(state, cfg, app)
        path = pops / f"gen_{state.generation:03d}.txt"
        path.write_text(dumps_suites(p.suite for p in state.population), encoding="utf-8")
    return state


def _experiment(args: argparse.Namespace, baseline: EngineConfig, treatment: EngineConfig) -> ExperimentSpec:
    return ExperimentSpec(
        app=_app_spec(args),
        baseline=baseline,
        treatment=treatment,
        repetitions=args.repetitions,
        out_dir=args.out,
        master_seed=args.seed,
        model_id=getattr(args, "model_id", "synthetic"),
        jobs=args.jobs,
        record_wall_time=args.record_wall_time,
    )


def _cmd_landscape(args: argparse.Namespace) -> None:
    app_spec = _app_spec(args)
    cfg = _engine_config(args, app_spec.build().alphabet_size)
    run_landscape_campaign(_experiment(args, cfg, cfg))


def _cmd_compare(args: argparse.Namespace) -> None:
    app_spec = _app_spec(args)
    alphabet = app_spec.build().alphabet_size
    baseline = _engine_config(args, alphabet, args.baseline_mechanisms)
    treatment = _engine_config(args, alphabet)
    run_comparison(_experiment(args, baseline, treatment))


def _cmd_metrics(args: argparse.Namespace) -> None:
    run_dir = Path(args.run_dir)
    cfg = engine_config_from_dict(json.loads((run_dir / "config.json").read_text(encoding="utf-8")))
    app = load_app(run_dir / "app.json")
    suites = loads_suites(Path(args.population).read_text(encoding="utf-8"))
    pop = [EvaluatedIndividual(s, evaluate(s, app).fitness) for s in suites]
    generation = cfg.g_max if args.generation is None else args.generation
    snap = snapshot(pop, cfg.genotype, cfg.k, generation=generation, count_singletons=cfg.count_singletons)
    text = snapshot_csv([snap])
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


COMMANDS = {
    "gen-app": _cmd_gen_app,
    "run": _cmd_run,
    "landscape": _cmd_landscape,
    "compare": _cmd_compare,
    "metrics": _cmd_metrics,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"suitediv: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
