"""Command-line front end: ``evcp generate | solve | tune | bench``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .annealer import AnnealConfig
from .bench import SuiteError, load_suite, paper_suite, parse_grid, run_bench, suite_entries, write_bench
from .genetic import GaConfig
from .hybrid import METHODS, SEEDED_GENERATIONS, result_to_dict, solve
from .instance import InstanceSpec, generate_instance, load_instance, save_instance
from .plotting import placement_svg, write_svg
from .qubo import LambdaParams, QuboConfig, build_qubo, dump_qubo
from .instance import candidate_sites
from .tuner import TunerConfig, tune

log = logging.getLogger("evcp")


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def _grid(text: str) -> tuple[int, int]:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _lambdas(text: str) -> LambdaParams:
    try:
        return LambdaParams.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def read_lambdas_file(path: str | Path) -> LambdaParams:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return LambdaParams(*(float(data[k]) for k in ("l1", "l2", "l3", "l4")))
    except KeyError as exc:
        raise ValueError(f"{path}: missing field {exc}") from None


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--entropy", type=_on_off, default=True, metavar="on|off",
                   help="entropy variant of the POI term (default on)")
    p.add_argument("--temperature", type=float, default=1.0, help="softmax temperature")
    p.add_argument("--entropy-sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--reads", type=int, default=AnnealConfig.num_reads, help="annealer reads")
    p.add_argument("--sweeps", type=int, default=AnnealConfig.sweeps_per_read,
                   help="annealer sweeps per read")
    p.add_argument("--seed", type=int, default=0)


def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--population", type=int, default=GaConfig.population_size)
    p.add_argument("--generations", type=int, default=GaConfig.generations,
                   help="GA generations when randomly seeded")
    p.add_argument("--seeded-generations", type=int, default=SEEDED_GENERATIONS,
                   help="GA generations when seeded by the annealer")


def _qubo_cfg(a) -> QuboConfig:
    return QuboConfig(a.entropy, a.temperature, a.entropy_sign)


def _anneal_cfg(a) -> AnnealConfig:
    return AnnealConfig(num_reads=a.reads, sweeps_per_read=a.sweeps)


def _ga_cfg(a) -> GaConfig:
    return GaConfig(population_size=a.population, generations=a.generations)


def cmd_generate(a) -> int:
    w, h = a.grid
    inst = generate_instance(InstanceSpec(w, h, a.pois, a.old, a.new, a.seed))
    save_instance(inst, a.out)
    print(f"wrote {inst.label} to {a.out}")
    return 0


def cmd_solve(a) -> int:
    inst = load_instance(a.instance)
    lam = read_lambdas_file(a.lambdas_file) if a.lambdas_file else a.lambdas
    qcfg = _qubo_cfg(a)
    if a.qubo_dump:
        dump_qubo(build_qubo(inst, candidate_sites(inst), lam, qcfg), a.qubo_dump)
    res = solve(
        inst, a.method, lam, qcfg, _anneal_cfg(a), _ga_cfg(a),
        runs=a.runs, seed=a.seed, seeded_generations=a.seeded_generations,
    )
    write_json(result_to_dict(res, lam, with_times=a.record_times), a.out)
    score = f"score of {round(res.report.combined, 2)}"
    if a.plot:
        write_svg(placement_svg(inst, res.placement, f"{inst.label} {a.method}: {score}"), a.plot)
    if a.history and res.ga_history is not None:
        res.ga_history.save(a.history)
    print(f"{inst.label} {a.method}: {score}")
    return 0


def cmd_tune(a) -> int:
    inst = load_instance(a.instance)
    cfg = TunerConfig(
        budget=a.budget, method=a.method, runs_per_eval=a.runs_per_eval, rng_seed=a.seed,
        bounds=((a.low, a.high),) * 4,
    )
    res = tune(inst, cfg, _anneal_cfg(a), _qubo_cfg(a))
    l1, l2, l3, l4 = res.best.as_tuple()
    write_json({"l1": l1, "l2": l2, "l3": l3, "l4": l4, "score": res.best_score}, a.out)
    res.save_trace(a.trace or f"{a.out}.trace")
    print(f"best lambdas {l1:.6g},{l2:.6g},{l3:.6g},{l4:.6g} score {res.best_score:.4f}")
    return 0


def cmd_bench(a) -> int:
    if a.suite == "paper":
        entries = suite_entries(paper_suite(a.seed))
    else:
        entries = load_suite(a.suite)
    tcfg = TunerConfig(method=a.tune_method, runs_per_eval=a.tune_runs)
    tune_anneal = AnnealConfig(num_reads=a.tune_reads or a.reads, sweeps_per_read=a.tune_sweeps or a.sweeps)
    rows = run_bench(
        entries, seed=a.seed, runs=a.runs, lambdas=a.lambdas,
        qubo_cfg=_qubo_cfg(a), anneal_cfg=_anneal_cfg(a), ga_cfg=_ga_cfg(a),
        seeded_generations=a.seeded_generations,
        tune_budget=a.tune_budget, tune_cfg=tcfg, tune_anneal_cfg=tune_anneal,
    )
    summary = write_bench(rows, a.out_dir, record_times=a.record_times)
    print(Path(a.out_dir, "summary.txt").read_text(encoding="utf-8"), end="")
    return 1 if summary["failed"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evcp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random EVCP(n,o,c) instance")
    p.add_argument("--grid", type=_grid, required=True, metavar="WxH")
    p.add_argument("--pois", type=int, required=True)
    p.add_argument("--old", type=int, required=True)
    p.add_argument("--new", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve an instance with qa, ga or hybrid")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--runs", type=int, default=5)
    lam = p.add_mutually_exclusive_group()
    lam.add_argument("--lambdas", type=_lambdas, default=LambdaParams(), metavar="l1,l2,l3,l4")
    lam.add_argument("--lambdas-file", help="JSON written by `evcp tune`")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="SVG placement plot")
    p.add_argument("--history", help="two-column best-fitness history of the best run")
    p.add_argument("--qubo-dump", help="write the QUBO as 'i j q_ij' lines")
    p.add_argument("--record-times", action="store_true",
                   help="include wall times in the result file (not reproducible)")
    _add_model_flags(p)
    _add_ga_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tune", help="search QUBO multipliers for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--method", choices=("random", "bayes"), default="random")
    p.add_argument("--runs-per-eval", type=int, default=1)
    p.add_argument("--low", type=float, default=1e-3)
    p.add_argument("--high", type=float, default=1e3)
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="trace rows 'l1 l2 l3 l4 score' (default OUT.trace)")
    _add_model_flags(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("bench", help="compare qa, ga and hybrid over a suite")
    p.add_argument("--suite", required=True, help="suite JSON file, or 'paper' for the built-in shapes")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--lambdas", type=_lambdas, default=None, metavar="l1,l2,l3,l4")
    p.add_argument("--tune-budget", type=int, default=0)
    p.add_argument("--tune-method", choices=("random", "bayes"), default="random")
    p.add_argument("--tune-runs", type=int, default=1)
    p.add_argument("--tune-reads", type=int, default=None)
    p.add_argument("--tune-sweeps", type=int, default=None)
    p.add_argument("--record-times", action="store_true", help="also write timings.csv")
    _add_model_flags(p)
    _add_ga_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if a.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return a.func(a)
    except (ValueError, OSError, SuiteError) as exc:
        print(f"evcp {a.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
