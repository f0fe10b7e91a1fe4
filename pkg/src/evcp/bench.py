"""Three-way comparison (qa / ga / hybrid) over a suite of datasets.

A suite file is JSON: a list (or ``{"datasets": [...]}``) whose entries are
either a path to an instance file, relative to the suite file, or a
generation spec ``{"grid": "15x20", "pois": 5, "old": 2, "new": 3,
"seed": 7}``. Entries may carry ``"lambdas": "l1,l2,l3,l4"``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .annealer import AnnealConfig
from .genetic import GaConfig
from .hybrid import SEEDED_GENERATIONS, SolveResult, result_to_dict, solve
from .instance import GridInstance, InstanceSpec, generate_instance, load_instance
from .plotting import curves_svg, placement_svg, write_svg
from .qubo import LambdaParams, QuboConfig
from .tuner import TunerConfig, tune

log = logging.getLogger(__name__)

# dataset shapes benchmarked in the original study: (grid, pois, old, new)
PAPER_SHAPES = (
    ((15, 20), 5, 2, 3),
    ((15, 20), 5, 3, 3),
    ((15, 20), 6, 3, 3),
    ((15, 20), 9, 3, 3),
    ((30, 30), 10, 3, 3),
    ((30, 30), 15, 1, 3),
    ((30, 30), 20, 4, 3),
    ((30, 30), 20, 3, 3),
    ((100, 100), 20, 4, 4),
)


class SuiteError(ValueError):
    pass


@dataclass
class BenchEntry:
    instance: GridInstance
    label: str
    lambdas: LambdaParams | None = None


@dataclass
class BenchRow:
    dataset: str
    scores: dict[str, float] = field(default_factory=dict)
    wall_times: dict[str, float] = field(default_factory=dict)
    results: dict[str, SolveResult] = field(default_factory=dict)
    lambdas: LambdaParams | None = None
    instance: GridInstance | None = None
    error: str | None = None


def parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ValueError(f"grid must look like WxH, got {text!r}") from None


def paper_suite(seed: int = 0) -> list[dict]:
    return [
        {"grid": f"{w}x{h}", "pois": n, "old": o, "new": c, "seed": seed * 1000 + k}
        for k, ((w, h), n, o, c) in enumerate(PAPER_SHAPES)
    ]


def load_suite(path: str | Path) -> list[BenchEntry]:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    return suite_entries(data, base=path.parent)


def suite_entries(data, base: Path = Path(".")) -> list[BenchEntry]:
    if isinstance(data, dict):
        data = data.get("datasets")
    if not isinstance(data, list) or not data:
        raise SuiteError("suite must list at least one dataset")
    entries, seen = [], {}
    for k, item in enumerate(data):
        lam = None
        if isinstance(item, str):
            inst = load_instance(base / item)
        elif isinstance(item, dict):
            if "instance" in item:
                inst = load_instance(base / item["instance"])
            else:
                try:
                    w, h = parse_grid(item["grid"])
                    spec = InstanceSpec(
                        w, h, int(item["pois"]), int(item["old"]), int(item["new"]),
                        int(item.get("seed", k)),
                    )
                except KeyError as exc:
                    raise SuiteError(f"suite entry {k}: missing field {exc}") from None
                inst = generate_instance(spec)
            if item.get("lambdas"):
                lam = LambdaParams.parse(item["lambdas"])
        else:
            raise SuiteError(f"suite entry {k}: expected a path or an object")
        label = inst.label
        seen[label] = seen.get(label, 0) + 1
        if seen[label] > 1:
            label = f"{label}#{seen[label]}"
        entries.append(BenchEntry(inst, label, lam))
    return entries


def _row_seed(master: int, row: int) -> int:
    return int(np.random.SeedSequence([master, row]).generate_state(1, np.uint64)[0])


def run_bench(
    entries: list[BenchEntry],
    seed: int = 0,
    runs: int = 5,
    lambdas: LambdaParams | None = None,
    qubo_cfg: QuboConfig = QuboConfig(),
    anneal_cfg: AnnealConfig = AnnealConfig(),
    ga_cfg: GaConfig = GaConfig(),
    seeded_generations: int = SEEDED_GENERATIONS,
    tune_budget: int = 0,
    tune_cfg: TunerConfig | None = None,
    tune_anneal_cfg: AnnealConfig | None = None,
) -> list[BenchRow]:
    """Run qa, ga and hybrid on every entry; failures are kept per row."""
    if not entries:
        raise SuiteError("empty suite")
    rows = []
    for k, entry in enumerate(entries):
        row = BenchRow(entry.label, instance=entry.instance)
        row_seed = _row_seed(seed, k)
        try:
            lam = entry.lambdas or lambdas or LambdaParams()
            if tune_budget > 0:
                tcfg = replace(tune_cfg or TunerConfig(), budget=tune_budget, rng_seed=row_seed)
                t0 = time.perf_counter()
                lam = tune(entry.instance, tcfg, tune_anneal_cfg or anneal_cfg, qubo_cfg).best
                row.wall_times["tune"] = time.perf_counter() - t0
            row.lambdas = lam
            common = dict(
                lambdas=lam, qubo_cfg=qubo_cfg, anneal_cfg=anneal_cfg, ga_cfg=ga_cfg,
                runs=runs, seed=row_seed,
            )
            qa = solve(entry.instance, "qa", **common)
            hy = solve(
                entry.instance, "hybrid", seeded_generations=seeded_generations,
                reuse=qa, **common,
            )
            ga = solve(entry.instance, "ga", **common)
            row.results = {"qa": qa, "ga": ga, "hybrid": hy}
            row.scores = {m: r.report.combined for m, r in row.results.items()}
            row.wall_times.update(
                qa=qa.wall_times["annealer"],
                ga=ga.wall_times["ga"],
                hybrid=hy.wall_times["annealer"] + hy.wall_times["ga"],
            )
        except Exception as exc:  # recorded per row, the suite keeps going
            log.exception("dataset %s failed", entry.label)
            row.error = f"{type(exc).__name__}: {exc}"
        log.info("%s %s", row.dataset, row.scores or row.error)
        rows.append(row)
    return rows


def improvement_summary(rows: list[BenchRow]) -> dict:
    ok = [r for r in rows if r.error is None]
    rel_qa = [(r.scores["qa"] - r.scores["hybrid"]) / r.scores["qa"] for r in ok if r.scores["qa"] > 0]
    rel_ga = [(r.scores["ga"] - r.scores["hybrid"]) / r.scores["ga"] for r in ok if r.scores["ga"] > 0]
    seeded_ahead = 0
    for r in ok:
        seeded0 = np.mean([h.best_fitness_per_generation[0] for h in r.results["hybrid"].histories])
        ga_hist = [h.best_fitness_per_generation for h in r.results["ga"].histories]
        g = min(SEEDED_GENERATIONS, min(len(h) for h in ga_hist) - 1)
        if seeded0 < np.mean([h[g] for h in ga_hist]):
            seeded_ahead += 1
    return {
        "datasets": len(rows),
        "failed": len(rows) - len(ok),
        "improvement_vs_qa": float(np.mean(rel_qa)) if rel_qa else math.nan,
        "improvement_vs_ga": float(np.mean(rel_ga)) if rel_ga else math.nan,
        "hybrid_beats_qa": sum(r.scores["hybrid"] < r.scores["qa"] for r in ok),
        "hybrid_beats_ga": sum(r.scores["hybrid"] < r.scores["ga"] for r in ok),
        "seeded_gen0_below_random_gen100": seeded_ahead,
    }


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in label).strip("_")


def write_bench(rows: list[BenchRow], out_dir: str | Path, record_times: bool = False) -> dict:
    out = Path(out_dir)
    (out / "histories").mkdir(parents=True, exist_ok=True)
    (out / "results").mkdir(exist_ok=True)
    (out / "plots").mkdir(exist_ok=True)

    with open(out / "table.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "qa", "ga", "hybrid"])
        for r in rows:
            w.writerow([r.dataset] + [f"{r.scores.get(m, math.nan):.4f}" for m in ("qa", "ga", "hybrid")])

    if record_times:
        with open(out / "timings.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dataset", "tune", "qa", "ga", "hybrid"])
            for r in rows:
                w.writerow([r.dataset] + [f"{r.wall_times.get(m, 0.0):.3f}" for m in ("tune", "qa", "ga", "hybrid")])

    for r in rows:
        if r.error is not None:
            continue
        slug = _slug(r.dataset)
        curves = {}
        for m in ("ga", "hybrid"):
            res = r.results[m]
            res.ga_history.save(out / "histories" / f"{slug}_{m}.txt")
            curves[f"{m} (run {res.best_run})"] = res.ga_history.best_fitness_per_generation
        write_svg(curves_svg(curves, title=f"{r.dataset} best fitness"), out / "plots" / f"{slug}_fitness.svg")
        for m in ("qa", "hybrid"):
            title = f"{r.dataset} {m}: score of {round(r.scores[m], 2)}"
            write_svg(
                placement_svg(r.instance, r.results[m].placement, title),
                out / "plots" / f"{slug}_{m}.svg",
            )
        payload = {
            "dataset": r.dataset,
            "instance": r.instance.to_dict(),
            "lambdas": list(r.lambdas.as_tuple()),
            "methods": {
                m: result_to_dict(res, r.lambdas, with_times=record_times)
                for m, res in r.results.items()
            },
        }
        (out / "results" / f"{slug}.json").write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )

    summary = improvement_summary(rows)
    lines = [
        f"datasets: {summary['datasets']} (failed: {summary['failed']})",
        f"mean improvement of hybrid over qa: {100 * summary['improvement_vs_qa']:.2f}%",
        f"mean improvement of hybrid over ga: {100 * summary['improvement_vs_ga']:.2f}%",
        f"hybrid beats qa on {summary['hybrid_beats_qa']} datasets",
        f"hybrid beats ga on {summary['hybrid_beats_ga']} datasets",
        "seeded generation-0 best below random generation-100 best on "
        f"{summary['seeded_gen0_below_random_gen100']} datasets",
    ]
    lines += [f"error {r.dataset}: {r.error}" for r in rows if r.error is not None]
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return summary
