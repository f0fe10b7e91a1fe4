"""Run annealing-only, GA-only, or annealer-seeded GA over repeated runs."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .annealer import AnnealConfig, best_placement, sample
from .genetic import GaConfig, GaHistory, evolve, init_population
from .instance import GridInstance, candidate_sites
from .qubo import LambdaParams, QuboConfig, build_qubo
from .scoring import Placement, ScoreReport, aggregate, run_score

Method = Literal["qa", "ga", "hybrid"]
METHODS = ("qa", "ga", "hybrid")
SEEDED_GENERATIONS = 100

_STAGE_TAGS = {"anneal": 1, "ga": 2, "hybrid": 3}


class InvalidMethod(ValueError):
    pass


def derive_seed(master: int, run: int, stage: str) -> int:
    state = np.random.SeedSequence([master, run, _STAGE_TAGS[stage]]).generate_state(1, np.uint64)
    return int(state[0])


@dataclass
class SolveResult:
    method: str
    placement: Placement
    report: ScoreReport
    wall_times: dict[str, float]
    ga_history: GaHistory | None = None
    run_placements: list[Placement] = field(default_factory=list)
    histories: list[GaHistory] = field(default_factory=list)
    # per-run scores of the annealer stage (qa and hybrid only)
    annealer_scores: list[float] = field(default_factory=list)
    best_run: int = 0


def anneal_once(
    inst: GridInstance,
    lambdas: LambdaParams,
    qubo_cfg: QuboConfig,
    anneal_cfg: AnnealConfig,
) -> Placement:
    sites = candidate_sites(inst)
    q = build_qubo(inst, sites, lambdas, qubo_cfg)
    return best_placement(sample(q, anneal_cfg), q, inst.new_charger_count)


def solve(
    inst: GridInstance,
    method: str,
    lambdas: LambdaParams = LambdaParams(),
    qubo_cfg: QuboConfig = QuboConfig(),
    anneal_cfg: AnnealConfig = AnnealConfig(),
    ga_cfg: GaConfig = GaConfig(),
    runs: int = 5,
    seed: int = 0,
    seeded_generations: int = SEEDED_GENERATIONS,
    reuse: SolveResult | None = None,
) -> SolveResult:
    """Repeat one strategy ``runs`` times and aggregate the scores.

    ``ga`` evolves for ``ga_cfg.generations``; ``hybrid`` seeds the GA with
    the annealer placement and evolves for ``seeded_generations``. Per-run
    seeds come from ``(seed, run, stage)``, so the annealer stage of ``qa``
    and ``hybrid`` is identical for equal seeds; pass a finished ``qa``
    result as ``reuse`` to skip re-annealing.
    """
    if method not in METHODS:
        raise InvalidMethod(f"unknown method {method!r}; expected one of {METHODS}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if reuse is not None and (reuse.method != "qa" or len(reuse.run_placements) != runs):
        raise ValueError("reuse needs a qa result with one placement per run")

    times = {"annealer": 0.0, "ga": 0.0}
    scores, placements, histories, anneal_scores = [], [], [], []
    for run in range(runs):
        seeds = None
        if method in ("qa", "hybrid"):
            if reuse is not None:
                seed_placement = reuse.run_placements[run]
            else:
                t0 = time.perf_counter()
                cfg = replace(anneal_cfg, rng_seed=derive_seed(seed, run, "anneal"))
                seed_placement = anneal_once(inst, lambdas, qubo_cfg, cfg)
                times["annealer"] += time.perf_counter() - t0
            anneal_scores.append(run_score(seed_placement, inst))
            seeds = [seed_placement]

        if method == "qa":
            placements.append(seed_placement)
            scores.append(anneal_scores[-1])
            continue

        t0 = time.perf_counter()
        if method == "ga":
            cfg = replace(ga_cfg, rng_seed=derive_seed(seed, run, "ga"))
            rng = np.random.default_rng(cfg.rng_seed)
            pop = init_population(inst, cfg, None, rng)
        else:
            cfg = replace(
                ga_cfg,
                generations=seeded_generations,
                rng_seed=derive_seed(seed, run, "hybrid"),
            )
            rng = np.random.default_rng(cfg.rng_seed)
            pop = init_population(inst, cfg, seeds, rng)
        best, hist = evolve(inst, cfg, pop, rng)
        times["ga"] += time.perf_counter() - t0
        placement = best.placement(method)
        placements.append(placement)
        histories.append(hist)
        scores.append(run_score(placement, inst))

    if reuse is not None:
        times["annealer"] = reuse.wall_times["annealer"]
    k = int(np.argmin(scores))
    return SolveResult(
        method=method,
        placement=placements[k],
        report=aggregate(scores),
        wall_times=times,
        ga_history=histories[k] if histories else None,
        run_placements=placements,
        histories=histories,
        annealer_scores=anneal_scores,
        best_run=k,
    )


def result_to_dict(res: SolveResult, lambdas: LambdaParams, with_times: bool = False) -> dict:
    out = {
        "method": res.method,
        "lambdas": list(lambdas.as_tuple()),
        "per_run": list(res.report.per_run),
        "mean": res.report.mean,
        "variance": res.report.variance,
        "combined": res.report.combined,
        "placement": [list(c) for c in res.placement.coords],
        "provenance": res.placement.provenance,
    }
    if res.annealer_scores:
        out["annealer_per_run"] = list(res.annealer_scores)
    if with_times:
        out["wall_times"] = dict(res.wall_times)
    return out
