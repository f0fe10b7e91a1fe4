"""Budgeted search over the four QUBO multipliers.

Each candidate is scored by the combined score of an annealing-only solve.
Every evaluation uses the same solve seed, so candidates are compared on
common random numbers. ``bayes`` fits a Gaussian process on log-multipliers
and picks the next point by expected improvement; it drops back to random
sampling whenever the surrogate cannot be fitted.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .annealer import AnnealConfig
from .hybrid import solve
from .instance import GridInstance
from .qubo import LambdaParams, QuboConfig

log = logging.getLogger(__name__)

DEFAULT_BOUNDS = ((1e-3, 1e3),) * 4


@dataclass(frozen=True)
class TunerConfig:
    budget: int = 50
    bounds: tuple[tuple[float, float], ...] = DEFAULT_BOUNDS
    method: str = "random"
    runs_per_eval: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if self.budget < 1 or self.runs_per_eval < 1:
            raise ValueError("budget and runs_per_eval must be >= 1")
        if len(self.bounds) != 4:
            raise ValueError("need one (low, high) pair per multiplier")
        for lo, hi in self.bounds:
            if not 0 < lo < hi:
                raise ValueError(f"bounds must satisfy 0 < low < high, got ({lo}, {hi})")
        if self.method not in ("random", "bayes"):
            raise ValueError(f"unknown tuner method {self.method!r}")


@dataclass
class TuneResult:
    best: LambdaParams
    best_score: float
    trace: list[tuple[LambdaParams, float]] = field(default_factory=list)

    def save_trace(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for lam, score in self.trace:
                fh.write(" ".join(repr(v) for v in (*lam.as_tuple(), score)) + "\n")


def _log_bounds(cfg: TunerConfig) -> np.ndarray:
    return np.log(np.asarray(cfg.bounds, dtype=float))


def _draw(rng: np.random.Generator, logb: np.ndarray, n: int) -> np.ndarray:
    return rng.uniform(logb[:, 0], logb[:, 1], size=(n, 4))


def expected_improvement(mu, sigma, best, xi=0.01):
    sigma = np.maximum(sigma, 1e-12)
    z = (best - mu - xi) / sigma
    return (best - mu - xi) * norm.cdf(z) + sigma * norm.pdf(z)


def _propose_bayes(rng, logb, xs, ys, n_pool=2000):
    """Next log-lambda by EI over a random pool, or None if the fit is unusable."""
    from sklearn.exceptions import ConvergenceWarning
    from sklearn.gaussian_process import GaussianProcessRegressor
    from sklearn.gaussian_process.kernels import ConstantKernel, Matern, WhiteKernel

    finite = np.isfinite(ys)
    if finite.sum() < 2:
        return None
    x = np.asarray(xs)[finite]
    # scores span orders of magnitude
    y = np.log1p(np.asarray(ys)[finite])
    if np.ptp(y) == 0:
        return None
    scale = logb[:, 1] - logb[:, 0]
    kernel = ConstantKernel() * Matern(length_scale=scale / 4, nu=2.5) + WhiteKernel(1e-3)
    gp = GaussianProcessRegressor(
        kernel=kernel,
        normalize_y=True,
        random_state=int(rng.integers(2**31)),
    )
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            gp.fit(x, y)
        pool = _draw(rng, logb, n_pool)
        mu, sd = gp.predict(pool, return_std=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        log.debug("surrogate fit failed: %s", exc)
        return None
    ei = expected_improvement(mu, sd, y.min())
    if not np.all(np.isfinite(ei)) or ei.max() <= 0:
        return None
    return pool[int(np.argmax(ei))]


def evaluate(
    inst: GridInstance,
    lam: LambdaParams,
    cfg: TunerConfig,
    anneal_cfg: AnnealConfig,
    qubo_cfg: QuboConfig,
) -> float:
    try:
        res = solve(
            inst,
            "qa",
            lam,
            qubo_cfg,
            anneal_cfg,
            runs=cfg.runs_per_eval,
            seed=cfg.rng_seed,
        )
    except (ValueError, ArithmeticError) as exc:
        log.warning("evaluation failed for %s: %s", lam, exc)
        return math.inf
    return res.report.combined


def tune(
    inst: GridInstance,
    cfg: TunerConfig = TunerConfig(),
    anneal_cfg: AnnealConfig = AnnealConfig(),
    qubo_cfg: QuboConfig = QuboConfig(),
    candidates: Sequence[LambdaParams] = (),
) -> TuneResult:
    """Spend ``cfg.budget`` evaluations; ``candidates`` are tried first."""
    rng = np.random.default_rng(cfg.rng_seed)
    logb = _log_bounds(cfg)
    n_init = max(1, cfg.budget // 3)
    xs: list[np.ndarray] = []
    ys: list[float] = []
    trace: list[tuple[LambdaParams, float]] = []

    for k in range(cfg.budget):
        if k < len(candidates):
            lam = candidates[k]
            point = np.log(np.maximum(lam.as_tuple(), 1e-300))
        else:
            point = None
            if cfg.method == "bayes" and k >= n_init:
                point = _propose_bayes(rng, logb, xs, ys)
            if point is None:
                point = _draw(rng, logb, 1)[0]
            lam = LambdaParams(*np.exp(point).tolist())
        score = evaluate(inst, lam, cfg, anneal_cfg, qubo_cfg)
        xs.append(point)
        ys.append(score)
        trace.append((lam, score))
        log.info("eval %d/%d %s -> %.4f", k + 1, cfg.budget, lam.as_tuple(), score)

    k = int(np.argmin(ys))
    return TuneResult(trace[k][0], ys[k], trace)
