"""Real-valued genetic algorithm over new-charger coordinates.

An individual is ``m`` continuous ``(x, y)`` pairs inside the rectangle
spanned by the grid nodes, ``[0, width-1] x [0, height-1]``. Fitness is the
single-run placement score (lower is better). The whole population is one
``(pop, m, 2)`` array, so a generation is a handful of numpy calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .instance import GridInstance
from .scoring import Placement, min_distance_sum


class SeedShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    generations: int = 1000
    tournament_size: int = 3
    crossover_rate: float = 0.9
    # None means 5% of max(width, height)
    mutation_sigma: float | None = None
    mutation_rate: float = 0.2
    elitism_count: int = 2
    seed_fraction: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.generations < 0:
            raise ValueError("population_size must be >= 2 and generations >= 0")
        if not 2 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must lie in [2, population_size]")
        if not 1 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must lie in [1, population_size)")
        for name in ("crossover_rate", "mutation_rate", "seed_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_sigma is not None and not self.mutation_sigma > 0:
            raise ValueError("mutation_sigma must be positive")

    def sigma_for(self, inst: GridInstance) -> float:
        if self.mutation_sigma is not None:
            return self.mutation_sigma
        return 0.05 * max(inst.width, inst.height)


@dataclass(frozen=True, eq=False)
class Individual:
    genes: np.ndarray
    fitness: float

    def placement(self, provenance="ga") -> Placement:
        return Placement(tuple(map(tuple, self.genes)), provenance)


@dataclass
class GaHistory:
    best_fitness_per_generation: list[float] = field(default_factory=list)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for g, f in enumerate(self.best_fitness_per_generation):
                fh.write(f"{g} {float(f)!r}\n")


def bounds(inst: GridInstance) -> np.ndarray:
    return np.array([inst.width - 1, inst.height - 1], dtype=float)


def fitness(inst: GridInstance, population: np.ndarray) -> np.ndarray:
    pop = np.asarray(population, dtype=float)
    if not inst.pois:
        return np.zeros(pop.shape[0])
    old = np.broadcast_to(inst.old_array, (pop.shape[0],) + inst.old_array.shape)
    return min_distance_sum(inst.poi_array, np.concatenate([old, pop], axis=1))


def init_population(
    inst: GridInstance,
    cfg: GaConfig,
    seeds: Sequence[Placement] | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Random population, optionally with a seeded share.

    With seeds, ``floor(seed_fraction * population_size)`` slots hold seed
    copies: one exact copy of each distinct seed, the rest Gaussian-perturbed
    copies cycling through the seed list.
    """
    rng = np.random.default_rng(cfg.rng_seed) if rng is None else rng
    m = inst.new_charger_count
    hi = bounds(inst)
    members = []
    if seeds:
        arrays = []
        for s in seeds:
            a = s.array if isinstance(s, Placement) else np.asarray(s, dtype=float).reshape(-1, 2)
            if a.shape != (m, 2):
                raise SeedShapeMismatch(f"seed has {len(a)} points, instance needs {m}")
            arrays.append(a)
        distinct = []
        for a in arrays:
            if not any(np.array_equal(a, d) for d in distinct):
                distinct.append(a)
        n_seeded = min(
            max(int(np.floor(cfg.seed_fraction * cfg.population_size)), len(distinct)),
            cfg.population_size,
        )
        members.extend(d.copy() for d in distinct[:n_seeded])
        sigma = cfg.sigma_for(inst)
        for k in range(n_seeded - len(members)):
            base = arrays[k % len(arrays)]
            members.append(np.clip(base + rng.normal(0.0, sigma, base.shape), 0.0, hi))
    n_rand = cfg.population_size - len(members)
    rand = rng.random((n_rand, m, 2)) * hi
    if members:
        return np.concatenate([np.stack(members), rand])
    return rand


def evolve(
    inst: GridInstance,
    cfg: GaConfig,
    population: np.ndarray,
    rng: np.random.Generator | None = None,
) -> tuple[Individual, GaHistory]:
    pop = np.array(population, dtype=float)
    if pop.shape != (cfg.population_size, inst.new_charger_count, 2):
        raise ValueError(
            f"population shape {pop.shape} does not match "
            f"({cfg.population_size}, {inst.new_charger_count}, 2)"
        )
    rng = np.random.default_rng(cfg.rng_seed) if rng is None else rng
    hi = bounds(inst)
    sigma = cfg.sigma_for(inst)
    size, m = pop.shape[:2]
    n_elite = cfg.elitism_count
    n_child = size - n_elite

    fit = fitness(inst, pop)
    history = GaHistory([float(fit.min())])
    for _ in range(cfg.generations):
        order = np.argsort(fit, kind="stable")
        elite = order[:n_elite]

        contenders = rng.integers(size, size=(2 * n_child, cfg.tournament_size))
        winners = contenders[np.arange(2 * n_child), np.argmin(fit[contenders], axis=1)]
        mother, father = pop[winners[:n_child]], pop[winners[n_child:]]

        swap = rng.random((n_child, m)) < 0.5
        swap &= (rng.random(n_child) < cfg.crossover_rate)[:, None]
        child = np.where(swap[..., None], father, mother)

        hit = rng.random(child.shape) < cfg.mutation_rate
        child = child + hit * rng.normal(0.0, sigma, child.shape)
        np.clip(child, 0.0, hi, out=child)

        # elites keep their stored fitness so the best value can never regress
        pop = np.concatenate([pop[elite], child])
        fit = np.concatenate([fit[elite], fitness(inst, child)])
        history.best_fitness_per_generation.append(float(fit.min()))

    k = int(np.argmin(fit))
    return Individual(pop[k].copy(), float(fit[k])), history
