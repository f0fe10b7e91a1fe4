"""Placement scoring: sum over POIs of the distance to the nearest charger."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .instance import GridInstance

Provenance = Literal["annealer", "ga", "hybrid"]


class NoChargers(ValueError):
    pass


class EmptyRuns(ValueError):
    pass


@dataclass(frozen=True)
class Placement:
    coords: tuple[tuple[float, float], ...]
    provenance: Provenance

    def __post_init__(self):
        object.__setattr__(
            self, "coords", tuple((float(x), float(y)) for x, y in self.coords)
        )

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float).reshape(-1, 2)

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True)
class ScoreReport:
    per_run: tuple[float, ...]
    mean: float
    variance: float
    combined: float


def min_distance_sum(pois: np.ndarray, chargers: np.ndarray) -> np.ndarray:
    """Batched score. ``chargers`` is ``(..., k, 2)``; returns shape ``(...)``."""
    diff = chargers[..., None, :, :] - pois[:, None, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    return d.min(axis=-1).sum(axis=-1)


def run_score(p: Placement | Sequence, inst: GridInstance) -> float:
    coords = p.array if isinstance(p, Placement) else np.asarray(p, dtype=float).reshape(-1, 2)
    chargers = np.concatenate([inst.old_array, coords])
    if len(chargers) == 0:
        raise NoChargers("no old or new chargers to measure against")
    if not inst.pois:
        return 0.0
    # batched call keeps results bit-identical to the GA's population fitness
    return float(min_distance_sum(inst.poi_array, chargers[None])[0])


def aggregate(per_run: Sequence[float]) -> ScoreReport:
    """Mean plus population variance across repeated runs."""
    if len(per_run) == 0:
        raise EmptyRuns("need at least one run to aggregate")
    vals = np.asarray(per_run, dtype=float)
    mean = float(vals.mean())
    variance = float(vals.var())
    return ScoreReport(tuple(float(v) for v in vals), mean, variance, mean + variance)
