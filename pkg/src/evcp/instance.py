"""Grid instances for the charger placement problem.

An instance is a ``width x height`` lattice with points of interest (POIs),
already existing chargers, and a count of new chargers to place. Instances
are immutable; files are a single JSON object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Point = tuple[int, int]

FIELDS = ("width", "height", "pois", "old_chargers", "new_charger_count")


class InfeasibleSpec(ValueError):
    """More points requested than the grid has nodes."""


class NoCandidates(ValueError):
    """Every grid node is occupied, nothing left to place a charger on."""


class InstanceFormatError(ValueError):
    """Malformed or invalid instance file."""


@dataclass(frozen=True)
class GridInstance:
    width: int
    height: int
    pois: tuple[Point, ...]
    old_chargers: tuple[Point, ...]
    new_charger_count: int

    def __post_init__(self):
        object.__setattr__(self, "pois", tuple((int(x), int(y)) for x, y in self.pois))
        object.__setattr__(
            self, "old_chargers", tuple((int(x), int(y)) for x, y in self.old_chargers)
        )
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        for kind, pts in (("pois", self.pois), ("old_chargers", self.old_chargers)):
            for x, y in pts:
                if not (0 <= x < self.width and 0 <= y < self.height):
                    raise ValueError(
                        f"{kind} point ({x},{y}) outside {self.width}x{self.height} grid"
                    )
        occupied = self.pois + self.old_chargers
        if len(set(occupied)) != len(occupied):
            raise ValueError("POIs and old chargers must occupy distinct nodes")
        if self.new_charger_count < 1:
            raise ValueError("new_charger_count must be >= 1")
        free = self.width * self.height - len(occupied)
        if self.new_charger_count > free:
            raise ValueError(
                f"new_charger_count={self.new_charger_count} exceeds {free} free nodes"
            )

    @property
    def poi_array(self) -> np.ndarray:
        return np.asarray(self.pois, dtype=float).reshape(-1, 2)

    @property
    def old_array(self) -> np.ndarray:
        return np.asarray(self.old_chargers, dtype=float).reshape(-1, 2)

    @property
    def label(self) -> str:
        return (
            f"EVCP({len(self.pois)},{len(self.old_chargers)},{self.new_charger_count})"
            f"@{self.width}x{self.height}"
        )

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "pois": [list(p) for p in self.pois],
            "old_chargers": [list(p) for p in self.old_chargers],
            "new_charger_count": self.new_charger_count,
        }


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for a random EVCP(n_poi, n_old, n_new) dataset."""

    width: int
    height: int
    n_poi: int
    n_old: int
    n_new: int
    rng_seed: int = 0


def generate_instance(spec: InstanceSpec) -> GridInstance:
    nodes = spec.width * spec.height
    if spec.n_poi < 0 or spec.n_old < 0 or spec.n_new < 1:
        raise InfeasibleSpec(f"invalid counts in {spec}")
    if spec.n_poi + spec.n_old > nodes:
        raise InfeasibleSpec(
            f"{spec.n_poi} POIs + {spec.n_old} old chargers do not fit on "
            f"{spec.width}x{spec.height} grid ({nodes} nodes)"
        )
    if spec.n_poi + spec.n_old + spec.n_new > nodes:
        raise InfeasibleSpec(f"no room for {spec.n_new} new chargers on {nodes} nodes")
    rng = np.random.default_rng(spec.rng_seed)
    # POIs first, then old chargers, all without replacement (row-major node ids)
    picked = rng.choice(nodes, size=spec.n_poi + spec.n_old, replace=False)
    pts = [(int(k % spec.width), int(k // spec.width)) for k in picked]
    return GridInstance(
        width=spec.width,
        height=spec.height,
        pois=tuple(pts[: spec.n_poi]),
        old_chargers=tuple(pts[spec.n_poi :]),
        new_charger_count=spec.n_new,
    )


def candidate_sites(inst: GridInstance) -> list[Point]:
    """All unoccupied nodes in row-major order (y outer, x inner)."""
    occupied = set(inst.pois) | set(inst.old_chargers)
    sites = [
        (x, y)
        for y in range(inst.height)
        for x in range(inst.width)
        if (x, y) not in occupied
    ]
    if not sites:
        raise NoCandidates(f"all {inst.width * inst.height} nodes are occupied")
    return sites


def _parse_points(raw, name: str) -> list[Point]:
    if not isinstance(raw, list):
        raise InstanceFormatError(f"field {name!r}: expected a list of [x, y] pairs")
    pts = []
    for k, p in enumerate(raw):
        if (
            not isinstance(p, list)
            or len(p) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in p)
        ):
            raise InstanceFormatError(f"field {name!r}[{k}]: expected [x, y] integers, got {p!r}")
        pts.append((p[0], p[1]))
    return pts


def instance_from_dict(data: dict) -> GridInstance:
    if not isinstance(data, dict):
        raise InstanceFormatError("instance file must hold a single JSON object")
    for name in FIELDS:
        if name not in data:
            raise InstanceFormatError(f"missing field {name!r}")
    for name in ("width", "height", "new_charger_count"):
        if not isinstance(data[name], int) or isinstance(data[name], bool):
            raise InstanceFormatError(f"field {name!r}: expected an integer")
    try:
        return GridInstance(
            width=data["width"],
            height=data["height"],
            pois=tuple(_parse_points(data["pois"], "pois")),
            old_chargers=tuple(_parse_points(data["old_chargers"], "old_chargers")),
            new_charger_count=data["new_charger_count"],
        )
    except InstanceFormatError:
        raise
    except ValueError as exc:
        raise InstanceFormatError(f"invalid instance: {exc}") from exc


def save_instance(inst: GridInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_instance(path: str | Path) -> GridInstance:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return instance_from_dict(data)
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
