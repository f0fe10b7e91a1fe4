"""QUBO assembly for charger placement and energy evaluation.

One binary variable per candidate site. The objective is a weighted sum of
four terms::

    l1 * sum_i x_i d_poi[i]                 (close to POIs, or entropy variant)
  - l2 * sum_i x_i d_old[i]                 (away from existing chargers)
  - l3 * sum_{i<j} x_i x_j |s_i - s_j|^2    (new chargers spread apart)
  + l4 * (sum_i x_i - m)^2                  (exactly m chargers)

Couplers produced by :func:`build_qubo` all have the form
``a * |s_i - s_j|^2 + b``, so the matrix is kept in that "metric" form and
only materialized densely on request. General matrices use dense couplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import log_softmax

from .instance import GridInstance, Point


class ZeroPOIs(ValueError):
    """Entropy over POI distances is undefined without POIs."""


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class LambdaParams:
    l1: float = 1.0
    l2: float = 1.0
    l3: float = 1.0
    l4: float = 1.0

    def __post_init__(self):
        for name, v in zip(("l1", "l2", "l3", "l4"), self.as_tuple()):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.l1, self.l2, self.l3, self.l4)

    @classmethod
    def parse(cls, text: str) -> "LambdaParams":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated lambdas, got {text!r}")
        return cls(*(float(p) for p in parts))


@dataclass(frozen=True)
class QuboConfig:
    use_entropy: bool = True
    softmax_temperature: float = 1.0
    # +1 evaluates sum P log P as printed; -1 gives the conventional entropy
    entropy_sign: int = 1

    def __post_init__(self):
        if not self.softmax_temperature > 0:
            raise ValueError("softmax_temperature must be positive")
        if self.entropy_sign not in (1, -1):
            raise ValueError("entropy_sign must be +1 or -1")


def _as_points(sites) -> np.ndarray:
    return np.asarray(sites, dtype=float).reshape(-1, 2)


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def poi_term(inst: GridInstance, sites) -> np.ndarray:
    """Summed squared distance from each site to every POI."""
    pts = _as_points(sites)
    if not inst.pois:
        return np.zeros(len(pts))
    return _sq_dists(pts, inst.poi_array).sum(axis=1)


def entropy_poi_term(inst: GridInstance, sites, cfg: QuboConfig = QuboConfig()) -> np.ndarray:
    """``sign * sum_k P_k log P_k`` with ``P = softmax(-dist_k / T)`` per site.

    Distances are plain Euclidean, so nearer POIs get more mass. With
    ``sign=+1`` the value is ``-log(n)`` at a site equidistant from all ``n``
    POIs and approaches 0 where one POI dominates.
    """
    if not inst.pois:
        raise ZeroPOIs("entropy term needs at least one POI")
    d = np.sqrt(_sq_dists(_as_points(sites), inst.poi_array))
    logp = log_softmax(-d / cfg.softmax_temperature, axis=1)
    return cfg.entropy_sign * np.sum(np.exp(logp) * logp, axis=1)


def old_charger_term(inst: GridInstance, sites) -> np.ndarray:
    pts = _as_points(sites)
    if not inst.old_chargers:
        return np.zeros(len(pts))
    return _sq_dists(pts, inst.old_array).sum(axis=1)


def pairwise_term(sites) -> np.ndarray:
    pts = _as_points(sites)
    return _sq_dists(pts, pts)


@dataclass(frozen=True)
class TermVectors:
    d_poi: np.ndarray
    d_old: np.ndarray
    sites: np.ndarray

    @property
    def pairwise(self) -> np.ndarray:
        return pairwise_term(self.sites)


def compute_terms(inst: GridInstance, sites, cfg: QuboConfig = QuboConfig()) -> TermVectors:
    pts = _as_points(sites)
    d_poi = entropy_poi_term(inst, pts, cfg) if cfg.use_entropy else poi_term(inst, pts)
    return TermVectors(d_poi=d_poi, d_old=old_charger_term(inst, pts), sites=pts)


@dataclass(frozen=True, eq=False)
class QuboMatrix:
    """Upper-triangular QUBO ``offset + sum_{i<=j} q_ij x_i x_j``.

    ``linear`` holds the diagonal. Off-diagonal entries come either from a
    dense strictly-upper ``couplers`` array or, when ``points`` is set, from
    ``pair_scale * |p_i - p_j|^2 + pair_shift``.
    """

    linear: np.ndarray
    offset: float = 0.0
    site_index: tuple[Point, ...] | None = None
    couplers: np.ndarray | None = None
    points: np.ndarray | None = None
    pair_scale: float = 0.0
    pair_shift: float = 0.0

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float)
        object.__setattr__(self, "linear", lin)
        n = lin.shape[0]
        if self.couplers is not None and self.points is not None:
            raise ValueError("give dense couplers or metric points, not both")
        if self.couplers is not None:
            c = np.asarray(self.couplers, dtype=float)
            if c.shape != (n, n):
                raise ValueError(f"couplers must be {n}x{n}")
            if np.any(np.tril(c) != 0):
                raise ValueError("couplers must be strictly upper-triangular")
            object.__setattr__(self, "couplers", c)
        if self.points is not None:
            p = np.asarray(self.points, dtype=float).reshape(-1, 2)
            if len(p) != n:
                raise ValueError("one point per variable required")
            object.__setattr__(self, "points", p)
        if self.site_index is not None and len(self.site_index) != n:
            raise ValueError("site_index length must equal variable count")
        finite = np.all(np.isfinite(lin)) and math.isfinite(self.offset)
        finite = finite and math.isfinite(self.pair_scale) and math.isfinite(self.pair_shift)
        if self.couplers is not None:
            finite = finite and bool(np.all(np.isfinite(self.couplers)))
        if not finite:
            raise ValueError("QUBO coefficients must be finite")

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    @property
    def is_metric(self) -> bool:
        return self.points is not None

    @classmethod
    def from_upper(cls, coeffs, offset: float = 0.0, site_index=None) -> "QuboMatrix":
        q = np.asarray(coeffs, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("QUBO matrix must be square")
        if np.any(np.tril(q, -1) != 0):
            raise ValueError("entries below the diagonal are not allowed; use from_symmetric")
        return cls(np.diag(q).copy(), offset, site_index, couplers=np.triu(q, 1))

    @classmethod
    def from_symmetric(cls, q, offset: float = 0.0, site_index=None) -> "QuboMatrix":
        """Fold ``x^T Q x`` with symmetric ``Q`` into upper-triangular form."""
        q = np.asarray(q, dtype=float)
        if not np.allclose(q, q.T):
            raise ValueError("matrix is not symmetric")
        return cls(np.diag(q).copy(), offset, site_index, couplers=2.0 * np.triu(q, 1))

    def upper_row(self, i: int) -> np.ndarray:
        """Entries ``q_ij`` for ``j > i``."""
        if self.couplers is not None:
            return self.couplers[i, i + 1 :]
        if self.points is not None:
            d = self.points[i + 1 :] - self.points[i]
            return self.pair_scale * np.einsum("ij,ij->i", d, d) + self.pair_shift
        return np.zeros(self.n - i - 1)

    @property
    def coeffs(self) -> np.ndarray:
        """Dense upper-triangular matrix. O(n^2) memory."""
        q = np.diag(self.linear)
        if self.couplers is not None:
            q += self.couplers
        elif self.points is not None:
            q += np.triu(self.pair_scale * pairwise_term(self.points) + self.pair_shift, 1)
        return q

    def energy(self, x) -> float:
        return energy(self, x)


def energy(q: QuboMatrix, x) -> float:
    """``offset + sum_{i<=j} q_ij x_i x_j`` for a 0/1 vector ``x``."""
    x = np.asarray(x)
    if x.shape != (q.n,):
        raise LengthMismatch(f"bit vector has length {x.size}, QUBO has {q.n} variables")
    xb = x.astype(bool)
    total = q.offset + float(q.linear[xb].sum())
    if q.couplers is not None:
        sel = np.flatnonzero(xb)
        total += float(q.couplers[np.ix_(sel, sel)].sum())
    elif q.points is not None:
        p = q.points[xb]
        k = len(p)
        if k > 1:
            sum_pairs = k * float(np.einsum("ij,ij->", p, p)) - float(np.sum(p.sum(axis=0) ** 2))
            total += q.pair_scale * sum_pairs + q.pair_shift * k * (k - 1) / 2
    return total


def build_qubo(
    inst: GridInstance,
    sites: Sequence[Point],
    lambdas: LambdaParams,
    cfg: QuboConfig = QuboConfig(),
) -> QuboMatrix:
    """Assemble the weighted four-term QUBO over ``sites``.

    The cardinality term is the squared penalty ``l4 * (sum x - m)^2``,
    expanded to ``l4 * (1 - 2m)`` on the diagonal, ``2 * l4`` on every
    coupler and ``l4 * m^2`` in the offset.
    """
    l1, l2, l3, l4 = lambdas.as_tuple()
    m = inst.new_charger_count
    pts = _as_points(sites)
    if l1 != 0:
        terms = compute_terms(inst, pts, cfg)
        d_poi, d_old = terms.d_poi, terms.d_old
    else:
        d_poi, d_old = 0.0, old_charger_term(inst, pts)
    linear = l1 * d_poi - l2 * d_old + l4 * (1 - 2 * m)
    linear = np.broadcast_to(np.asarray(linear, dtype=float), (len(pts),)).copy()
    return QuboMatrix(
        linear=linear,
        offset=l4 * m * m,
        site_index=tuple((int(x), int(y)) for x, y in pts),
        points=pts,
        pair_scale=-l3,
        pair_shift=2.0 * l4,
    )


def dump_qubo(q: QuboMatrix, path: str | Path) -> None:
    """Write ``N offset`` then one ``i j q_ij`` line per nonzero (``i <= j``)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{q.n} {float(q.offset)!r}\n")
        for i in range(q.n):
            if q.linear[i] != 0:
                fh.write(f"{i} {i} {float(q.linear[i])!r}\n")
            row = q.upper_row(i)
            for off in np.flatnonzero(row):
                fh.write(f"{i} {i + 1 + off} {float(row[off])!r}\n")


def load_qubo(path: str | Path) -> QuboMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: line 1: expected 'N offset'")
        n, offset = int(header[0]), float(header[1])
        q = np.zeros((n, n))
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                i, j, v = line.split()
                q[int(i), int(j)] = float(v)
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return QuboMatrix.from_upper(q, offset)
