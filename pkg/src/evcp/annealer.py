"""Simulated-annealing sampler for :class:`~evcp.qubo.QuboMatrix`.

Single-flip Metropolis over a geometric inverse-temperature schedule. Each
read seeds its own stream from ``(rng_seed, read_index)`` so results do not
depend on execution order. Metric-form QUBOs get O(1) flip deltas by keeping
running sums of the selected points; dense QUBOs keep a local-field vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .qubo import QuboMatrix, energy
from .scoring import Placement


# uphill moves with beta*delta above this are rejected without drawing (p < e^-40)
_CUTOFF = 40.0


class EmptySampleSet(ValueError):
    pass


@dataclass(frozen=True)
class AnnealConfig:
    num_reads: int = 200
    sweeps_per_read: int = 1000
    beta_initial: float = 0.1
    beta_final: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1 or self.sweeps_per_read < 1:
            raise ValueError("num_reads and sweeps_per_read must be >= 1")
        if not (0 < self.beta_initial <= self.beta_final):
            raise ValueError("need 0 < beta_initial <= beta_final")


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Distinct states sorted by energy, ties kept in first-seen read order."""

    states: np.ndarray  # (k, n) uint8
    energies: np.ndarray
    counts: np.ndarray

    def __len__(self):
        return len(self.energies)

    @property
    def first(self) -> tuple[np.ndarray, float, int]:
        if len(self) == 0:
            raise EmptySampleSet("sample set is empty")
        return self.states[0], float(self.energies[0]), int(self.counts[0])

    def __iter__(self):
        for k in range(len(self)):
            yield self.states[k], float(self.energies[k]), int(self.counts[k])


def beta_schedule(cfg: AnnealConfig) -> np.ndarray:
    return np.geomspace(cfg.beta_initial, cfg.beta_final, cfg.sweeps_per_read)


def read_seeds(seed: int, num_reads: int) -> np.ndarray:
    return np.array(
        [np.random.SeedSequence([seed, r]).generate_state(1)[0] for r in range(num_reads)],
        dtype=np.uint32,
    )


@numba.njit(cache=True)
def _anneal_dense(linear, sym, betas, seeds):
    n = linear.shape[0]
    out = np.zeros((seeds.shape[0], n), dtype=np.uint8)
    field = np.empty(n)
    for r in range(seeds.shape[0]):
        np.random.seed(seeds[r])
        x = np.zeros(n, dtype=np.uint8)
        for i in range(n):
            if np.random.random() < 0.5:
                x[i] = 1
        for i in range(n):
            s = 0.0
            for j in range(n):
                if x[j]:
                    s += sym[i, j]
            field[i] = s
        for beta in betas:
            for i in range(n):
                d = linear[i] + field[i]
                if x[i]:
                    d = -d
                if d <= 0.0 or (beta * d < _CUTOFF and np.random.random() < np.exp(-beta * d)):
                    sign = -1.0 if x[i] else 1.0
                    x[i] = 1 - x[i]
                    for j in range(n):
                        field[j] += sign * sym[j, i]
        out[r] = x
    return out


@numba.njit(cache=True)
def _anneal_metric(linear, px, py, scale, shift, betas, seeds):
    # coupler q_ij = scale*|p_i - p_j|^2 + shift; with k selected points,
    # sum_{j in S} |p_i - p_j|^2 = k|p_i|^2 - 2 p_i.P + Q2
    n = linear.shape[0]
    out = np.zeros((seeds.shape[0], n), dtype=np.uint8)
    sq = px * px + py * py
    for r in range(seeds.shape[0]):
        np.random.seed(seeds[r])
        x = np.zeros(n, dtype=np.uint8)
        k = 0
        sx = 0.0
        sy = 0.0
        q2 = 0.0
        for i in range(n):
            if np.random.random() < 0.5:
                x[i] = 1
                k += 1
                sx += px[i]
                sy += py[i]
                q2 += sq[i]
        for beta in betas:
            for i in range(n):
                if x[i]:
                    kk = k - 1
                    ox = sx - px[i]
                    oy = sy - py[i]
                    oq = q2 - sq[i]
                else:
                    kk = k
                    ox = sx
                    oy = sy
                    oq = q2
                pair = kk * sq[i] - 2.0 * (px[i] * ox + py[i] * oy) + oq
                d = linear[i] + scale * pair + shift * kk
                if x[i]:
                    d = -d
                if d <= 0.0 or (beta * d < _CUTOFF and np.random.random() < np.exp(-beta * d)):
                    if x[i]:
                        x[i] = 0
                        k -= 1
                        sx -= px[i]
                        sy -= py[i]
                        q2 -= sq[i]
                    else:
                        x[i] = 1
                        k += 1
                        sx += px[i]
                        sy += py[i]
                        q2 += sq[i]
        out[r] = x
    return out


def _symmetric(q: QuboMatrix) -> np.ndarray:
    c = q.couplers if q.couplers is not None else np.zeros((q.n, q.n))
    return c + c.T


def sample(q: QuboMatrix, cfg: AnnealConfig = AnnealConfig()) -> SampleSet:
    betas = beta_schedule(cfg)
    seeds = read_seeds(cfg.rng_seed, cfg.num_reads)
    if q.is_metric:
        raw = _anneal_metric(
            q.linear,
            np.ascontiguousarray(q.points[:, 0]),
            np.ascontiguousarray(q.points[:, 1]),
            float(q.pair_scale),
            float(q.pair_shift),
            betas,
            seeds,
        )
    else:
        raw = _anneal_dense(q.linear, _symmetric(q), betas, seeds)
    uniq, first, counts = np.unique(raw, axis=0, return_index=True, return_counts=True)
    energies = np.array([energy(q, s) for s in uniq])
    order = np.lexsort((first, energies))
    return SampleSet(uniq[order], energies[order], counts[order])


def local_fields(q: QuboMatrix, x: np.ndarray) -> np.ndarray:
    """``h_i = sum_{j != i} q_{ij} x_j`` over the symmetric coupler pattern."""
    xb = np.asarray(x).astype(bool)
    if q.couplers is not None:
        return _symmetric(q) @ xb.astype(float)
    if q.points is not None:
        p = q.points
        sel = p[xb]
        sq = np.einsum("ij,ij->i", p, p)
        # sum_{j in S} |p_i - p_j|^2, the j == i term is zero
        pair = len(sel) * sq - 2.0 * p @ sel.sum(axis=0) + sq[xb].sum()
        return q.pair_scale * pair + q.pair_shift * (len(sel) - xb)
    return np.zeros(q.n)


def repair(x, m: int, q: QuboMatrix) -> np.ndarray:
    """Greedy single flips toward exactly ``m`` ones, cheapest energy change first."""
    x = np.asarray(x, dtype=np.uint8).copy()
    if x.shape != (q.n,):
        raise ValueError(f"bit vector has length {x.size}, QUBO has {q.n} variables")
    if not 0 <= m <= q.n:
        raise ValueError(f"m={m} outside [0, {q.n}]")
    while True:
        k = int(x.sum())
        if k == m:
            return x
        gain = q.linear + local_fields(q, x)
        if k < m:
            cand = np.flatnonzero(x == 0)
            delta = gain[cand]
        else:
            cand = np.flatnonzero(x == 1)
            delta = -gain[cand]
        x[cand[np.argmin(delta)]] ^= 1


def best_placement(ss: SampleSet, q: QuboMatrix, m: int) -> Placement:
    if len(ss) == 0:
        raise EmptySampleSet("cannot pick a placement from an empty sample set")
    if q.site_index is None:
        raise ValueError("QUBO has no site_index to map bits to coordinates")
    x = repair(ss.states[0], m, q)
    coords = [q.site_index[i] for i in np.flatnonzero(x)]
    return Placement(tuple(coords), "annealer")
