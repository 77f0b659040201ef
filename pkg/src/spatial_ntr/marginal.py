"""Simulation of complete datasets from the exchangeable marginal law.

A draw proceeds in three stages: a labelled ranked partition from the
ordered Chinese restaurant process, the ranked distinct times from a
Markov chain of exponential spacings, and independent marks from ``P0``.
Latent hazard jumps at the distinct times can be drawn as well.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .baseline import BaselineMeasure
from .errors import ConvergenceError
from .families import (
    BetaProcess,
    DirichletGenerating,
    GeneralizedGamma,
    TwoParamPD,
)
from .ocrp import sample_ocrp
from .partitions import OrderedPartition, _require_homogeneous
from .rng import as_generator

__all__ = [
    "MarginalDraw",
    "sample_times",
    "sample_standardized_times",
    "sample_marks",
    "sample_jumps",
    "sample_jump",
    "jump_mean",
    "sample_dataset",
    "sample_datasets",
]

_MAX_REJECTION_ROUNDS = 50
_GRID_CELLS = 4096


@dataclass
class MarginalDraw:
    """One simulated dataset in ranked form (rank 1 is the largest time)."""

    partition: OrderedPartition
    times: np.ndarray
    marks: list
    jumps: np.ndarray | None = None

    @property
    def n(self):
        return self.partition.n

    def observation_times(self):
        """Time of every observation in arrival order."""
        if self.partition.labels is None:
            return np.repeat(self.times, self.partition.m)
        return self.times[np.asarray(self.partition.labels) - 1]

    def observation_marks(self):
        labels = self.partition.labels or np.repeat(np.arange(1, self.partition.k + 1), self.partition.m)
        return [self.marks[j - 1] for j in labels]

    def to_record(self):
        return {
            "m": list(self.partition.m),
            "labels": list(self.partition.labels) if self.partition.labels else None,
            "times": self.times.tolist(),
            "marks": list(self.marks),
            "jumps": None if self.jumps is None else self.jumps.tolist(),
        }


def _sizes(partition):
    return partition.m if isinstance(partition, OrderedPartition) else tuple(int(x) for x in partition)


def sample_standardized_times(family, partition, rng=None):
    """Ranked distinct times on the ``Lambda0(t) = t`` scale.

    The smallest time is exponential with rate ``phi(n)``; moving up the
    ranks, ``t_j - t_{j+1}`` is exponential with rate ``phi(r_j)``.
    """
    _require_homogeneous(family)
    rng = as_generator(rng)
    m = _sizes(partition)
    rates = np.array([family.phi(r) for r in np.cumsum(m)])
    gaps = rng.exponential(1.0 / rates)
    return np.cumsum(gaps[::-1])[::-1]


def sample_times(family, baseline, partition, rng=None):
    """Ranked distinct times under ``baseline`` (strictly decreasing)."""
    std = sample_standardized_times(family, partition, rng)
    return np.asarray(baseline.inverse_hazard(std), dtype=float)


def sample_marks(partition, baseline, rng=None):
    """One mark per block, i.i.d. from the baseline mark law."""
    rng = as_generator(rng)
    k = len(_sizes(partition)) if partition is not None and len(_sizes(partition)) else 0
    return baseline.sample_marks(rng, k) if k else []


# -- latent jumps ---------------------------------------------------------------


class _GridJumpSampler:
    """Inverse-CDF sampler for ``u**m (1-u)**r rho(du)`` on a fixed grid.

    Cells are uniform in ``v = sqrt(y)`` on ``y <= 1`` and in
    ``s = y**-1/2`` on ``y >= 1`` (``y = -log(1 - u)``), the same
    coordinates used by the quadrature routines.
    """

    def __init__(self, family, m, r, cells=_GRID_CELLS):
        h = 1.0 / cells
        mid = (np.arange(cells) + 0.5) * h
        tau = np.vectorize(family.tau, otypes=[float])

        def weight(y):
            return (-np.expm1(-y)) ** m * np.exp(-r * y) * tau(y)

        y_near = mid * mid
        y_far = 1.0 / (mid * mid)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            near = weight(y_near) * 2.0 * mid * h
            far = weight(y_far) * 2.0 * y_far * np.sqrt(y_far) * h
        far = np.nan_to_num(far, nan=0.0, posinf=0.0)
        atom = family.atom_at_one if r == 0 else 0.0
        masses = np.concatenate([near, far[::-1], [atom]])
        self.cum = np.cumsum(masses)
        self.cells = cells
        self.h = h

    def __call__(self, rng, size):
        target = rng.random(size) * self.cum[-1]
        idx = np.minimum(np.searchsorted(self.cum, target, side="right"), len(self.cum) - 1)
        lo = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        width = self.cum[idx] - lo
        frac = np.where(width > 0, (target - lo) / np.where(width > 0, width, 1.0), 0.5)
        out = np.empty(size)
        c = self.cells
        near = idx < c
        v = (idx[near] + frac[near]) * self.h
        out[near] = -np.expm1(-(v * v))
        far = (idx >= c) & (idx < 2 * c)
        s = (2 * c - idx[far] - frac[far]) * self.h
        with np.errstate(divide="ignore", over="ignore"):
            out[far] = -np.expm1(-1.0 / (s * s))
        out[idx >= 2 * c] = 1.0
        return out


def _beta_mixture(rng, size, components):
    """Sample from a mixture of beta laws; a component ``(w, None, None)`` is an atom at one."""
    weights = np.array([w for w, _, _ in components])
    weights = weights / weights.sum()
    which = rng.choice(len(components), size=size, p=weights)
    out = np.empty(size)
    for i, (_, a, b) in enumerate(components):
        sel = which == i
        out[sel] = 1.0 if a is None else rng.beta(a, b, size=int(sel.sum()))
    return out


@functools.lru_cache(maxsize=4096)
def _jump_sampler(family, m, r):
    if isinstance(family, BetaProcess):
        th = family.theta
        return lambda rng, size: rng.beta(m, th + r, size=size)
    if isinstance(family, TwoParamPD):
        a, th = family.alpha, family.theta
        comps = []
        if a > 0:
            comps.append((math.exp(math.log(a) + special.betaln(m - a, r + th + 1)), m - a, r + th + 1))
        if th > 0:
            comps.append((math.exp(math.log(th) + special.betaln(m - a + 1, r + th)), m - a + 1, r + th))
        elif r == 0:
            comps.append((1.0, None, None))
        if isinstance(family, DirichletGenerating) or len(comps) == 1:
            _, p, q = comps[0]
            if p is not None:
                return lambda rng, size: rng.beta(p, q, size=size)
        return lambda rng, size: _beta_mixture(rng, size, comps)
    if isinstance(family, GeneralizedGamma):
        a, b = family.alpha, family.b
        if a == -1.0:
            return lambda rng, size: rng.beta(m + 1, r + b, size=size)
        if a > -1.0 and r + b > 0:
            grid = None

            def rejection(rng, size):
                nonlocal grid
                out = np.empty(size)
                filled = 0
                for _ in range(_MAX_REJECTION_ROUNDS):
                    need = size - filled
                    if need == 0:
                        return out
                    u = rng.beta(m - a, r + b, size=max(2 * need, 16))
                    y = -np.log1p(-u)
                    # target / envelope = (u / y)**(alpha + 1) <= 1
                    with np.errstate(divide="ignore", invalid="ignore"):
                        ratio = np.where(y > 0, u / y, 1.0) ** (a + 1.0)
                    keep = u[rng.random(u.size) < ratio][:need]
                    out[filled:filled + keep.size] = keep
                    filled += keep.size
                if grid is None:
                    grid = _GridJumpSampler(family, m, r)
                out[filled:] = grid(rng, size - filled)
                return out

            return rejection
    return _GridJumpSampler(family, m, r)


def sample_jump(family, m, r, rng=None, size=None):
    """Draw from the law proportional to ``u**m (1-u)**r rho(du)``."""
    _require_homogeneous(family)
    rng = as_generator(rng)
    out = _jump_sampler(family, int(m), int(r))(rng, 1 if size is None else size)
    if not np.all(np.isfinite(out)):
        raise ConvergenceError("jump sampler produced non-finite values")
    return float(out[0]) if size is None else out


def jump_mean(family, m, r):
    """Mean of the jump law: ``kappa(m + 1, r) / kappa(m, r)``."""
    return math.exp(family.log_kappa(m + 1, r) - family.log_kappa(m, r))


def sample_jumps(family, partition, rng=None):
    """Latent hazard jump at each ranked time; block ``j`` uses ``(m_j, r_{j-1})``."""
    rng = as_generator(rng)
    m = _sizes(partition)
    r_prev = np.concatenate([[0], np.cumsum(m)[:-1]])
    return np.array([sample_jump(family, mj, rj, rng) for mj, rj in zip(m, r_prev)])


def sample_dataset(family, baseline=None, n=1, rng=None, with_jumps=False):
    """Simulate ``n`` exchangeable observations ``(T_i, X_i)``."""
    rng = as_generator(rng)
    baseline = baseline or BaselineMeasure()
    partition = sample_ocrp(family, n, rng)
    times = sample_times(family, baseline, partition, rng)
    marks = sample_marks(partition, baseline, rng)
    jumps = sample_jumps(family, partition, rng) if with_jumps else None
    return MarginalDraw(partition, times, marks, jumps)


def sample_datasets(family, baseline=None, n=1, draws=1, rng=None, with_jumps=False):
    rng = as_generator(rng)
    return [sample_dataset(family, baseline, n, rng, with_jumps) for _ in range(draws)]
