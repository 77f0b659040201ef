"""Two-parameter Poisson-Dirichlet bridge.

The :class:`~spatial_ntr.families.TwoParamPD` jump law turns the mark
marginal of a spatial NTR process into a two-parameter Poisson-Dirichlet
random measure.  This module provides an independent stick-breaking sampler
for that measure and a Monte Carlo cross-check of its partition law against
the EPPF computed from the jump law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .families import DirichletGenerating, TwoParamPD
from .identities import IdentityReport
from .partitions import SetPartition, enumerate_set_partitions, eppf
from .rng import as_generator

__all__ = [
    "pd_family",
    "pd_rho_tail",
    "StickBreakingSpec",
    "stick_breaking_labels",
    "stick_breaking_partition_sample",
    "pd_cross_check",
    "MAX_CROSS_CHECK_N",
]

MAX_CROSS_CHECK_N = 8
_STICK_BLOCK = 16


def pd_family(alpha, theta):
    """The jump law with parameters ``(alpha, theta)``; ``alpha = 0`` gives the Dirichlet case."""
    if alpha == 0:
        return DirichletGenerating(theta=theta)
    return TwoParamPD(alpha=alpha, theta=theta)


def pd_rho_tail(alpha, theta, u):
    """``int_u^1 rho(dv) = Gamma(theta+2-alpha) / (Gamma(1-alpha) Gamma(1+theta)) u**-alpha (1-u)**theta``."""
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie in (0, 1), got {u!r}")
    return TwoParamPD(alpha=alpha, theta=theta).tail(u)


@dataclass(frozen=True)
class StickBreakingSpec:
    """Stick fractions ``V_k ~ Beta(1 - alpha, theta + k alpha)``, ``k >= 1``."""

    alpha: float = 0.0
    theta: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0 and self.theta >= 0.0):
            raise ConfigurationError(f"stick breaking needs 0 <= alpha < 1 and theta >= 0, got {self}")
        if self.alpha == 0.0 and self.theta == 0.0:
            raise ConfigurationError("alpha = theta = 0 gives a degenerate Beta(1, 0) stick")

    def fractions(self, rng, rows, first, count):
        """Fractions ``V_first .. V_{first+count-1}`` for ``rows`` independent sequences."""
        k = np.arange(first, first + count)
        return rng.beta(1.0 - self.alpha, self.theta + k * self.alpha, size=(rows, count))


def stick_breaking_labels(spec, n, draws, rng=None):
    """Category index of each of ``n`` observations, for ``draws`` independent measures.

    Sticks are extended lazily, block by block and only for rows whose
    uniforms are not yet covered, so no truncation is involved.
    """
    rng = as_generator(rng)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    u = rng.random((draws, n))
    need = u.max(axis=1)
    remaining = np.ones(draws)
    labels = np.full((draws, n), -1, dtype=np.int64)
    active = np.arange(draws)
    first = 1
    offset = 0
    while active.size:
        v = spec.fractions(rng, active.size, first, _STICK_BLOCK)
        # weights W_k = V_k prod_{l<k} (1 - V_l), continuing each row's stick
        left = remaining[active, None] * np.cumprod(np.hstack([np.ones((active.size, 1)), 1.0 - v[:, :-1]]), axis=1)
        w = left * v
        base = 1.0 - remaining[active]
        block_cum = base[:, None] + np.cumsum(w, axis=1)
        uu = u[active]
        hit = (labels[active] < 0) & (uu < block_cum[:, -1:])
        idx = (uu[:, :, None] >= block_cum[:, None, :]).sum(axis=2) + offset
        sub = labels[active]
        sub[hit] = idx[hit]
        labels[active] = sub
        remaining[active] = remaining[active] * np.prod(1.0 - v, axis=1)
        done = need[active] < block_cum[:, -1]
        active = active[~done]
        first += _STICK_BLOCK
        offset += _STICK_BLOCK
    return labels


def _canonical(row):
    seen = {}
    return tuple(seen.setdefault(c, len(seen)) for c in row)


def _to_partition(canon):
    blocks = {}
    for i, b in enumerate(canon, start=1):
        blocks.setdefault(b, []).append(i)
    return SetPartition([frozenset(x) for x in blocks.values()])


def stick_breaking_partition_sample(spec, n, rng=None):
    """Partition of ``n`` i.i.d. draws from a stick-breaking random measure."""
    labels = stick_breaking_labels(spec, n, 1, rng)[0]
    return _to_partition(_canonical(labels.tolist()))


def pd_cross_check(alpha, theta, n, draws, rng=None):
    """Compare stick-breaking partition frequencies with the jump-law EPPF.

    Every set partition of ``{1..n}`` is a category; the report's left value
    is the largest absolute standardised deviation
    ``(count - N p) / sqrt(N p (1-p))`` and the tolerance is 3.
    """
    if n > MAX_CROSS_CHECK_N:
        raise DomainError(f"pd_cross_check supports n <= {MAX_CROSS_CHECK_N}, got {n}")
    spec = StickBreakingSpec(alpha, theta)
    family = pd_family(alpha, theta)
    family.check_normalization(1e-9)
    labels = stick_breaking_labels(spec, n, draws, rng)
    counts = {}
    for row in labels.tolist():
        key = _canonical(row)
        counts[key] = counts.get(key, 0) + 1
    worst, worst_key, total_p = 0.0, None, 0.0
    for part in enumerate_set_partitions(n):
        key = part.canonical_labels()
        p = eppf(family, part.sizes)
        total_p += p
        sd = math.sqrt(draws * p * (1.0 - p)) if p < 1.0 else 1.0
        z = abs(counts.pop(key, 0) - draws * p) / sd
        if z > worst:
            worst, worst_key = z, key
    if counts:
        raise AssertionError(f"sampled partitions outside the enumeration: {list(counts)[:3]}")
    return IdentityReport(
        f"stick breaking vs EPPF, alpha={alpha:g}, theta={theta:g}, n={n}",
        worst, 0.0, 3.0,
        method=f"Monte Carlo, {draws} draws; max |standardised deviation| over set partitions",
        notes=f"worst partition labels {list(worst_key) if worst_key else None}; sum of EPPF = {total_p:.12f}",
    )
