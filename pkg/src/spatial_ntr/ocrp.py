"""Ordered generalized Chinese restaurant process.

Customers arrive one at a time.  Customer ``n + 1`` either joins the table
of rank ``j`` (probability ``p_j``) or opens a new table that becomes rank
``j`` among ``k + 1`` (probability ``q_j``), pushing existing ranks ``>= j``
down by one.  Both probabilities are ratios of ranked-partition
probabilities, so the law of the final seating is exactly ``pi(m)`` for the
labelled ranked partition.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .partitions import OrderedPartition, _log_ordered_eppf, _require_homogeneous
from .rng import as_generator

__all__ = [
    "SeatingState",
    "seat_probabilities",
    "factored_seat_probabilities",
    "sample_ocrp",
    "sample_ocrp_path",
]


@dataclass
class SeatingState:
    """Ranked table sizes ``m`` and the rank of every seated customer."""

    m: list[int] = field(default_factory=list)
    labels: list[int] = field(default_factory=list)

    @property
    def n(self):
        return len(self.labels)

    def seat(self, choice):
        """Apply category ``choice`` in ``[0, 2k]``: joins first, then new ranks."""
        k = len(self.m)
        if choice < k:
            self.m[choice] += 1
            self.labels.append(choice + 1)
        else:
            rank = choice - k + 1
            self.m.insert(rank - 1, 1)
            self.labels = [lab + 1 if lab >= rank else lab for lab in self.labels]
            self.labels.append(rank)

    def to_partition(self):
        return OrderedPartition(tuple(self.m), tuple(self.labels))


def _sizes(state):
    if isinstance(state, SeatingState):
        return tuple(state.m)
    if isinstance(state, OrderedPartition):
        return state.m
    return tuple(int(x) for x in state)


@functools.lru_cache(maxsize=1 << 16)
def _log_step_probabilities(family, m):
    k = len(m)
    if k == 0:
        return np.zeros(0), np.zeros(1)
    base = _log_ordered_eppf(family, m)
    log_p = np.empty(k)
    for j in range(k):
        grown = m[:j] + (m[j] + 1,) + m[j + 1:]
        log_p[j] = _log_ordered_eppf(family, grown) - base
    log_q = np.empty(k + 1)
    for j in range(k + 1):
        log_q[j] = _log_ordered_eppf(family, m[:j] + (1,) + m[j:]) - base
    log_p.flags.writeable = False
    log_q.flags.writeable = False
    return log_p, log_q


def seat_probabilities(family, state):
    """Return ``(p, q)`` for the next customer.

    ``p[j]`` joins the table of rank ``j + 1``; ``q[j]`` opens a new table
    at rank ``j + 1`` (``q`` has one more entry than ``p``).
    """
    _require_homogeneous(family)
    log_p, log_q = _log_step_probabilities(family, _sizes(state))
    return np.exp(log_p), np.exp(log_q)


def factored_seat_probabilities(family, state):
    """Seat probabilities from the explicit kappa/phi products.

    Independent of :func:`seat_probabilities`, which uses ratios of full
    partition probabilities.
    """
    _require_homogeneous(family)
    m = _sizes(state)
    k = len(m)
    r = np.cumsum((0,) + m).tolist()  # r[0] = 0, r[j] = m_1 + ... + m_j
    n = r[-1]
    if k == 0:
        return np.zeros(0), np.ones(1)

    def shifted(j):
        # prod_{l >= j} kappa(m_l, r_{l-1}+1) phi(r_l) / (kappa(m_l, r_{l-1}) phi(r_l+1))
        out = 1.0
        for l in range(j, k + 1):
            out *= family.kappa(m[l - 1], r[l - 1] + 1) / family.kappa(m[l - 1], r[l - 1])
            out *= family.phi(r[l]) / family.phi(r[l] + 1)
        return out

    p = np.empty(k)
    for j in range(1, k + 1):
        lead = family.kappa(m[j - 1] + 1, r[j - 1]) / family.kappa(m[j - 1], r[j - 1])
        lead *= family.phi(r[j]) / family.phi(r[j] + 1)
        p[j - 1] = lead * shifted(j + 1)
    q = np.empty(k + 1)
    for j in range(1, k + 1):
        q[j - 1] = family.kappa(1, r[j - 1]) / family.phi(r[j - 1] + 1) * shifted(j)
    q[k] = family.kappa(1, n) / family.phi(n + 1)
    return p, q


@functools.lru_cache(maxsize=1 << 16)
def _cumulative(family, m):
    log_p, log_q = _log_step_probabilities(family, m)
    probs = np.exp(np.concatenate([log_p, log_q]))
    return np.cumsum(probs).tolist(), np.concatenate([log_p, log_q]).tolist()


def sample_ocrp_path(family, n, rng=None):
    """Seat ``n`` customers; return the partition and per-step log probabilities."""
    _require_homogeneous(family)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    rng = as_generator(rng)
    state = SeatingState()
    steps = []
    for _ in range(n):
        cum, logs = _cumulative(family, tuple(state.m))
        u = rng.random() * cum[-1]
        choice = min(bisect.bisect_right(cum, u), len(cum) - 1)
        steps.append(logs[choice])
        state.seat(choice)
    return state.to_partition(), steps


def sample_ocrp(family, n, rng=None):
    """Draw a labelled ranked partition of ``n`` customers."""
    return sample_ocrp_path(family, n, rng)[0]


def path_log_probability(steps):
    return math.fsum(steps)
