"""Set partitions, ranked partitions and their exact probabilities.

A ranked (ordered) partition lists block sizes ``m = (m_1, ..., m_k)`` with
rank 1 attached to the largest time.  Its probability under a homogeneous
jump law is

    pi(m) = prod_j kappa(m_j, r_{j-1}) / prod_j phi(r_j),   r_j = m_1 + ... + m_j,

and the exchangeable partition probability of a partition with block sizes
``e`` sums ``pi`` over every ordering of its blocks.  Products are formed
in log space.
"""

from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, UnsupportedFamilyError
from .families import BetaSchedule, JumpLawFamily

__all__ = [
    "OrderedPartition",
    "SetPartition",
    "MAX_ENUMERATION_N",
    "log_ordered_eppf",
    "ordered_eppf",
    "eppf",
    "log_eppf",
    "composition_probability",
    "enumerate_set_partitions",
    "compositions",
    "integer_partitions",
    "distinct_permutations",
    "ewens_eppf",
    "bell_number",
    "parse_sizes",
]

MAX_ENUMERATION_N = 12


@dataclass(frozen=True)
class OrderedPartition:
    """Block sizes by rank, optionally with a rank for every item.

    ``labels[i]`` is the (1-based) rank of the block holding item ``i + 1``.
    """

    m: tuple[int, ...]
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        object.__setattr__(self, "m", m)
        if not m or min(m) < 1:
            raise DomainError(f"block sizes must be positive, got {m}")
        if self.labels is not None:
            labels = tuple(int(x) for x in self.labels)
            object.__setattr__(self, "labels", labels)
            counts = Counter(labels)
            if len(labels) != sum(m) or any(counts[j + 1] != mj for j, mj in enumerate(m)):
                raise DomainError(f"labels {labels} do not match block sizes {m}")

    @property
    def n(self):
        return sum(self.m)

    @property
    def k(self):
        return len(self.m)

    @property
    def r(self):
        """Cumulative counts ``(r_1, ..., r_k)``; ``r_k = n``."""
        return tuple(np.cumsum(self.m).tolist())

    @property
    def r_prev(self):
        """``(r_0, ..., r_{k-1})`` with ``r_0 = 0``."""
        return (0,) + self.r[:-1]

    def blocks(self):
        """Item sets by rank (requires labels)."""
        if self.labels is None:
            raise DomainError("partition carries no labels")
        out = [set() for _ in self.m]
        for i, rank in enumerate(self.labels, start=1):
            out[rank - 1].add(i)
        return [frozenset(b) for b in out]

    def to_set_partition(self):
        return SetPartition(tuple(self.blocks()))


@dataclass(frozen=True)
class SetPartition:
    """Unordered partition of ``{1, ..., n}`` into disjoint non-empty blocks."""

    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=min))
        object.__setattr__(self, "blocks", blocks)
        items = [i for b in blocks for i in b]
        if any(not b for b in blocks) or sorted(items) != list(range(1, len(items) + 1)):
            raise DomainError("blocks must be non-empty, disjoint and cover 1..n")

    @property
    def n(self):
        return sum(len(b) for b in self.blocks)

    @property
    def sizes(self):
        return tuple(len(b) for b in self.blocks)

    def canonical_labels(self):
        """Block index (0-based, blocks ordered by smallest item) of each item."""
        out = [0] * self.n
        for b, block in enumerate(self.blocks):
            for i in block:
                out[i - 1] = b
        return tuple(out)

    @classmethod
    def from_labels(cls, labels):
        groups = {}
        for i, lab in enumerate(labels, start=1):
            groups.setdefault(lab, set()).add(i)
        return cls(tuple(frozenset(g) for g in groups.values()))


def _require_homogeneous(family):
    if isinstance(family, BetaSchedule) or not isinstance(family, JumpLawFamily):
        raise UnsupportedFamilyError(
            "closed-form partition probabilities need a homogeneous family; "
            "use identities.nested_integral_L for schedules"
        )


def _as_sizes(m):
    if isinstance(m, OrderedPartition):
        return m.m
    sizes = tuple(int(x) for x in m)
    if not sizes:
        raise DomainError("at least one block is required")
    if min(sizes) < 1:
        raise DomainError(f"block sizes must be positive, got {sizes}")
    return sizes


@functools.lru_cache(maxsize=1 << 16)
def _log_ordered_eppf(family, m):
    total = 0.0
    r = 0
    for mj in m:
        total += family.log_kappa(mj, r)
        r += mj
        total -= math.log(family.phi(r))
    return total


def log_ordered_eppf(family, m):
    """Log probability of the ranked partition ``m``."""
    _require_homogeneous(family)
    return _log_ordered_eppf(family, _as_sizes(m))


def ordered_eppf(family, m):
    """Probability of one labelled partition with blocks ranked as ``m``."""
    return math.exp(log_ordered_eppf(family, m))


def distinct_permutations(items):
    """Yield each distinct ordering of a multiset once."""
    counts = Counter(items)
    keys = sorted(counts)
    n = len(items)

    def rec(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for key in keys:
            if counts[key]:
                counts[key] -= 1
                prefix.append(key)
                yield from rec(prefix)
                prefix.pop()
                counts[key] += 1

    yield from rec([])


@functools.lru_cache(maxsize=1 << 14)
def _log_eppf(family, sizes):
    # Orderings of equal-sized blocks give equal terms; weight each distinct
    # size sequence by the number of block orderings mapping onto it.
    log_mult = sum(math.lgamma(c + 1) for c in Counter(sizes).values())
    terms = [_log_ordered_eppf(family, perm) for perm in distinct_permutations(sizes)]
    return log_mult + special.logsumexp(terms)


def log_eppf(family, sizes):
    _require_homogeneous(family)
    sizes = _as_sizes(sizes)
    return _log_eppf(family, tuple(sorted(sizes, reverse=True)))


def eppf(family, sizes):
    """Exchangeable partition probability of a partition with block sizes ``sizes``."""
    return math.exp(log_eppf(family, sizes))


def composition_probability(family, m):
    """Probability of the ranked size vector ``m`` summed over labellings.

    Equals ``n! / prod(m_j!) * ordered_eppf(m)``; it sums to one over the
    compositions of ``n``.
    """
    sizes = _as_sizes(m)
    n = sum(sizes)
    log_coef = math.lgamma(n + 1) - sum(math.lgamma(x + 1) for x in sizes)
    return math.exp(log_coef + log_ordered_eppf(family, sizes))


def compositions(n) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of positive integers summing to ``n``."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


def integer_partitions(n, largest=None) -> Iterator[tuple[int, ...]]:
    """Nonincreasing tuples of positive integers summing to ``n``."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n == 0:
        yield ()
        return
    top = n if largest is None else min(n, largest)
    for first in range(top, 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def enumerate_set_partitions(n) -> Iterator[SetPartition]:
    """Every set partition of ``{1..n}`` exactly once (``n <= 12``)."""
    if n > MAX_ENUMERATION_N:
        raise DomainError(
            f"refusing to enumerate set partitions of n={n}: Bell({n}) is too large "
            f"(ceiling n={MAX_ENUMERATION_N})"
        )
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    # Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[:i]).
    a = [0] * n

    def rec(i, top):
        if i == n:
            yield SetPartition.from_labels(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


@functools.lru_cache(maxsize=None)
def bell_number(n):
    if n == 0:
        return 1
    return sum(math.comb(n - 1, k) * bell_number(k) for k in range(n))


def ewens_eppf(theta, sizes: Sequence[int]):
    """Ewens sampling formula ``theta**k Gamma(theta) / Gamma(theta+n) prod Gamma(e_j)``."""
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    sizes = _as_sizes(sizes)
    n = sum(sizes)
    log_p = (
        len(sizes) * math.log(theta)
        + math.lgamma(theta)
        - math.lgamma(theta + n)
        + sum(math.lgamma(e) for e in sizes)
    )
    return math.exp(log_p)


def parse_sizes(text):
    """Parse ``"3,1,1"`` into ``(3, 1, 1)``."""
    parts = [p.strip() for p in str(text).split(",")]
    if not text or not any(parts):
        raise DomainError("empty partition")
    try:
        sizes = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise DomainError(f"bad partition {text!r}: {exc}") from exc
    return _as_sizes(sizes)
