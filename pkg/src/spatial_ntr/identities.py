"""Oracles built on exact identities: moments, nested integrals, special partitions.

Every check returns an :class:`IdentityReport` recording both sides, the
discrepancy, the tolerance and how each side was computed.
"""

from __future__ import annotations

import functools
import logging
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np

from .baseline import BaselineMeasure
from .errors import ConfigurationError, DomainError, NTRError
from .families import (
    BetaSchedule,
    JumpLawFamily,
    TwoParamPD,
    _quad,
    levy_integral,
)
from .ocrp import sample_ocrp
from .partitions import (
    compositions,
    distinct_permutations,
    enumerate_set_partitions,
    eppf,
    ewens_eppf,
    integer_partitions,
    ordered_eppf,
)
from .rng import draw_stream

log = logging.getLogger(__name__)

__all__ = [
    "IdentityReport",
    "moment_closed_form",
    "HomogeneousFunctionals",
    "ScheduleFunctionals",
    "nested_integral_L",
    "schedule_eppf",
    "corollary_moment_sum",
    "special_partition_probabilities",
    "mc_product_moment",
    "batch_mean_se",
    "run_identity_suite",
    "SUITES",
]

MAX_NESTED_DEPTH = 4


@dataclass
class IdentityReport:
    """Outcome of one identity check.

    ``passed`` is ``abs_err <= tolerance`` when ``relative`` is false and
    ``rel_err <= tolerance`` otherwise.
    """

    name: str
    left: float
    right: float
    tolerance: float
    relative: bool = False
    method: str = ""
    notes: str = ""
    abs_err: float = field(init=False)
    rel_err: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.left, self.right = float(self.left), float(self.right)
        self.abs_err = abs(self.left - self.right)
        self.rel_err = self.abs_err / max(abs(self.right), 1e-300)
        err = self.rel_err if self.relative else self.abs_err
        self.passed = bool(np.isfinite(err) and err <= self.tolerance)

    def to_dict(self):
        return asdict(self)

    def row(self):
        flag = "PASS" if self.passed else "FAIL"
        kind = "rel" if self.relative else "abs"
        err = self.rel_err if self.relative else self.abs_err
        return f"{flag}  {self.name:<44s} {self.left:>16.10g} {self.right:>16.10g}  {kind} {err:.2e} <= {self.tolerance:.1e}"


def _failed(name, exc, method=""):
    rep = IdentityReport(name, math.nan, math.nan, 0.0, method=method, notes=f"{type(exc).__name__}: {exc}")
    return rep


# -- closed forms ----------------------------------------------------------------------


def moment_closed_form(family, n):
    """``E[I**n] = n! / prod_{j<=n} phi(j)`` for ``I = int exp(-Z(t)) dt``, identity hazard."""
    if int(n) != n or n < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {n!r}")
    n = int(n)
    return math.exp(math.lgamma(n + 1) - math.fsum(math.log(family.phi(j)) for j in range(1, n + 1)))


def special_partition_probabilities(family, n, mode="no_ties", k=None):
    """Closed-form partition probabilities.

    ``no_ties``: probability that all ``n`` observations are distinct.
    ``all_ties``: probability that all coincide.
    ``equal_cells``: probability of one given set partition into ``n / k``
    blocks of size ``k``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if mode == "no_ties":
        logv = math.lgamma(n + 1)
        logv += math.fsum(family.log_kappa(1, j - 1) - math.log(family.phi(j)) for j in range(1, n + 1))
        return math.exp(logv)
    if mode == "all_ties":
        return family.kappa(n, 0) / family.phi(n)
    if mode == "equal_cells":
        if k is None or int(k) != k or k < 1 or n % int(k):
            raise DomainError(f"equal_cells needs a block size k dividing n={n}, got {k!r}")
        k = int(k)
        blocks = n // k
        logv = math.lgamma(blocks + 1)
        logv += math.fsum(
            family.log_kappa(k, (j - 1) * k) - math.log(family.phi(j * k)) for j in range(1, blocks + 1)
        )
        return math.exp(logv)
    raise DomainError(f"unknown mode {mode!r}; expected no_ties, all_ties or equal_cells")


# -- nested integrals ------------------------------------------------------------------


class HomogeneousFunctionals:
    """Functionals of a homogeneous family on the ``Lambda0`` scale ``a``."""

    def __init__(self, family):
        self.family = family
        self._kappa = functools.lru_cache(maxsize=None)(family.kappa)
        self._psi = functools.lru_cache(maxsize=None)(family.psi)
        self._phi = functools.lru_cache(maxsize=None)(family.phi)

    def kappa(self, m, r, a):
        return self._kappa(m, r)

    def cumulative_psi(self, i, k, a):
        return self._psi(i, k) * a

    def rate(self, r, a):
        return self._phi(r)


class ScheduleFunctionals:
    """Functionals of a beta schedule; time enters through ``s = Lambda0^{-1}(a)``."""

    def __init__(self, schedule, baseline=None):
        if not isinstance(schedule, BetaSchedule):
            raise ConfigurationError(f"expected a BetaSchedule, got {type(schedule).__name__}")
        self.schedule = schedule
        self.baseline = baseline or BaselineMeasure()
        self._identity = self.baseline.is_identity

    def _time(self, a):
        return a if self._identity else float(self.baseline.inverse_hazard(a))

    def kappa(self, m, r, a):
        return self.schedule.kappa(m, r, self._time(a))

    def cumulative_psi(self, i, k, a):
        density = None if self._identity else self.baseline.hazard.density
        return self.schedule.integrated_psi(i, k, self._time(a), density)

    def rate(self, r, a):
        return self.schedule.psi(r, 0, self._time(a))


def nested_integral_L(functionals, baseline=None, g=None, m=(1,), epsrel=1e-10, epsabs=1e-13, damping=0.1):
    """Nested integral over ranked times ``t_1 > ... > t_k > 0``.

    The integrand is ``g(t) prod_j kappa(m_j, r_{j-1} | t_j) lambda0(t_j)
    exp(-sum_j int_0^{t_j} psi(m_j, r_{j-1} | s) Lambda0(ds))``; with
    ``g = 1`` this is the probability of the ranked partition ``m``.

    Increments of ``Lambda0(t)`` between consecutive ranks are mapped to the
    unit interval by ``v = exp(-damping * lambda * x)`` with ``lambda`` the
    local decay rate ``phi(r_j)``.  With ``damping = 1`` a homogeneous
    family with ``g = 1`` integrates a constant; the default ``0.1`` leaves
    a factor ``v**9`` per level, which flattens the ``log(v)`` endpoint
    singularities produced by polynomial ``g``.  ``g`` receives the ranked times on the
    original time scale.  ``functionals`` may be a family, a schedule or a
    provider such as :class:`HomogeneousFunctionals`.
    """
    if isinstance(functionals, JumpLawFamily):
        functionals = HomogeneousFunctionals(functionals)
    elif isinstance(functionals, BetaSchedule):
        functionals = ScheduleFunctionals(functionals, baseline)
    baseline = baseline or BaselineMeasure()
    m = tuple(int(x) for x in m)
    k = len(m)
    if k == 0 or min(m) < 1:
        raise DomainError(f"m must be a nonempty composition, got {m}")
    if k > MAX_NESTED_DEPTH:
        raise DomainError(f"nested integrals are limited to {MAX_NESTED_DEPTH} ranks, got {k}")
    r = np.concatenate([[0], np.cumsum(m)]).astype(int).tolist()

    def to_time(a_vals):
        if baseline.is_identity:
            return np.asarray(a_vals, dtype=float)
        return np.asarray(baseline.inverse_hazard(np.asarray(a_vals, dtype=float)), dtype=float)

    def level(j, a_next, acc):
        # integrate over the increment x_j = a_j - a_{j+1} (a_{k+1} = 0)
        beta = damping * functionals.rate(r[j], a_next)
        mj, rj = m[j - 1], r[j - 1]

        def integrand(v):
            if v <= 0.0:
                return 0.0
            a = a_next - math.log(v) / beta
            # dx = dv / (beta v) and v = exp(-beta (a - a_next))
            damp = math.exp(-functionals.cumulative_psi(mj, rj, a) + beta * (a - a_next))
            if damp == 0.0:
                return 0.0
            weight = functionals.kappa(mj, rj, a) * damp / beta
            values = acc + (a,)
            if j == 1:
                gv = 1.0 if g is None else g(to_time(values[::-1]))
                return weight * gv
            return weight * level(j - 1, a, values)

        val, _ = _quad(integrand, 0.0, 1.0, epsabs, epsrel)
        return val

    return level(k, 0.0, ())


def schedule_eppf(schedule, sizes, baseline=None, **kwargs):
    """EPPF for a beta schedule: nested integrals summed over distinct orderings."""
    sizes = tuple(int(x) for x in sizes)
    mult = math.prod(math.factorial(c) for c in Counter(sizes).values())
    total = math.fsum(nested_integral_L(schedule, baseline, None, perm, **kwargs)
                      for perm in distinct_permutations(sizes))
    return mult * total


# -- Monte Carlo helpers ----------------------------------------------------------------


def batch_mean_se(values, batches=50):
    """Mean and batch-means standard error."""
    values = np.asarray(values, dtype=float)
    b = min(batches, values.size)
    if b < 2:
        return float(values.mean()), math.inf
    means = np.array([chunk.mean() for chunk in np.array_split(values, b)])
    return float(values.mean()), float(means.std(ddof=1) / math.sqrt(b))


def mc_product_moment(family, n, draws, rng):
    """Per-draw values of ``prod_i T_i`` for datasets of size ``n`` (identity hazard)."""
    parts = [sample_ocrp(family, n, rng).m for _ in range(draws)]
    groups = defaultdict(list)
    for i, m in enumerate(parts):
        groups[m].append(i)
    out = np.empty(draws)
    for m, idx in groups.items():
        rates = np.array([family.phi(r) for r in np.cumsum(m)])
        gaps = rng.exponential(1.0 / rates, size=(len(idx), len(m)))
        times = np.cumsum(gaps[:, ::-1], axis=1)[:, ::-1]
        out[idx] = np.prod(times ** np.asarray(m), axis=1)
    return out


# -- suites -------------------------------------------------------------------------------

SUITES = {
    "quick": {
        "algebra": {"i_max": 3, "k_max": 4, "m_max": 4, "r_max": 4},
        "normalization": {"n_max": 5},
        "ewens": {"n_max": 5},
        "nested_eppf": {"n_max": 2},
        "corollary": {"n_max": 2},
        "moments_mc": {"orders": [1, 2], "draws": 20000},
    },
    "default": {
        "algebra": {"i_max": 6, "k_max": 12, "m_max": 8, "r_max": 10},
        "normalization": {"n_max": 8},
        "ewens": {"n_max": 7},
        "nested_eppf": {"n_max": 3},
        "corollary": {"n_max": 3},
        "moments_mc": {"orders": [1, 2, 3], "draws": 100000},
    },
    "pd": {
        "pd_phi": {},
        "normalization": {"n_max": 6},
        "ewens": {"n_max": 7},
        "pd_cross_check": {"n": 5, "draws": 200000},
    },
}


def _psi_by_definition(family, i, k):
    """``psi(i, k) = int (1 - e^{-iy}) e^{-ky} tau(dy)`` by quadrature."""
    return levy_integral(
        family.tau,
        lambda y: -math.expm1(-i * y) * math.exp(-k * y),
        g_at_infinity=1.0 if k == 0 else 0.0,
        atom=family.atom_at_one if k == 0 else 0.0,
        epsabs=1e-13,
    )


def _check_algebra(family, cfg):
    reports = []
    worst = (0.0, None)
    for i in range(1, cfg["i_max"] + 1):
        for k in range(cfg["k_max"] + 1):
            left = _psi_by_definition(family, i, k)
            right = family.phi(i + k) - family.phi(k)
            err = abs(left - right) / max(1.0, family.phi(i + k))
            if worst[1] is None or err > worst[0]:
                worst = (err, (i, k, left, right))
    i, k, left, right = worst[1]
    reports.append(IdentityReport(
        f"psi({i},{k}) quadrature = phi difference", left, right, 1e-9, relative=False,
        method="quadrature of the psi integral vs closed-form phi",
        notes=f"worst case over i<={cfg['i_max']}, k<={cfg['k_max']}",
    ))
    worst = (0.0, None)
    for mm in range(2, cfg["m_max"] + 1):
        for rr in range(cfg["r_max"] + 1):
            left = family.kappa(mm, rr)
            right = family.kappa(mm - 1, rr) - family.kappa(mm - 1, rr + 1)
            err = abs(left - right) / left
            if worst[1] is None or err > worst[0]:
                worst = (err, (mm, rr, left, right))
    mm, rr, left, right = worst[1]
    reports.append(IdentityReport(
        f"kappa({mm},{rr}) difference recursion", left, right, 1e-9, relative=True,
        method="kappa(m,r) vs kappa(m-1,r) - kappa(m-1,r+1)",
        notes=f"worst case over m<={cfg['m_max']}, r<={cfg['r_max']}",
    ))
    worst = (0.0, None)
    for rr in range(cfg["k_max"] + 1):
        left, right = family.psi(1, rr), family.kappa(1, rr)
        if worst[1] is None or abs(left - right) > worst[0]:
            worst = (abs(left - right), (rr, left, right))
    rr, left, right = worst[1]
    reports.append(IdentityReport(f"psi(1,{rr}) = kappa(1,{rr})", left, right, 1e-10, method="closed forms"))
    reports.append(IdentityReport(
        "kappa(1,0) = 1 (normalisation of rho)", family.kappa(1, 0, method="quadrature"), 1.0, 1e-9,
        method="quadrature",
    ))
    return reports


def _check_normalization(family, cfg):
    reports = []
    for n in range(1, cfg["n_max"] + 1):
        total = math.fsum(eppf(family, p.sizes) for p in enumerate_set_partitions(n))
        reports.append(IdentityReport(f"sum of EPPF over set partitions, n={n}", total, 1.0, 1e-9,
                                      method="exhaustive enumeration"))
    return reports


def _ewens_theta(family):
    if isinstance(family, TwoParamPD) and family.alpha == 0:
        return family.theta
    return None


def _check_ewens(family, cfg):
    theta = _ewens_theta(family)
    if theta is None:
        return []
    reports = []
    for n in range(1, cfg["n_max"] + 1):
        worst = (0.0, None)
        for sizes in integer_partitions(n):
            left, right = eppf(family, sizes), ewens_eppf(theta, sizes)
            err = abs(left - right) / right
            if worst[1] is None or err > worst[0]:
                worst = (err, (sizes, left, right))
        sizes, left, right = worst[1]
        reports.append(IdentityReport(f"EPPF = Ewens, n={n}, worst sizes {list(sizes)}", left, right, 1e-9,
                                      relative=True, method="ordered EPPF sums vs Ewens formula"))
    return reports


def _check_nested_eppf(family, cfg):
    reports = []
    for n in range(1, cfg["n_max"] + 1):
        worst = (0.0, None)
        for m in compositions(n):
            left = nested_integral_L(family, None, None, m)
            right = ordered_eppf(family, m)
            err = abs(left - right) / right
            if worst[1] is None or err > worst[0]:
                worst = (err, (m, left, right))
        m, left, right = worst[1]
        reports.append(IdentityReport(f"L(1;m) = ordered EPPF, n={n}, worst m={list(m)}", left, right, 1e-7,
                                      relative=True, method="nested adaptive quadrature"))
    return reports


def corollary_moment_sum(family, n, **kwargs):
    """``sum_p sum_m L(prod t_j^{m_j}; m)`` with the identity hazard."""
    total = 0.0
    for m in compositions(n):
        mult = math.exp(math.lgamma(n + 1) - sum(math.lgamma(x + 1) for x in m))
        powers = np.asarray(m, dtype=float)
        total += mult * nested_integral_L(family, None, lambda t, p=powers: float(np.prod(t ** p)), m, **kwargs)
    return total


def _check_corollary(family, cfg):
    reports = []
    for n in range(1, cfg["n_max"] + 1):
        left = corollary_moment_sum(family, n)
        right = moment_closed_form(family, n)
        reports.append(IdentityReport(f"nested-integral moment sum = n!/prod phi(j), n={n}", left, right, 1e-5,
                                      method="nested adaptive quadrature vs closed form"))
    return reports


def _check_moments_mc(family, cfg, rng):
    reports = []
    for n in cfg["orders"]:
        values = mc_product_moment(family, n, cfg["draws"], rng)
        mean, se = batch_mean_se(values)
        right = moment_closed_form(family, n)
        reports.append(IdentityReport(f"E[prod T_i] Monte Carlo, n={n}", mean, right, 3 * se,
                                      method=f"Monte Carlo, {cfg['draws']} datasets, batch-mean SE",
                                      notes=f"SE={se:.3g}"))
    return reports


def _pd_params(family):
    if not isinstance(family, TwoParamPD):
        raise ConfigurationError(f"the pd suite needs a two_param_pd or dirichlet_gen family, got {family.kind}")
    return family.alpha, family.theta


def _check_pd_phi(family, cfg):
    reports = []
    for r in (1, 2, 3, 5, 8):
        reports.append(IdentityReport(f"phi({r}) quadrature of rho = closed form", family.phi(r, method="quadrature"),
                                      family.phi(r), 1e-10, relative=True, method="quadrature vs closed form"))
    reports.append(IdentityReport("kappa(1,0) = 1 for the Poisson-Dirichlet jump law",
                                  family.kappa(1, 0, method="quadrature"), 1.0, 1e-9, method="quadrature"))
    return reports


def _check_pd_cross(family, cfg, rng):
    from .pd_bridge import pd_cross_check

    alpha, theta = _pd_params(family)
    return [pd_cross_check(alpha, theta, cfg["n"], cfg["draws"], rng)]


_CHECKS = {
    "algebra": _check_algebra,
    "normalization": _check_normalization,
    "ewens": _check_ewens,
    "nested_eppf": _check_nested_eppf,
    "corollary": _check_corollary,
    "moments_mc": _check_moments_mc,
    "pd_phi": _check_pd_phi,
    "pd_cross_check": _check_pd_cross,
}
_STOCHASTIC = {"moments_mc", "pd_cross_check"}


def run_identity_suite(family, config="default", seed=0, workers=1):
    """Run a suite of identity checks and return the reports.

    ``config`` is a suite name from :data:`SUITES` or a mapping of check
    names to their options.  Stochastic checks use the stream
    ``(seed, index of the check)``, so results are deterministic given
    ``seed`` and independent of ``workers``.  Failures inside a check are
    recorded as failed reports and the suite continues.
    """
    if isinstance(config, str):
        if config not in SUITES:
            raise ConfigurationError(f"unknown suite {config!r}; expected one of {sorted(SUITES)}")
        config = SUITES[config]
    unknown = set(config) - set(_CHECKS)
    if unknown:
        raise ConfigurationError(f"unknown identity checks {sorted(unknown)}")
    items = list(config.items())

    def run(index):
        name, cfg = items[index]
        try:
            if name in _STOCHASTIC:
                return _CHECKS[name](family, cfg, draw_stream(seed, index))
            return _CHECKS[name](family, cfg)
        except NTRError as exc:
            log.warning("identity check %s failed: %s", name, exc)
            return [_failed(name, exc)]

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, range(len(items))))
    else:
        chunks = [run(i) for i in range(len(items))]
    return [rep for chunk in chunks for rep in chunk]
