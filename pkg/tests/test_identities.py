import dataclasses
import json
import math

import numpy as np
import pytest

from spatial_ntr import BaselineMeasure, BetaProcess, DirichletGenerating, GeneralizedGamma, WeibullHazard
from spatial_ntr.errors import ConfigurationError, DomainError
from spatial_ntr.families import BetaSchedule, ExponentialSchedule
from spatial_ntr.identities import (
    IdentityReport,
    batch_mean_se,
    corollary_moment_sum,
    mc_product_moment,
    moment_closed_form,
    nested_integral_L,
    run_identity_suite,
    schedule_eppf,
    special_partition_probabilities,
)
from spatial_ntr.partitions import compositions, ewens_eppf, integer_partitions, ordered_eppf

STABLE = GeneralizedGamma(0.5, 0.0)
DIR1 = DirichletGenerating(1.0)


@pytest.mark.parametrize(
    "fam, n, expected",
    [(STABLE, 0, 1.0), (STABLE, 2, math.sqrt(2)), (STABLE, 3, math.sqrt(6)), (DIR1, 2, 1.5)],
    ids=str,
)
def test_moment_closed_form_examples(fam, n, expected):
    assert moment_closed_form(fam, n) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize(
    "fam, n, mode, expected",
    [(STABLE, 2, "all_ties", math.sqrt(2) - 1), (DIR1, 2, "all_ties", 0.5), (STABLE, 1, "no_ties", 1.0),
     (BetaProcess(1.0), 1, "no_ties", 1.0)],
    ids=str,
)
def test_special_partition_examples(fam, n, mode, expected):
    assert special_partition_probabilities(fam, n, mode) == pytest.approx(expected, rel=1e-13)


def test_equal_cells_matches_ordered_eppf_sum(family):
    # one given set partition of 4 into two pairs: 2! orderings of equal sizes
    direct = 2 * ordered_eppf(family, (2, 2))
    assert special_partition_probabilities(family, 4, "equal_cells", 2) == pytest.approx(direct, rel=1e-12)
    no_ties = math.factorial(3) * ordered_eppf(family, (1, 1, 1))
    assert special_partition_probabilities(family, 3, "no_ties") == pytest.approx(no_ties, rel=1e-12)
    with pytest.raises(DomainError):
        special_partition_probabilities(family, 4, "equal_cells", 3)


def test_nested_integral_dirichlet_example():
    assert nested_integral_L(DIR1, m=(1, 1)) == pytest.approx(0.25, abs=1e-6)


def test_nested_integral_equals_ordered_eppf(family):
    for m in [(1,), (2,), (1, 2), (2, 1), (1, 1, 1)]:
        assert nested_integral_L(family, m=m) == pytest.approx(ordered_eppf(family, m), rel=1e-8)


def test_nested_integral_invariant_to_baseline():
    wb = BaselineMeasure(WeibullHazard(2.0, 1.5))
    for m in [(1, 1), (2, 1)]:
        assert nested_integral_L(BetaProcess(1.0), wb, None, m) == pytest.approx(ordered_eppf(BetaProcess(1.0), m), rel=1e-8)


def test_corollary_stable_n2():
    assert corollary_moment_sum(STABLE, 2) == pytest.approx(math.sqrt(2), abs=1e-5)


def test_nested_depth_limit():
    with pytest.raises(DomainError):
        nested_integral_L(DIR1, m=(1, 1, 1, 1, 1))


@pytest.mark.parametrize("theta", [1.0, 2.0])
def test_exponential_schedule_recovers_ewens(theta):
    sched = ExponentialSchedule(theta)
    for n in range(1, 5):
        for sizes in integer_partitions(n):
            assert schedule_eppf(sched, sizes) == pytest.approx(ewens_eppf(theta, sizes), abs=1e-5)


def test_constant_schedule_is_homogeneous_beta_process():
    sched, fam = BetaSchedule(lambda s: 2.0), BetaProcess(2.0)
    for m in [(1, 1), (2, 1)]:
        assert nested_integral_L(sched, m=m) == pytest.approx(ordered_eppf(fam, m), rel=1e-8)


def test_batch_mean_se():
    rng = np.random.default_rng(0)
    x = rng.normal(3.0, 2.0, size=100_000)
    mean, se = batch_mean_se(x)
    assert mean == pytest.approx(x.mean())
    assert se == pytest.approx(2.0 / math.sqrt(x.size), rel=0.3)


def test_mc_product_moment_n3():
    rng = np.random.default_rng(13)
    mean, se = batch_mean_se(mc_product_moment(STABLE, 3, 100_000, rng))
    assert abs(mean - math.sqrt(6)) < 3 * se


def test_identity_report_fields():
    good = IdentityReport("x", 1.0, 1.0 + 1e-12, 1e-9)
    bad = IdentityReport("y", 1.0, 2.0, 0.1, relative=True)
    assert good.passed and not bad.passed
    assert bad.rel_err == pytest.approx(0.5)
    assert json.loads(json.dumps(good.to_dict()))["passed"] is True
    assert not IdentityReport("nan", math.nan, 1.0, 1.0).passed


def test_default_suite_on_dirichlet_passes():
    reports = run_identity_suite(DIR1, "default", seed=0)
    assert reports and all(r.passed for r in reports), [r.row() for r in reports if not r.passed]
    assert any(r.name.startswith("EPPF = Ewens") for r in reports)


def test_suite_deterministic_and_worker_independent():
    a = [r.to_dict() for r in run_identity_suite(STABLE, "quick", seed=7)]
    b = [r.to_dict() for r in run_identity_suite(STABLE, "quick", seed=7, workers=3)]
    assert a == b


def test_unknown_suite():
    with pytest.raises(ConfigurationError):
        run_identity_suite(DIR1, "nope")


@dataclasses.dataclass(frozen=True)
class CorruptedPhi(BetaProcess):
    """Negative control: phi perturbed away from its integral definition."""

    def phi(self, omega, method="auto"):
        return super().phi(omega, method) * (1.0 + 1e-3 * omega)


def test_negative_control_corrupted_phi_is_flagged():
    reports = run_identity_suite(CorruptedPhi(1.0), {"algebra": {"i_max": 3, "k_max": 3, "m_max": 3, "r_max": 3}})
    psi = [r for r in reports if "quadrature = phi difference" in r.name]
    assert psi and not psi[0].passed
