import math

import numpy as np
import pytest

from spatial_ntr import DirichletGenerating, TwoParamPD
from spatial_ntr.errors import ConfigurationError, DomainError
from spatial_ntr.identities import run_identity_suite
from spatial_ntr.partitions import enumerate_set_partitions, eppf, ewens_eppf
from spatial_ntr.pd_bridge import (
    StickBreakingSpec,
    pd_cross_check,
    pd_family,
    pd_rho_tail,
    stick_breaking_labels,
    stick_breaking_partition_sample,
)


def test_tail_example_and_limits():
    assert pd_rho_tail(0.0, 1.0, 0.5) == pytest.approx(1.0, rel=1e-14)
    assert pd_rho_tail(0.3, 1.0, 1 - 1e-12) < 1e-10
    with pytest.raises(DomainError):
        pd_rho_tail(0.3, 1.0, 1.0)


@pytest.mark.parametrize("alpha, theta", [(0.0, 1.0), (0.3, 1.0), (0.5, 2.0)])
def test_tail_derivative_is_density(alpha, theta):
    fam = pd_family(alpha, theta)
    for u in (0.2, 0.5, 0.8):
        h = 1e-6
        deriv = -(pd_rho_tail(alpha, theta, u + h) - pd_rho_tail(alpha, theta, u - h)) / (2 * h)
        assert deriv == pytest.approx(fam.rho(u), rel=1e-6)
    if alpha == 0.0:
        assert fam.rho(0.5) == pytest.approx(theta * (theta + 1) * 0.5 ** (theta - 1))


def test_pd_family_alpha_zero_is_dirichlet():
    assert isinstance(pd_family(0.0, 2.0), DirichletGenerating)
    assert isinstance(pd_family(0.3, 1.0), TwoParamPD)


def test_invalid_stick_spec():
    with pytest.raises(ConfigurationError):
        StickBreakingSpec(1.0, 1.0)
    with pytest.raises(ConfigurationError):
        StickBreakingSpec(0.0, 0.0)


def test_single_observation_single_block(rng):
    for _ in range(5):
        assert stick_breaking_partition_sample(StickBreakingSpec(0.3, 1.0), 1, rng).sizes == (1,)


def _pair_apart(alpha, theta, draws, seed):
    labels = stick_breaking_labels(StickBreakingSpec(alpha, theta), 2, draws, np.random.default_rng(seed))
    return np.mean(labels[:, 0] != labels[:, 1])


def test_large_theta_singletons_dominate():
    draws = 100_000
    p = 50 / 51
    est = _pair_apart(0.0, 50.0, draws, 1)
    assert abs(est - p) < 3 * math.sqrt(p * (1 - p) / draws)
    assert est == pytest.approx(0.980, abs=0.003)


def test_dirichlet_pair_together_half():
    draws = 100_000
    est = 1 - _pair_apart(0.0, 1.0, draws, 2)
    assert abs(est - 0.5) < 3 * math.sqrt(0.25 / draws)


def test_dirichlet_n4_double_oracle():
    rep = pd_cross_check(0.0, 1.0, 4, 100_000, np.random.default_rng(3))
    assert rep.passed, rep.notes
    fam = DirichletGenerating(1.0)
    parts = list(enumerate_set_partitions(4))
    assert len(parts) == 15
    for p in parts:
        assert eppf(fam, p.sizes) == pytest.approx(ewens_eppf(1.0, p.sizes), rel=1e-12)


def test_alpha_half_theta_zero_normalisation():
    fam = pd_family(0.5, 0.0)
    assert math.fsum(eppf(fam, p.sizes) for p in enumerate_set_partitions(3)) == pytest.approx(1.0, abs=1e-9)


def test_cross_check_limit():
    with pytest.raises(DomainError):
        pd_cross_check(0.3, 1.0, 9, 10)


def test_labels_cover_every_observation():
    labels = stick_breaking_labels(StickBreakingSpec(0.5, 0.0), 6, 500, np.random.default_rng(4))
    assert labels.min() >= 0 and labels.shape == (500, 6)


def test_pd_suite_runs():
    reports = run_identity_suite(TwoParamPD(0.3, 1.0), "pd", seed=0)
    assert all(r.passed for r in reports), [r.row() for r in reports if not r.passed]
    with pytest.raises(ConfigurationError):
        run_identity_suite(TwoParamPD(0.3, 1.0), {"bogus": {}})
