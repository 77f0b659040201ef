"""Property-based checks of exact identities over random parameters and states."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from spatial_ntr import BetaProcess, GeneralizedGamma, TwoParamPD
from spatial_ntr.ocrp import factored_seat_probabilities, seat_probabilities
from spatial_ntr.partitions import composition_probability, compositions, enumerate_set_partitions, eppf
from spatial_ntr.posterior import posterior_mean_survival, summarize

families = st.one_of(
    st.builds(BetaProcess, st.floats(0.05, 20.0)),
    st.builds(GeneralizedGamma, st.floats(0.05, 0.95), st.floats(0.0, 5.0)),
    st.builds(GeneralizedGamma, st.floats(-3.0, -0.05), st.floats(0.1, 5.0)),
    st.builds(TwoParamPD, st.floats(0.0, 0.95), st.floats(0.05, 10.0)),
)
states = st.lists(st.integers(1, 4), min_size=0, max_size=6).map(tuple)


@settings(deadline=None)
@given(families, states)
def test_seat_probabilities_sum_to_one(fam, m):
    p, q = seat_probabilities(fam, m)
    assert np.all(p >= 0) and np.all(q >= 0)
    assert abs(p.sum() + q.sum() - 1.0) < 1e-12
    fp, fq = factored_seat_probabilities(fam, m)
    np.testing.assert_allclose(np.concatenate([fp, fq]), np.concatenate([p, q]), rtol=1e-10, atol=1e-300)


@settings(deadline=None)
@given(families, st.integers(1, 6))
def test_eppf_and_compositions_normalised(fam, n):
    assert abs(math.fsum(eppf(fam, p.sizes) for p in enumerate_set_partitions(n)) - 1.0) < 1e-9
    assert abs(math.fsum(composition_probability(fam, m) for m in compositions(n)) - 1.0) < 1e-9


@settings(deadline=None)
@given(families, st.integers(1, 6), st.integers(0, 8))
def test_kappa_recursion_and_monotonicity(fam, m, r):
    left = fam.kappa(m + 1, r)
    right = fam.kappa(m, r) - fam.kappa(m, r + 1)
    assert math.isclose(left, right, rel_tol=1e-9, abs_tol=1e-300)
    assert fam.phi(r + 1) > fam.phi(r) >= 0
    assert 0 < fam.kappa(m + 1, r) / fam.kappa(m, r) <= 1


@settings(deadline=None)
@given(families, st.lists(st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0]), min_size=0, max_size=6))
def test_posterior_survival_monotone_in_unit_interval(fam, data):
    grid = np.linspace(0.0, 4.0, 41)
    v = posterior_mean_survival(fam, None, summarize(data), grid).values
    assert v[0] == 1.0 and np.all(np.diff(v) <= 0) and np.all(v >= 0)
