"""scikit-learn style wrapper around the posterior survival computations."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .baseline import BaselineMeasure, baseline_from_spec, parse_baseline
from .families import JumpLawFamily, family_from_spec, parse_family
from .posterior import (
    PosteriorSimulator,
    posterior_mean_hazard,
    posterior_mean_survival,
    predict_next_mark,
    summarize,
)

__all__ = ["NTRSurvivalEstimator"]


def _resolve_family(family):
    if isinstance(family, JumpLawFamily):
        return family
    if isinstance(family, dict):
        return family_from_spec(family)
    return parse_family(str(family))


def _resolve_baseline(baseline):
    if baseline is None or isinstance(baseline, BaselineMeasure):
        return baseline or BaselineMeasure()
    if isinstance(baseline, dict):
        return baseline_from_spec(baseline)
    return parse_baseline(str(baseline))


def _times(X):
    X = check_array(X, ensure_2d=False, dtype=float, ensure_all_finite=True)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of times, got shape {X.shape}")
        X = X[:, 0]
    return X


class NTRSurvivalEstimator(BaseEstimator):
    """Posterior mean survival under a spatial NTR prior.

    Parameters
    ----------
    family : str, dict or JumpLawFamily
        Jump law, e.g. ``"beta_process:theta=1"``.
    baseline : str, dict or BaselineMeasure, optional
        Prior baseline; the identity hazard by default.
    decimals : int, optional
        Round observed times before detecting ties.
    """

    def __init__(self, family="beta_process:theta=1", baseline=None, decimals=None):
        self.family = family
        self.baseline = baseline
        self.decimals = decimals

    def fit(self, X, y=None):
        """Fit on exact event times ``X``; ``y`` optionally holds the marks."""
        times = _times(X)
        if y is not None and len(y) != times.size:
            raise ValueError(f"got {times.size} times but {len(y)} marks")
        self.family_ = _resolve_family(self.family)
        self.baseline_ = _resolve_baseline(self.baseline)
        marks = None if y is None else list(y)
        self.summary_ = summarize(times.tolist(), marks, decimals=self.decimals)
        self.n_samples_ = times.size
        self.hazard_ = posterior_mean_hazard(self.family_, self.baseline_, self.summary_)
        return self

    def predict(self, X):
        """Posterior mean survival ``E[S(t) | data]`` at the times ``X``."""
        check_is_fitted(self, "summary_")
        t = _times(X)
        order = np.argsort(t)
        values = posterior_mean_survival(self.family_, self.baseline_, self.summary_, t[order]).values
        out = np.empty_like(values)
        out[order] = values
        return out

    def transform(self, X):
        """Posterior mean cumulative hazard at the times ``X``."""
        check_is_fitted(self, "summary_")
        return self.hazard_.cumulative(_times(X))

    def predict_mark(self):
        """Prediction rule for the mark of the next observation."""
        check_is_fitted(self, "summary_")
        return predict_next_mark(self.family_, self.summary_, self.baseline_)

    def sample_survival(self, X, draws=1000, eps=1e-6, horizon=None, random_state=None):
        """Posterior draws of ``S(t)`` at ``X``; one row per draw."""
        check_is_fitted(self, "summary_")
        t = _times(X)
        horizon = float(t.max()) if horizon is None else horizon
        sim = PosteriorSimulator(self.family_, self.baseline_, self.summary_, eps, horizon)
        order = np.argsort(t)
        draws_ = sim.survival_draws(t[order], draws, np.random.default_rng(random_state))
        out = np.empty_like(draws_)
        out[:, order] = draws_
        return out
