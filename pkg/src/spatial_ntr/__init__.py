"""Spatial neutral-to-the-right processes.

Exact partition probabilities, ordered Chinese-restaurant sampling,
marginal dataset simulation, posterior survival estimation and
identity-based verification.
"""

from .baseline import BaselineMeasure, IdentityHazard, WeibullHazard, baseline_from_spec, parse_baseline
from .errors import ConfigurationError, ConvergenceError, DomainError, NTRError, UnsupportedFamilyError
from .estimator import NTRSurvivalEstimator
from .families import (
    BetaProcess,
    BetaSchedule,
    CustomDensity,
    DirichletGenerating,
    ExponentialSchedule,
    GeneralizedGamma,
    JumpLawFamily,
    TwoParamPD,
    family_from_spec,
    kappa,
    parse_family,
    phi,
    psi,
)
from .identities import IdentityReport, nested_integral_L, run_identity_suite
from .marginal import sample_dataset, sample_datasets
from .ocrp import sample_ocrp, seat_probabilities
from .partitions import OrderedPartition, SetPartition, composition_probability, eppf, ordered_eppf
from .pd_bridge import pd_cross_check
from .posterior import (
    kaplan_meier,
    posterior_mean_survival,
    predict_next_mark,
    sample_posterior_hazard,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineMeasure", "IdentityHazard", "WeibullHazard", "baseline_from_spec", "parse_baseline",
    "NTRError", "DomainError", "ConfigurationError", "UnsupportedFamilyError", "ConvergenceError",
    "NTRSurvivalEstimator",
    "JumpLawFamily", "BetaProcess", "GeneralizedGamma", "TwoParamPD", "DirichletGenerating", "CustomDensity",
    "BetaSchedule", "ExponentialSchedule", "phi", "psi", "kappa", "family_from_spec", "parse_family",
    "IdentityReport", "nested_integral_L", "run_identity_suite",
    "sample_dataset", "sample_datasets", "sample_ocrp", "seat_probabilities",
    "OrderedPartition", "SetPartition", "eppf", "ordered_eppf", "composition_probability",
    "pd_cross_check",
    "summarize", "posterior_mean_survival", "sample_posterior_hazard", "predict_next_mark", "kaplan_meier",
]
