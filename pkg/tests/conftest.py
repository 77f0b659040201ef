import numpy as np
import pytest

from spatial_ntr import BetaProcess, DirichletGenerating, GeneralizedGamma, TwoParamPD

# The families used throughout the acceptance criteria.
ACCEPTANCE_FAMILIES = [
    BetaProcess(theta=0.5),
    BetaProcess(theta=1.0),
    BetaProcess(theta=5.0),
    GeneralizedGamma(alpha=0.5, b=0.0),
    GeneralizedGamma(alpha=0.5, b=1.0),
    GeneralizedGamma(alpha=-1.0, b=1.0),
    TwoParamPD(alpha=0.0, theta=1.0),
    TwoParamPD(alpha=0.3, theta=1.0),
    TwoParamPD(alpha=0.5, theta=0.0),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=ACCEPTANCE_FAMILIES, ids=str)
def family(request):
    return request.param

import os  # noqa: E402

from hypothesis import settings  # noqa: E402

# Deterministic example generation by default so that runs are reproducible;
# HYPOTHESIS_PROFILE=stress explores many more random examples.
settings.register_profile("repro", derandomize=True, max_examples=60, print_blob=True)
settings.register_profile("stress", max_examples=1000, deadline=None, print_blob=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repro"))
