import numpy as np
import pytest

from bpilab import Bernoulli, DiscretePareto, FiniteLaw, ModelParams, ZeroInflatedPareto


@pytest.fixture(scope="session")
def model_a_heavy():
    """Light offspring, heavy immigration: the canonical model-A instance."""
    return ModelParams.make(Bernoulli(0.5), DiscretePareto(2.0))


@pytest.fixture(scope="session")
def model_a_small():
    """Finite-support instance with everything exactly computable."""
    return ModelParams.make(Bernoulli(0.5), FiniteLaw({0: 0.5, 1: 0.5}))


@pytest.fixture(scope="session")
def model_b_heavy():
    """Heavy offspring, light immigration: the canonical model-B instance."""
    return ModelParams.make(ZeroInflatedPareto(0.3, 2.0), FiniteLaw({0: 0.5, 1: 0.5}))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
