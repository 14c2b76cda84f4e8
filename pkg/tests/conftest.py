import numpy as np
import pytest

from bouquet.engine import build
from bouquet.geometry import build_model
from bouquet.potentials import default_spec


@pytest.fixture(scope="session")
def model():
    return build_model(0.25)


@pytest.fixture(scope="session")
def spec():
    return default_spec()


@pytest.fixture(scope="session")
def op14(model, spec):
    """Default operator at N=1, m=4."""
    return build(model, spec, 1, 4)


@pytest.fixture(scope="session")
def op16(model, spec):
    """Deeper operator for Gibbs checks: N=1, m=6."""
    return build(model, spec, 1, 6)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
