import numpy as np
import pytest

from sparsegibbs.basis import make_basis
from sparsegibbs.simulate import InnovationSpec, model_spec, simulate


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def align1_uniform():
    return simulate(model_spec("align1", InnovationSpec("uniform")), 400, seed=2024)


@pytest.fixture(scope="session")
def ar20():
    return make_basis("ar_linear", 20)
