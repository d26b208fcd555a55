import numpy as np
import pytest

from zetalab.arith import (EulerProductSpec, character_from_index,
                           coefficients_from_euler)
from zetalab.kernel import SmoothingKernel

SEED = 20250810


@pytest.fixture(scope="session")
def kernel():
    return SmoothingKernel()


@pytest.fixture(scope="session")
def zeta_table():
    spec = EulerProductSpec.zeta(2100)
    return coefficients_from_euler(spec, 2048)


@pytest.fixture(scope="session")
def chi4_table():
    chi = character_from_index(4, 1)
    spec = EulerProductSpec.from_character(chi, 2100)
    return coefficients_from_euler(spec, 2048)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(SEED)
