import numpy as np
import pytest

from infodist.ensembles import Ensemble

SQRT_HALF = 1 / np.sqrt(2)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([SQRT_HALF, SQRT_HALF], dtype=complex)
MINUS = np.array([SQRT_HALF, -SQRT_HALF], dtype=complex)
DIAG_HALF = np.diag([1.0, 0.5])


def h2(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def zero_plus():
    return Ensemble(np.array([KET0, PLUS]), [0.5, 0.5])
