import numpy as np
import pytest

from common.config import DEFAULT_TOLERANCES
from hrep import HRep


@pytest.fixture
def tolerances():
    return DEFAULT_TOLERANCES


@pytest.fixture
def e1_hrep():
    """d=1, P=1, N=2, W=(2, -2), R_0 = R_1 = [1, 0]: factor [1 + (1+2i)t, 0]."""
    return HRep(1, 2, 1,
                W=(np.array([[2.0]]), np.array([[-2.0]])),
                R=(np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]])),
                canonical=True)
