import numpy as np
import pytest

from viscowave import MemoryKernel, interval_basis


@pytest.fixture
def exp_kernel():
    """Canonical one-term kernel 0.5 exp(-t) with closed-form resolvent."""
    return MemoryKernel.prony([(0.5, 1.0)])


@pytest.fixture
def interval20():
    """Interval basis of 20 modes on (0, pi), controlled at the left end."""
    return interval_basis(20, np.pi, "left")


@pytest.fixture
def rng():
    return np.random.default_rng(202409)
