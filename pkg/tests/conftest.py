import numpy as np
import pytest

from memchan.channels import DephasingParams


def random_hermitian(gen, n):
    a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    return a + a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tau1():
    return DephasingParams(1.0)
