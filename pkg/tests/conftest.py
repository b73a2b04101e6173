import numpy as np
import pytest

from liecurv import so3, so4


@pytest.fixture(scope="session")
def g3():
    return so3()


@pytest.fixture(scope="session")
def g4():
    return so4()


def random_spd(rng, d, floor=0.3):
    m = rng.standard_normal((d, d))
    return m @ m.T + floor * np.eye(d)


def random_symmetric(rng, d, unit_norm=True):
    m = rng.standard_normal((d, d))
    m = 0.5 * (m + m.T)
    if unit_norm:
        m /= np.abs(np.linalg.eigvalsh(m)).max()
    return m
