import math

import numpy as np
import pytest

from symmetro import BlochDirection, blend_family, haldane_prior, make_fmap


def random_hermitian(rng, dim, psd=False, full_rank=False):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    if psd:
        h = m @ m.conj().T
        if full_rank:
            h += 0.1 * np.eye(dim)
        return h / np.trace(h).real
    return 0.5 * (m + m.conj().T)


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture(scope="session")
def weight():
    return make_fmap("weight")


@pytest.fixture(scope="session")
def haldane01():
    return haldane_prior(0.01)


@pytest.fixture(scope="session")
def blend_half_pi():
    return blend_family(BlochDirection(0.0, math.pi / 2))
