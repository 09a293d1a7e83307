import math

import numpy as np
import pytest

from heisensim import Direction


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_direction(rng) -> Direction:
    """Uniform direction on the sphere."""
    theta = math.acos(1.0 - 2.0 * rng.random())
    phi = 2.0 * math.pi * rng.random()
    return Direction(theta, phi)


def random_unitary(rng, dim: int) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a complex Gaussian."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
