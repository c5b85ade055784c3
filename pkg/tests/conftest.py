import numpy as np
import pytest

from speclab.fourier import SpectralField


def make_random_field(degree, seed, decay=2.0):
    """Hermitian random coefficients with |c_k| ~ (1+|k|)^-decay, zero mean mode."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=2 * degree + 1) + 1j * rng.normal(size=2 * degree + 1)
    c = 0.5 * (c + np.conj(c[::-1]))
    k = np.arange(-degree, degree + 1)
    c *= (1.0 + np.abs(k)) ** (-decay)
    c[degree] = 0.0
    return SpectralField(degree, c)


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)
