import numpy as np
import pytest

from distqc.linalg import DensityOperator, QuantumChannel


def rng_for(seed):
    return np.random.default_rng(seed)


def random_pure(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim, rng, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m))


def random_unitary(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(dim_in, dim_out, n_kraus, rng):
    """Random CPTP map via a Haar-ish isometry into dim_out * n_kraus."""
    g = rng.normal(size=(dim_out * n_kraus, dim_in)) + 1j * rng.normal(
        size=(dim_out * n_kraus, dim_in)
    )
    q, _ = np.linalg.qr(g)
    iso = q[:, :dim_in]
    kraus = [iso[k * dim_out : (k + 1) * dim_out, :] for k in range(n_kraus)]
    return QuantumChannel(kraus)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
