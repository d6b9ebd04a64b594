"""Shared generators for randomized tests (all seeded, never time-based)."""

import numpy as np
import pytest

from lsvd.lindblad import Channel, LindbladModel


def random_complex(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n):
    a = random_complex(rng, n)
    return a + a.conj().T


def random_density(rng, n):
    a = random_complex(rng, n)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_model(rng, r, n_channels=2, time_unit="1"):
    channels = tuple(
        Channel(random_complex(rng, r), float(rng.uniform(0.1, 1.0)), f"ch{i}")
        for i in range(n_channels)
    )
    return LindbladModel(
        hamiltonian=random_hermitian(rng, r),
        channels=channels,
        time_unit=time_unit,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
