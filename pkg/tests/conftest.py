import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_projection(rng, n, rank):
    """Orthogonal projection of the given rank."""
    q, _ = np.linalg.qr(random_complex(rng, n, rank))
    return q @ q.conj().T


def random_with_condition(rng, n, cond):
    """Invertible matrix with prescribed condition number."""
    q1, _ = np.linalg.qr(random_complex(rng, n))
    q2, _ = np.linalg.qr(random_complex(rng, n))
    s = np.geomspace(1.0, 1.0 / cond, n)
    return (q1 * s) @ q2.conj().T
