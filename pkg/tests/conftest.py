import numpy as np
import pytest

from osclab import FockState


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def make_rng(seed):
    return np.random.default_rng(seed)


def random_sparse_state(d, h, max_level, rng, entries=5):
    """Normalized state with a few random basis components up to max_level."""
    coeffs = {}
    for _ in range(entries):
        n = int(rng.integers(0, max_level + 1))
        alpha = []
        left = n
        for _ in range(d - 1):
            a = int(rng.integers(0, left + 1))
            alpha.append(a)
            left -= a
        alpha.append(left)
        coeffs[tuple(alpha)] = complex(rng.standard_normal(), rng.standard_normal())
    return FockState(d, h, coeffs).normalized()
