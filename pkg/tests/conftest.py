import numpy as np
import pytest
from hypothesis import strategies as st

from aiiiwalk.walk import AngleField, WalkerState


def random_state(rng, L, support=None):
    """Normalized random state, nonzero only on |q| <= support."""
    support = L if support is None else support
    amps = np.zeros((2 * L + 1, 2), dtype=complex)
    sl = slice(L - support, L + support + 1)
    amps[sl] = rng.normal(size=(2 * support + 1, 2)) + 1j * rng.normal(size=(2 * support + 1, 2))
    amps /= np.linalg.norm(amps)
    return WalkerState(amps, L)


def random_field(rng, n, phi=True, theta_scale=np.pi):
    return AngleField(
        rng.uniform(-np.pi, np.pi, n) if phi else np.zeros(n),
        rng.uniform(-theta_scale, theta_scale, n),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
