import numpy as np
import pytest

from kzchain.mode_dynamics import run_quench
from kzchain.protocol import Evolution, QuenchProtocol, Variant


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture(scope="session")
def small_quench_ensemble():
    """N = 8 continuous quench to the critical point, sampled at t = 0."""
    p = QuenchProtocol(tau_q=2.0)
    return run_quench(p, 8, lam=0.0, sample_times=[0.0])[0]


@pytest.fixture(scope="session")
def small_full_quench():
    """N = 8 full quench through the critical point, end-of-quench sample."""
    p = QuenchProtocol(tau_q=2.0, variant=Variant.FULL_QUENCH)
    return p, run_quench(p, 8, lam=0.0, sample_times=[0.0, 2.0])


@pytest.fixture(scope="session")
def small_trotter_protocol():
    return QuenchProtocol(tau_q=2.0, evolution=Evolution.TROTTER,
                          dt=0.25, steps=8)


def random_skew(rng, dim):
    m = rng.standard_normal((dim, dim))
    return m - m.T
