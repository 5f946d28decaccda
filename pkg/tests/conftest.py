import numpy as np
import pytest

from tsq.qcore import RegisterLayout, StateVector


def state_from_terms(layout: RegisterLayout, terms) -> StateVector:
    """Build a state from (b_bits, a_bits, amplitude) triples."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    for b, a, c in terms:
        amps[layout.index(b, a)] += c
    return StateVector(layout, amps)


def random_state(layout: RegisterLayout, rng) -> StateVector:
    amps = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return StateVector(layout, amps)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
