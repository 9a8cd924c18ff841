import numpy as np
import pytest
from hypothesis import strategies as st

from histories.history import Basis


def random_state(rng, n=2):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_unitary(rng, n=2):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_basis(rng, label="r"):
    return Basis.from_state(random_state(rng), label)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def qubit_states(draw, n=2):
    parts = [complex(draw(finite), draw(finite)) for _ in range(n)]
    v = np.array(parts)
    nrm = np.linalg.norm(v)
    if nrm < 1e-3:
        v = np.zeros(n, dtype=complex)
        v[0] = 1
        return v
    return v / nrm


@st.composite
def complex_matrices(draw, n=2):
    return np.array([[complex(draw(finite), draw(finite)) for _ in range(n)] for _ in range(n)])


@st.composite
def unitaries(draw, n=2):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_unitary(np.random.default_rng(seed), n)


@st.composite
def bases(draw):
    return Basis.from_state(draw(qubit_states()), "h")
