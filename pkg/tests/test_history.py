import numpy as np
import pytest
from hypothesis import given, settings

from histories.errors import ContractViolation, DimensionError, UndefinedInputError
from histories.history import (
    X_BASIS,
    Y_BASIS,
    Z_BASIS,
    Basis,
    HistoryState,
    bloch_state,
    build_history,
    history_inner,
    is_product_history,
    odot,
    product_coefficients,
    schmidt_rank,
)
from histories.linalg import DOWN, I2, SIGMA1, UP

from conftest import bases, qubit_states, random_basis, random_state, random_unitary, unitaries

R2 = 1 / np.sqrt(2)
# v++ coefficients on (uu, ud, du, dd) in the reference listing
V_PP = np.array([1, -1j, 1, 1j]) / 2
V_PM = np.array([1, 1j, -1, 1j]) / 2


def test_basis_rejects_non_orthogonal():
    with pytest.raises(ContractViolation):
        Basis(UP, np.array([R2, R2]))


def test_basis_rejects_unnormalized():
    with pytest.raises(ContractViolation):
        Basis(UP, 2 * DOWN)


def test_bloch_state_poles():
    assert np.allclose(bloch_state(0, 0), UP)
    assert np.allclose(abs(bloch_state(np.pi, 1.3)), [0, 1])


def test_odot_examples():
    assert np.array_equal(odot(UP, UP).amplitudes, [1, 0, 0, 0])
    assert np.allclose(odot(DOWN, X_BASIS.first).amplitudes, [0, 0, R2, R2])
    assert np.array_equal(odot(SIGMA1 @ UP, UP).amplitudes, [0, 0, 1, 0])


def test_odot_dim_mismatch():
    with pytest.raises(DimensionError):
        odot(np.ones(4), UP)


def test_build_history_tracking_bases_gives_product(rng):
    s1 = random_state(rng)
    U = random_unitary(rng)
    h = build_history(s1, U, Basis.from_state(s1), Basis.from_state(U @ s1))
    assert h.allclose(odot(U @ s1, s1), atol=1e-12)


def test_build_history_collapse_example():
    h = build_history(UP, I2, X_BASIS, Z_BASIS)
    # coefficients of z+x+, z+x-, z-x+, z-x- as listed for the monitor state
    coeffs = product_coefficients(h, Z_BASIS, X_BASIS)
    assert np.allclose(coeffs, [0.5, 0.5, 0.5, -0.5], atol=1e-12)


def test_build_history_trivial_tracking():
    h = build_history(UP, I2, Z_BASIS, Z_BASIS)
    assert h.allclose(odot(UP, UP))


def test_build_history_rejects_non_unitary():
    with pytest.raises(ContractViolation):
        build_history(UP, np.array([[1, 0], [0, 2]]), Z_BASIS, Z_BASIS)


def test_build_history_brute_force_sum(rng):
    # sum over paths written out with amplitudes <y|U|x><x|s>
    s, U = random_state(rng), random_unitary(rng)
    B1, B2 = random_basis(rng), random_basis(rng)
    expected = np.zeros(4, dtype=complex)
    for x in (B1.first, B1.second):
        for y in (B2.first, B2.second):
            amp = (y.conj() @ U @ x) * (x.conj() @ s)
            expected += amp * np.array([y[i] * x[j] for i in range(2) for j in range(2)])
    assert np.allclose(build_history(s, U, B1, B2).amplitudes, expected, atol=1e-12)


def test_build_history_unit_norm_random(rng):
    worst = 0.0
    for _ in range(1000):
        h = build_history(random_state(rng), random_unitary(rng), random_basis(rng), random_basis(rng))
        worst = max(worst, abs(h.norm - 1))
    assert worst < 1e-10


@settings(max_examples=50)
@given(qubit_states(), unitaries(), bases(), bases(), unitaries())
def test_build_history_basis_covariance(s, U, B1, B2, V):
    """Rotating B2 by V leaves the history itself fixed and recombines its
    (B2, B1) coefficients through the basis-change matrix <y'|y>."""
    h = build_history(s, U, B1, B2)
    B2r = Basis(V @ B2.first, V @ B2.second, "r")
    hr = build_history(s, U, B1, B2r)
    assert abs(hr.norm - h.norm) < 1e-10
    assert hr.allclose(h, atol=1e-10)
    c = product_coefficients(h, B2, B1).reshape(2, 2)
    cr = product_coefficients(hr, B2r, B1).reshape(2, 2)
    change = np.array([[np.vdot(yr, y) for y in B2] for yr in B2r])
    assert np.allclose(cr, change @ c, atol=1e-10)


def test_build_history_swapping_b2_permutes_coefficients(rng):
    s, U, B1, B2 = random_state(rng), random_unitary(rng), random_basis(rng), random_basis(rng)
    swapped = Basis(B2.second, B2.first, "s")
    c = product_coefficients(build_history(s, U, B1, B2), B2, B1)
    cs = product_coefficients(build_history(s, U, B1, swapped), swapped, B1)
    assert np.allclose(cs, c[[2, 3, 0, 1]], atol=1e-12)


def test_schmidt_rank_examples():
    assert schmidt_rank(odot(UP, DOWN)) == 1
    assert schmidt_rank(HistoryState(V_PP)) == 2
    ghz = (odot(UP, UP) + odot(DOWN, DOWN)) * R2
    assert schmidt_rank(ghz) == 2


def test_v_pp_is_entangled_by_determinant():
    # rank 2 for a 2x2 amplitude matrix iff its determinant is nonzero
    m = V_PP.reshape(2, 2)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    assert abs(det - 0.5j) < 1e-15


def test_schmidt_rank_zero_raises():
    with pytest.raises(UndefinedInputError):
        schmidt_rank(HistoryState(np.zeros(4)))


@settings(max_examples=100)
@given(qubit_states(4))
def test_schmidt_rank_one_iff_product(v):
    h = HistoryState(v)
    m = v.reshape(2, 2)
    det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if det > 1e-6:
        assert schmidt_rank(h) == 2 and not is_product_history(h)
    elif det < 1e-14:
        assert schmidt_rank(h) == 1 and is_product_history(h)


@given(qubit_states(), qubit_states())
def test_product_histories_have_rank_one(a, b):
    h = odot(a, b)
    assert schmidt_rank(h) == 1
    assert is_product_history(h)


def test_history_inner_examples():
    assert np.isclose(history_inner(HistoryState(V_PP), HistoryState(V_PP)), 1, atol=1e-15)
    assert np.isclose(history_inner(HistoryState(V_PP), HistoryState(V_PM)), 0, atol=1e-15)
    assert history_inner(odot(UP, UP), odot(UP, UP)) == 1


def test_history_inner_is_conjugate_linear_in_first():
    g, h = odot(UP, UP), odot(UP, UP)
    assert np.isclose(history_inner(1j * g, h), -1j)


def test_named_bases_orthonormal():
    for b in (X_BASIS, Y_BASIS, Z_BASIS):
        m = np.column_stack(b.vectors)
        assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-15)
