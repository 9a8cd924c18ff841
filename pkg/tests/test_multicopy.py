import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from histories.errors import ContractViolation, DimensionError
from histories.history import X_BASIS, bloch_state
from histories.linalg import DOWN, SIGMA1, SIGMA2, UP, kron, outer
from histories.multicopy import (
    BlochAngles,
    TwoCopyMonitoredState,
    angle_grid,
    canonical_eigenhistories,
    decompose_history,
    diagonal_embed,
    evolve_with_monitors,
    monitored_branches,
    monitors_given_copies,
    probability_vpp_closed_form,
    probability_vpp_corrected,
    project_monitor_pair,
    projector_branches,
)

from conftest import qubit_states, random_state

A2 = kron(SIGMA2, SIGMA1)
LISTED_VPP = [sp.Rational(1, 2), -sp.I / 2, sp.Rational(1, 2), sp.I / 2]


def sympy_p_pp(theta, phi):
    """Exact |<v++|s,s>|^2 from the listed coefficients, no numerics involved."""
    s = [sp.cos(theta / 2) * sp.exp(sp.I * phi / 2), sp.sin(theta / 2) * sp.exp(-sp.I * phi / 2)]
    psi = [s[0] * s[0], s[0] * s[1], s[1] * s[0], s[1] * s[1]]
    amp = sum(sp.conjugate(c) * p for c, p in zip(LISTED_VPP, psi))
    return sp.nsimplify(sp.simplify(sp.expand_complex(amp * sp.conjugate(amp))))


def test_diagonal_embed_examples():
    assert np.allclose(diagonal_embed(UP), [1, 0, 0, 0])
    assert np.allclose(diagonal_embed(X_BASIS.first), [0.5] * 4)
    t, p = 0.9, 2.1
    c, s = math.cos(t / 2), math.sin(t / 2)
    expected = [c * c * np.exp(1j * p), c * s, c * s, s * s * np.exp(-1j * p)]
    assert np.allclose(diagonal_embed(bloch_state(t, p)), expected, atol=1e-15)


def test_diagonal_embed_requires_unit_norm():
    with pytest.raises(ContractViolation):
        diagonal_embed(2 * UP)


def test_evolve_eigenstate_kills_minus_branches():
    sb = random_state(np.random.default_rng(1))
    st_ = evolve_with_monitors(sb, X_BASIS.first).state.reshape(2, 2, 2, 2)
    # monitor1 index 1 (down) marks the (1 - sigma1)/2 branch of copy a
    assert np.allclose(st_[:, :, :, 1], 0, atol=1e-15)


def test_evolve_z_plus_branch_norms():
    t = evolve_with_monitors(UP, UP).state.reshape(4, 4)
    for m in range(4):
        assert abs(np.linalg.norm(t[:, m]) - 0.5) < 1e-12


@settings(max_examples=50)
@given(qubit_states(), qubit_states())
def test_evolve_preserves_norm(sb, sa):
    assert abs(np.linalg.norm(evolve_with_monitors(sb, sa).state) - 1) < 1e-12


def test_evolve_matches_written_branches(rng):
    # four-term final state: |(1+-s2)/2 sb, (1+-s1)/2 sa> with monitors (m2, m1)
    sb, sa = random_state(rng), random_state(rng)
    P = lambda pauli, sign: (np.eye(2) + sign * pauli) / 2
    expected = (
        kron(P(SIGMA2, 1) @ sb, P(SIGMA1, 1) @ sa, UP, UP)
        + kron(P(SIGMA2, -1) @ sb, P(SIGMA1, 1) @ sa, DOWN, UP)
        + kron(P(SIGMA2, 1) @ sb, P(SIGMA1, -1) @ sa, UP, DOWN)
        + kron(P(SIGMA2, -1) @ sb, P(SIGMA1, -1) @ sa, DOWN, DOWN)
    )
    assert np.allclose(evolve_with_monitors(sb, sa).state, expected, atol=1e-12)


def test_project_monitor_pair_z_plus():
    branch = project_monitor_pair(evolve_with_monitors(UP, UP), 1)
    assert np.allclose(branch, 0.5 * np.array([1, 0, 0, 1j]), atol=1e-12)


def test_project_monitor_pair_central_identity(rng):
    for _ in range(1000):
        sb, sa = random_state(rng), random_state(rng)
        state = evolve_with_monitors(sb, sa)
        psi = kron(sb, sa)
        plus, minus = project_monitor_pair(state, 1), project_monitor_pair(state, -1)
        assert np.allclose(plus, (psi + A2 @ psi) / 2, rtol=0, atol=1e-12)
        assert np.allclose(minus, (psi - A2 @ psi) / 2, rtol=0, atol=1e-12)
        assert np.allclose(plus + minus, psi, atol=1e-12)
        assert abs(np.vdot(plus, plus).real + np.vdot(minus, minus).real - 1) < 1e-12


def test_decompose_sums_to_one(rng):
    for _ in range(1000):
        d = decompose_history(random_state(rng))
        assert abs(sum(d.probabilities) - 1) < 1e-10


def test_decompose_uses_canonical_basis():
    basis = canonical_eigenhistories()
    s = bloch_state(0.3, 1.2)
    d = decompose_history(s)
    for c, v in zip(d.coefficients, basis.vectors):
        assert abs(c - np.vdot(v.amplitudes, diagonal_embed(s))) < 1e-15


@pytest.mark.parametrize(
    "theta,phi",
    [(sp.pi / 2, sp.pi / 4), (0, sp.Rational(7, 5)), (sp.pi / 2, 0), (sp.pi / 3, sp.pi / 6), (sp.pi, 1)],
)
def test_decompose_against_exact_oracle(theta, phi):
    exact = float(sympy_p_pp(theta, phi))
    d = decompose_history(bloch_state(float(theta), float(phi)))
    assert abs(d.probability("++") - exact) < 1e-12


def test_decompose_fixed_values():
    # frozen from the exact oracle above
    assert abs(decompose_history(bloch_state(math.pi / 2, math.pi / 4)).probability("++") - 0.125) < 1e-12
    for phi in np.linspace(0, 2 * np.pi, 7, endpoint=False):
        assert abs(decompose_history(bloch_state(0, phi)).probability("++") - 0.25) < 1e-12


def test_three_routes_agree(rng):
    for _ in range(20):
        s = random_state(rng)
        d = decompose_history(s)
        proj = projector_branches(s)
        mon = monitored_branches(s)
        basis = canonical_eigenhistories()
        for k, signs in enumerate(d.labels):
            v = basis[signs].amplitudes
            assert np.allclose(proj[signs], v * d.coefficients[k], atol=1e-12)
            assert np.allclose(mon[signs], proj[signs], atol=1e-12)


def test_closed_form_values():
    assert probability_vpp_closed_form(BlochAngles(0, 1.0)) == 0.25
    assert abs(probability_vpp_closed_form(BlochAngles(math.pi / 2, math.pi / 4)) - 0.3125) < 1e-15
    assert abs(probability_vpp_closed_form(BlochAngles(math.pi / 2, 0)) - 0.25) < 1e-15


def test_corrected_form_is_exact_identity():
    t, p = sp.symbols("theta phi", real=True)
    corrected = sp.Rational(1, 4) + sp.sin(t) / 8 * (2 * sp.cos(t) * (sp.cos(p) + sp.sin(p)) - sp.sin(t) * sp.sin(2 * p))
    s = [sp.cos(t / 2) * sp.exp(sp.I * p / 2), sp.sin(t / 2) * sp.exp(-sp.I * p / 2)]
    psi = [s[0] * s[0], s[0] * s[1], s[1] * s[0], s[1] * s[1]]
    amp = sum(sp.conjugate(c) * x for c, x in zip(LISTED_VPP, psi))
    diff = sp.expand_complex(amp * sp.conjugate(amp)) - corrected
    assert sp.simplify(sp.expand_trig(sp.simplify(diff))) == 0


def test_corrected_form_matches_brute_force_grid():
    for ang in angle_grid(20, 20):
        assert abs(probability_vpp_corrected(ang) - decompose_history(ang.state()).probability("++")) < 1e-10


def test_printed_and_corrected_agree_where_expected():
    # they coincide when sin(theta) = 0 or on cos(theta)=0 with sin(2 phi) = 0
    for ang in (BlochAngles(0, 0.4), BlochAngles(math.pi, 2.0), BlochAngles(math.pi / 2, 0)):
        assert abs(probability_vpp_closed_form(ang) - probability_vpp_corrected(ang)) < 1e-15


def test_interference_visibility():
    dev = max(abs(decompose_history(a.state()).probability("++") - 0.25) for a in angle_grid())
    assert dev > 0.05


def test_bloch_angles_validation():
    with pytest.raises(ValueError):
        BlochAngles(-0.1, 0)
    with pytest.raises(ValueError):
        BlochAngles(0, 2 * math.pi)


def test_angle_grid_shape():
    g = angle_grid(20, 20)
    assert len(g) == 400
    assert g[0].theta == 0 and g[-1].theta == pytest.approx(math.pi)


def test_dual_procedure_monitor_density(rng):
    sb, sa = random_state(rng), random_state(rng)
    state = evolve_with_monitors(sb, sa)
    target = random_state(rng, 4)
    rho = monitors_given_copies(state, target)
    # the monitors end up in the pure state <target|copies> contracted out
    t = state.state.reshape(4, 4)
    mon = target.conj() @ t
    assert np.allclose(rho, outer(mon), atol=1e-12)
    # projecting onto every state of an orthonormal basis recovers the full monitor state
    basis = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    total = sum(monitors_given_copies(state, basis[:, k]) for k in range(4))
    assert abs(np.trace(total) - 1) < 1e-12


def test_two_copy_state_dim_check():
    with pytest.raises(DimensionError):
        TwoCopyMonitoredState(np.ones(8))
