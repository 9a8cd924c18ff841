"""Two-copy realization of temporal observables.

Two copies ``|s_b, s_a>`` of the system stand in for its two times. One
monitor records the sigma1 eigenvalue of copy a, another the sigma2
eigenvalue of copy b. Contracting the monitor pair against a parity state
applies (1 +- sigma2 x sigma1)/2 to the copies. Register order is
(copy_b, copy_a, monitor2, monitor1), each a qubit, monitors starting down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DimensionError
from .history import HistoryState, bloch_state
from .linalg import (
    CHAINED_TOL,
    DOWN,
    I2,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    UP,
    as_state,
    kron,
    outer,
    partial_trace,
)
from .temporal import A, B, EigenhistoryBasis, simultaneous_eigenhistories

TWO_COPY_DIMS = (2, 2, 2, 2)
SIGN_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))

# unnormalized parity bras on (monitor2, monitor1)
EVEN_MONITORS = kron(UP, UP) + kron(DOWN, DOWN)
ODD_MONITORS = kron(DOWN, UP) + kron(UP, DOWN)


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0 <= self.theta <= math.pi):
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not (0 <= self.phi < 2 * math.pi):
            raise ValueError(f"phi={self.phi} outside [0, 2 pi)")

    def state(self) -> np.ndarray:
        return bloch_state(self.theta, self.phi)


@dataclass(frozen=True)
class TwoCopyMonitoredState:
    state: np.ndarray

    def __post_init__(self):
        s = as_state(self.state)
        if s.size != 16:
            raise DimensionError("two-copy monitored state has dimension 16")
        object.__setattr__(self, "state", s)


@dataclass(frozen=True)
class HistoryDecomposition:
    coefficients: tuple[complex, ...]
    labels: tuple[tuple[int, int], ...] = SIGN_ORDER

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(abs(c) ** 2 for c in self.coefficients)

    def probability(self, signs) -> float:
        if isinstance(signs, str):
            signs = tuple(1 if ch == "+" else -1 for ch in signs)
        return self.probabilities[self.labels.index(tuple(signs))]


def eigenspace_monitor_gate(pauli: np.ndarray) -> np.ndarray:
    """Flip a down monitor iff the system sits in the +1 eigenspace of ``pauli``."""
    plus = (I2 + pauli) / 2
    minus = (I2 - pauli) / 2
    return kron(plus, SIGMA1) + kron(minus, I2)


def _on(gate2: np.ndarray, system: int, monitor: int, n: int) -> np.ndarray:
    """Embed a (system, monitor) two-qubit gate into an n-qubit register."""
    g = gate2.reshape(2, 2, 2, 2)
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - k)) & 1 for k in range(n)]
        for s_out in range(2):
            for m_out in range(2):
                amp = g[s_out, m_out, bits[system], bits[monitor]]
                if amp == 0:
                    continue
                out = list(bits)
                out[system], out[monitor] = s_out, m_out
                row = int("".join(map(str, out)), 2)
                full[row, col] += amp
    return full


def diagonal_embed(s) -> np.ndarray:
    """s -> |s, s>, the history of s under trivial evolution."""
    s = as_state(s)
    if s.size != 2:
        raise DimensionError("diagonal embedding takes a qubit state")
    if abs(np.linalg.norm(s) - 1) > CHAINED_TOL:
        raise ContractViolation("state must be unit-norm")
    return kron(s, s)


def evolve_with_monitors(s_b, s_a) -> TwoCopyMonitoredState:
    s_b, s_a = as_state(s_b), as_state(s_a)
    psi = kron(s_b, s_a, DOWN, DOWN)
    psi = _on(eigenspace_monitor_gate(SIGMA1), 1, 3, 4) @ psi
    psi = _on(eigenspace_monitor_gate(SIGMA2), 0, 2, 4) @ psi
    return TwoCopyMonitoredState(psi)


def project_monitor_pair(state: TwoCopyMonitoredState, sign: int) -> np.ndarray:
    """Contract the monitors with |up up> + |down down> (sign +1) or
    |down up> + |up down> (sign -1); returns the unnormalized copy state."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    bra = EVEN_MONITORS if sign == 1 else ODD_MONITORS
    t = state.state.reshape(4, 4)
    return t @ bra.conj()


def canonical_eigenhistories() -> EigenhistoryBasis:
    return simultaneous_eigenhistories(A, B)


def decompose_history(s, basis: EigenhistoryBasis | None = None) -> HistoryDecomposition:
    """Coefficients <v_k | s, s> over the joint (A, B) eigenhistories."""
    basis = basis or canonical_eigenhistories()
    psi = HistoryState(diagonal_embed(s))
    coeffs = tuple(complex(np.vdot(basis[signs].amplitudes, psi.amplitudes)) for signs in SIGN_ORDER)
    return HistoryDecomposition(coeffs)


def projector_branches(s) -> dict[tuple[int, int], np.ndarray]:
    """(1 +- B)/2 (1 +- A)/2 |s, s> for each sign pair (A sign first)."""
    psi = diagonal_embed(s)
    return {(sa, sb): B.projector(sb) @ A.projector(sa) @ psi for sa, sb in SIGN_ORDER}


def monitored_branches(s) -> dict[tuple[int, int], np.ndarray]:
    """Branches from the full four-monitor circuit on |s, s>.

    A-type monitors (sigma1 on copy a, sigma2 on copy b) act first, then the
    B-type monitors (sigma3 on copy a, sigma1 on copy b). Register:
    (copy_b, copy_a, mA2, mA1, mB2, mB1).
    """
    s = as_state(s)
    psi = kron(s, s, DOWN, DOWN, DOWN, DOWN)
    for pauli, system, monitor in (
        (SIGMA1, 1, 3),
        (SIGMA2, 0, 2),
        (SIGMA3, 1, 5),
        (SIGMA1, 0, 4),
    ):
        psi = _on(eigenspace_monitor_gate(pauli), system, monitor, 6) @ psi
    t = psi.reshape(4, 4, 4)
    out = {}
    for sa, sb in SIGN_ORDER:
        bra_a = EVEN_MONITORS if sa == 1 else ODD_MONITORS
        bra_b = EVEN_MONITORS if sb == 1 else ODD_MONITORS
        out[(sa, sb)] = np.einsum("ijk,j,k->i", t, bra_a.conj(), bra_b.conj())
    return out


def monitors_given_copies(state: TwoCopyMonitoredState, copies_state) -> np.ndarray:
    """Project both copies onto ``copies_state`` and return the monitors'
    unnormalized reduced density matrix."""
    target = as_state(copies_state)
    if target.size != 4:
        raise DimensionError("copies state must be 4-dimensional")
    proj = kron(outer(target), np.eye(4))
    rho = outer(proj @ state.state)
    return partial_trace(rho, TWO_COPY_DIMS, [2, 3])


def probability_vpp_closed_form(angles: BlochAngles) -> float:
    """1/4 + (sin t / 8)(cos t (cos p + sin p) + 1/2 sin t sin 2p), taken as printed."""
    t, p = angles.theta, angles.phi
    return 0.25 + math.sin(t) / 8 * (
        math.cos(t) * (math.cos(p) + math.sin(p)) + 0.5 * math.sin(t) * math.sin(2 * p)
    )


def probability_vpp_corrected(angles: BlochAngles) -> float:
    """|<v++|s, s>|^2 in closed form, as obtained by expanding the inner product:
    1/4 + (sin t / 8)(2 cos t (cos p + sin p) - sin t sin 2p)."""
    t, p = angles.theta, angles.phi
    return 0.25 + math.sin(t) / 8 * (
        2 * math.cos(t) * (math.cos(p) + math.sin(p)) - math.sin(t) * math.sin(2 * p)
    )


def angle_grid(n_theta: int = 20, n_phi: int = 20) -> list[BlochAngles]:
    """theta on [0, pi] inclusive, phi on [0, 2 pi) exclusive."""
    thetas = np.linspace(0, math.pi, n_theta)
    phis = np.linspace(0, 2 * math.pi, n_phi, endpoint=False)
    return [BlochAngles(float(t), float(p)) for t in thetas for p in phis]
