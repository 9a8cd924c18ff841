"""Monitor-qubit protocol for a single qubit observed at two times.

Register order of the joint state is (main, monitor at t2, monitor at t1),
so after tracing out the main qubit the monitors read later-time first, the
same layout as :class:`~histories.history.HistoryState`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distribution import OutcomeDistribution
from .errors import ContractViolation, DimensionError, PostSelectionError, UnsupportedInputError
from .history import Basis, HistoryState, odot
from .linalg import (
    CHAINED_TOL,
    I2,
    apply_on,
    as_operator,
    as_state,
    contract,
    eigenspaces,
    is_hermitian,
    is_unitary,
    kron,
    partial_trace,
    outer,
)

JOINT_DIMS = (2, 2, 2)
MAIN, LATER, EARLIER = 0, 1, 2


@dataclass(frozen=True)
class JointState:
    state: np.ndarray

    def __post_init__(self):
        s = as_state(self.state)
        if s.size != 8:
            raise DimensionError("joint state lives on main x monitor2 x monitor1 (dim 8)")
        object.__setattr__(self, "state", s)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.state))

    def reduced(self, slot: int) -> np.ndarray:
        return partial_trace(outer(self.state), JOINT_DIMS, [slot])


@dataclass(frozen=True)
class ProtocolResult:
    monitor_state: np.ndarray
    success_probability: float

    def as_history(self) -> HistoryState:
        return HistoryState(self.monitor_state)


def copy_gate(basis: Basis, monitor_slot: int) -> np.ndarray:
    """Controlled copy on the joint register: |x>|first> -> |x>|x> for x in ``basis``.

    CNOT form: the chosen monitor is flipped between the basis vectors when
    the main qubit is in ``basis.second``.
    """
    if monitor_slot not in (LATER, EARLIER):
        raise ValueError("monitor_slot must be 1 (t2 monitor) or 2 (t1 monitor)")
    flip = [I2, I2]
    flip[monitor_slot - 1] = basis.flip
    return kron(outer(basis.first), I2, I2) + kron(outer(basis.second), *flip)


def couple_monitor(joint: JointState, basis: Basis, monitor_slot: int) -> JointState:
    gate = copy_gate(basis, monitor_slot)
    fid = joint.reduced(monitor_slot)
    w = float(np.real(np.vdot(basis.first, fid @ basis.first)))
    if abs(w - joint.norm**2) > CHAINED_TOL:
        raise ContractViolation(
            f"monitor {monitor_slot} is not in its fiducial state {basis.label}+ before coupling"
        )
    return JointState(gate @ joint.state)


def initial_joint(initial, B1: Basis, B2: Basis) -> JointState:
    return JointState(kron(as_state(initial), B2.first, B1.first))


def run_protocol(initial, U, B1: Basis, B2: Basis) -> JointState:
    """Couple the t1 monitor in B1, evolve the main qubit by U, couple the t2 monitor in B2."""
    initial = as_state(initial)
    U = as_operator(U)
    if not is_unitary(U):
        raise ContractViolation("time evolution U is not unitary")
    if abs(np.linalg.norm(initial) - 1) > CHAINED_TOL:
        raise ContractViolation("initial state is not unit-norm")
    joint = initial_joint(initial, B1, B2)
    joint = couple_monitor(joint, B1, EARLIER)
    joint = JointState(apply_on(joint.state, U, MAIN, JOINT_DIMS))
    return couple_monitor(joint, B2, LATER)


def project_and_extract(joint: JointState, B2: Basis) -> ProtocolResult:
    """Post-select the main qubit on (b + bbar)/sqrt2 and return the monitors."""
    probe = (B2.first + B2.second) / np.sqrt(2)
    branch = contract(joint.state, probe, MAIN, JOINT_DIMS)
    p = float(np.vdot(branch, branch).real)
    if p <= CHAINED_TOL**2:
        raise PostSelectionError(
            "main qubit has no overlap with the post-selection state; protocol cannot succeed"
        )
    return ProtocolResult(branch / np.sqrt(p), p)


def monitor_matches_history(result: ProtocolResult, h: HistoryState) -> float:
    hn = h.normalized().amplitudes
    return float(abs(np.vdot(result.monitor_state, hn)) ** 2)


@dataclass(frozen=True)
class MeasurementSpec:
    """How to read out the two monitors.

    ``kind`` is ``"product"`` (needs ``bases=(B2, B1)``), ``"set"`` (needs
    four orthonormal ``vectors``) or ``"observable"`` (needs a hermitian
    4x4 ``observable``).
    """

    kind: str
    bases: tuple[Basis, Basis] | None = None
    vectors: tuple[np.ndarray, ...] | None = None
    observable: np.ndarray | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind == "product":
            if self.bases is None or len(self.bases) != 2:
                raise ContractViolation("product measurement needs (B2, B1)")
        elif self.kind == "set":
            if self.vectors is None or len(self.vectors) != 4:
                raise ContractViolation("set measurement needs four vectors")
            V = np.column_stack([as_state(v) for v in self.vectors])
            if V.shape != (4, 4) or not np.allclose(V.conj().T @ V, np.eye(4), atol=CHAINED_TOL):
                raise ContractViolation("measurement vectors are not orthonormal")
            object.__setattr__(self, "vectors", tuple(V[:, k] for k in range(4)))
        elif self.kind == "observable":
            obs = as_operator(self.observable)
            if obs.shape != (4, 4) or not is_hermitian(obs, CHAINED_TOL):
                raise ContractViolation("monitor observable must be a hermitian 4x4 matrix")
            object.__setattr__(self, "observable", obs)
        else:
            raise ValueError(f"unknown measurement kind {self.kind!r}")

    @classmethod
    def product(cls, B2: Basis, B1: Basis) -> "MeasurementSpec":
        return cls("product", bases=(B2, B1))

    @classmethod
    def orthonormal_set(cls, vectors: Sequence, names: Sequence[str] | None = None):
        return cls("set", vectors=tuple(vectors), names=tuple(names) if names else None)

    @classmethod
    def hermitian_observable(cls, observable) -> "MeasurementSpec":
        return cls("observable", observable=observable)

    def outcomes(self) -> list[tuple[str, np.ndarray]]:
        """(label, projector) for every outcome, in a fixed order."""
        if self.kind == "product":
            B2, B1 = self.bases
            return [
                (f"{ny}*{nx}", outer(kron(y, x)))
                for ny, y in zip(B2.names, B2.vectors)
                for nx, x in zip(B1.names, B1.vectors)
            ]
        if self.kind == "set":
            names = self.names or tuple(f"e{k}" for k in range(4))
            return [(n, outer(v)) for n, v in zip(names, self.vectors)]
        return [(_fmt_eigenvalue(lam), proj) for lam, proj in eigenspaces(self.observable)]


def _fmt_eigenvalue(lam: float) -> str:
    lam = round(lam, 9) + 0.0
    return f"{lam:g}"


def bell_set(B2: Basis, B1: Basis) -> MeasurementSpec:
    """Bell-type basis built on B2 x B1: (b a +- bbar abar)/sqrt2, (b abar +- bbar a)/sqrt2."""
    b, bb = B2.vectors
    a, ab = B1.vectors
    r = 1 / np.sqrt(2)
    vecs = [
        r * (kron(b, a) + kron(bb, ab)),
        r * (kron(b, a) - kron(bb, ab)),
        r * (kron(b, ab) + kron(bb, a)),
        r * (kron(b, ab) - kron(bb, a)),
    ]
    return MeasurementSpec.orthonormal_set(vecs, ("phi+", "phi-", "psi+", "psi-"))


def measure_monitors(result: ProtocolResult, spec: MeasurementSpec) -> OutcomeDistribution:
    psi = result.monitor_state
    labels, weights = [], []
    for label, proj in spec.outcomes():
        labels.append(label)
        weights.append(float(np.vdot(psi, proj @ psi).real))
    return OutcomeDistribution.from_weights(labels, weights)


def collapse_past(spec: MeasurementSpec, outcome: int, state=None) -> HistoryState:
    """History implied by reading ``outcome`` off the monitors.

    For degenerate observable sectors the answer depends on the pre-measurement
    monitor state, which must then be passed as ``state``.
    """
    if spec.kind == "product":
        B2, B1 = spec.bases
        return odot(B2.vectors[outcome // 2], B1.vectors[outcome % 2])
    if spec.kind == "set":
        return HistoryState(spec.vectors[outcome])
    _, proj = spec.outcomes()[outcome]
    rank = int(round(np.trace(proj).real))
    if rank == 1:
        vals, vecs = np.linalg.eigh(proj)
        return HistoryState(vecs[:, -1])
    if state is None:
        raise UnsupportedInputError("degenerate outcome: pass the monitor state to resolve it")
    return HistoryState(proj @ as_state(state)).normalized()
