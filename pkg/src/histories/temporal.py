"""Temporal operators on the two-time history space and their joint eigenbases."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DimensionError, UnsupportedInputError
from .history import HistoryState
from .linalg import (
    CHAINED_TOL,
    I2,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    as_operator,
    commutator,
    eig_hermitian,
    is_hermitian,
    kron,
)


@dataclass(frozen=True)
class TemporalOperator:
    later_factor: np.ndarray
    earlier_factor: np.ndarray
    label: str = ""
    dense: np.ndarray = field(init=False, repr=False)
    hermitian: bool = field(init=False)

    def __post_init__(self):
        later, earlier = as_operator(self.later_factor), as_operator(self.earlier_factor)
        if later.shape != (2, 2) or earlier.shape != (2, 2):
            raise DimensionError("temporal factors must be 2x2")
        object.__setattr__(self, "later_factor", later)
        object.__setattr__(self, "earlier_factor", earlier)
        dense = kron(later, earlier)
        object.__setattr__(self, "dense", dense)
        object.__setattr__(self, "hermitian", is_hermitian(dense))

    def projector(self, sign: int) -> np.ndarray:
        """(1 + sign * P) / 2."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return (np.eye(4) + sign * self.dense) / 2


def make_temporal(later, earlier, label: str = "") -> TemporalOperator:
    return TemporalOperator(later, earlier, label)


A = make_temporal(SIGMA2, SIGMA1, "A")
B = make_temporal(SIGMA1, SIGMA3, "B")
IDENTITY = make_temporal(I2, I2, "1")


def commutator_norm(P: TemporalOperator, Q: TemporalOperator) -> float:
    """Largest entry magnitude of PQ - QP."""
    return float(np.max(np.abs(commutator(P.dense, Q.dense))))


def apply_temporal(P: TemporalOperator, h: HistoryState) -> HistoryState:
    if h.amplitudes.size != P.dense.shape[0]:
        raise DimensionError("operator and history dimensions differ")
    return HistoryState(P.dense @ h.amplitudes, h.slot_dims)


def sign_label(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


@dataclass(frozen=True)
class EigenhistoryBasis:
    vectors: tuple[HistoryState, ...]
    labels: tuple[tuple[int, int], ...]

    def __getitem__(self, signs) -> HistoryState:
        if isinstance(signs, str):
            signs = tuple(1 if c == "+" else -1 for c in signs)
        return self.vectors[self.labels.index(tuple(signs))]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sign_label(l) for l in self.labels)

    def matrix(self) -> np.ndarray:
        """Columns are the eigenvectors in label order."""
        return np.column_stack([v.amplitudes for v in self.vectors])


def canonical_phase(v: np.ndarray, tol: float = CHAINED_TOL) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    k = int(np.argmax(np.abs(v) > tol))
    out = v * (abs(v[k]) / v[k])
    out[k] = abs(v[k])
    return out


def _check_pm1_spectrum(P: TemporalOperator):
    if not P.hermitian:
        raise ContractViolation(f"temporal operator {P.label!r} is not hermitian")
    vals, _ = eig_hermitian(P.dense)
    if not np.allclose(vals, [-1, -1, 1, 1], atol=CHAINED_TOL):
        raise UnsupportedInputError(
            f"operator {P.label!r} spectrum {np.round(vals, 6)} is not doubly degenerate +-1"
        )


def simultaneous_eigenhistories(P: TemporalOperator, Q: TemporalOperator) -> EigenhistoryBasis:
    """Joint eigenbasis of two commuting involutions on history space.

    Labels are ``(lambda_P, lambda_Q)`` ordered ++, +-, -+, --.
    """
    _check_pm1_spectrum(P)
    _check_pm1_spectrum(Q)
    if commutator_norm(P, Q) > CHAINED_TOL:
        raise ContractViolation(f"{P.label!r} and {Q.label!r} do not commute")
    # P + 3Q has distinct eigenvalues +-4, +-2 on the four joint sectors
    vals, vecs = eig_hermitian(P.dense + 3 * Q.dense)
    if np.min(np.diff(vals)) < 1.0:
        # P = +-Q: fall back to per-sector projection
        vecs = _sector_vectors(P, Q)
    found = {}
    for v in vecs:
        lp = round(float(np.vdot(v, P.dense @ v).real))
        lq = round(float(np.vdot(v, Q.dense @ v).real))
        found[(lp, lq)] = canonical_phase(v)
    order = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    missing = [o for o in order if o not in found]
    if missing:
        raise UnsupportedInputError(f"joint sectors {missing} are empty; pair is degenerate")
    return EigenhistoryBasis(tuple(HistoryState(found[o]) for o in order), tuple(order))


def _sector_vectors(P: TemporalOperator, Q: TemporalOperator) -> list[np.ndarray]:
    out = []
    for sp in (1, -1):
        for sq in (1, -1):
            proj = P.projector(sp) @ Q.projector(sq)
            vals, vecs = eig_hermitian((proj + proj.conj().T) / 2)
            out.extend(v for lam, v in zip(vals, vecs) if lam > 0.5)
    return out


def projector_completeness(P: TemporalOperator, Q: TemporalOperator) -> np.ndarray:
    """Sum over sign pairs of (1 +- P)/2 (1 +- Q)/2; identity when P, Q commute."""
    return sum(P.projector(a) @ Q.projector(b) for a in (1, -1) for b in (1, -1))
