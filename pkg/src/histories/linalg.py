"""Dense complex linear algebra for qubit registers.

States are 1-d ``complex128`` arrays and operators are square 2-d arrays.
Basis ordering is fixed: index 0 is spin up (z+), index 1 is spin down (z-),
and multi-qubit registers use left-major (``np.kron``) ordering, so the
leftmost factor indexes the slowest-varying digit.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DimensionError

EXACT_TOL = 1e-12
CHAINED_TOL = 1e-10

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)

I2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {0: I2, 1: SIGMA1, 2: SIGMA2, 3: SIGMA3}


def as_state(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"state must be a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("state has non-finite amplitudes")
    return arr


def as_operator(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"operator must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("operator has non-finite entries")
    return arr


def kron(*factors) -> np.ndarray:
    """Tensor product of states or of operators, left factor slowest."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    ndims = {np.ndim(f) for f in factors}
    if len(ndims) != 1:
        raise DimensionError("kron operands must all be states or all be operators")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def kron_list(factors: Iterable) -> np.ndarray:
    return kron(*list(factors))


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    u, v = as_state(u), as_state(v)
    if u.shape != v.shape:
        raise DimensionError(f"inner product of dim {u.size} with dim {v.size}")
    return complex(np.vdot(u, v))


def norm(v) -> float:
    return float(np.linalg.norm(as_state(v)))


def normalize(v) -> np.ndarray:
    v = as_state(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise ContractViolation("cannot normalize the zero vector")
    return v / n


def outer(u, v=None) -> np.ndarray:
    u = as_state(u)
    v = u if v is None else as_state(v)
    return np.outer(u, v.conj())


def dagger(m) -> np.ndarray:
    return np.asarray(m, dtype=complex).conj().T


def commutator(p, q) -> np.ndarray:
    return p @ q - q @ p


def anticommutator(p, q) -> np.ndarray:
    return p @ q + q @ p


def is_hermitian(m, tol: float = EXACT_TOL) -> bool:
    m = as_operator(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def is_unitary(m, tol: float = CHAINED_TOL) -> bool:
    m = as_operator(m)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])), initial=0.0) <= tol)


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem of ``rho`` whose index is not in ``keep``.

    ``dims`` lists subsystem dimensions in register order. Kept subsystems
    stay in their original relative order.
    """
    rho = as_operator(rho)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims) or int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {dims} do not factor an operator of size {rho.shape[0]}")
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # trace from the highest axis down so lower axis numbers stay valid
    for ax in reversed(range(n)):
        if ax in keep:
            continue
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def eig_hermitian(op, tol: float = CHAINED_TOL) -> tuple[np.ndarray, list[np.ndarray]]:
    """Ascending eigenvalues and orthonormal eigenvectors of a hermitian matrix."""
    op = as_operator(op)
    if not is_hermitian(op, tol):
        raise ContractViolation("eig_hermitian requires a hermitian operator")
    vals, vecs = np.linalg.eigh((op + op.conj().T) / 2)
    return vals, [vecs[:, k].copy() for k in range(vecs.shape[1])]


def eigenspaces(op, tol: float = 1e-8) -> list[tuple[float, np.ndarray]]:
    """Group the spectrum of a hermitian matrix into (eigenvalue, projector) pairs."""
    vals, vecs = eig_hermitian(op)
    groups: list[list[int]] = []
    for k in range(len(vals)):
        if groups and abs(vals[k] - vals[groups[-1][-1]]) <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    out = []
    for g in groups:
        V = np.column_stack([vecs[k] for k in g])
        out.append((float(np.mean(vals[g])), V @ V.conj().T))
    return out


def spin_dot() -> np.ndarray:
    """s1 . s2 on two qubits with s = sigma / 2."""
    return sum(kron(PAULI[k], PAULI[k]) for k in (1, 2, 3)) / 4


def embed(op, position: int, dims: Sequence[int]) -> np.ndarray:
    """Lift a single-subsystem operator to the full register."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    if as_operator(op).shape[0] != dims[position]:
        raise DimensionError("operator does not match subsystem dimension")
    factors[position] = op
    return kron_list(factors)


def apply_on(state, op, position: int, dims: Sequence[int]) -> np.ndarray:
    """Apply one- or multi-subsystem ``op`` starting at ``position``."""
    state = as_state(state)
    op = as_operator(op)
    dims = list(dims)
    # find how many consecutive subsystems op spans
    span, acc = 0, 1
    while acc < op.shape[0]:
        acc *= dims[position + span]
        span += 1
    if acc != op.shape[0]:
        raise DimensionError("operator does not align with subsystem boundaries")
    left = int(np.prod(dims[:position]))
    right = int(np.prod(dims[position + span:]))
    t = state.reshape(left, acc, right)
    return np.einsum("ij,ajb->aib", op, t).reshape(-1)


def contract(state, bra, position: int, dims: Sequence[int]) -> np.ndarray:
    """Apply <bra| to subsystem ``position``, removing it from the register."""
    state = as_state(state)
    bra = as_state(bra)
    dims = list(dims)
    if bra.size != dims[position]:
        raise DimensionError("bra does not match subsystem dimension")
    left = int(np.prod(dims[:position]))
    right = int(np.prod(dims[position + 1:]))
    t = state.reshape(left, dims[position], right)
    return np.einsum("j,ajb->ab", bra.conj(), t).reshape(-1)
