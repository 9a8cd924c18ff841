"""History states on the two-time space H(t2) (.) H(t1).

The leftmost slot is the later time, so ``amplitudes[2*i + j]`` is the
coefficient of |i> at t2 followed by |j> at t1 in the computational basis.
Numerically the temporal product is ``np.kron``; the :class:`HistoryState`
wrapper only records that the slots are times rather than subsystems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DimensionError, UndefinedInputError
from .linalg import CHAINED_TOL, EXACT_TOL, as_operator, as_state, inner, is_unitary, kron

SQRT1_2 = 1 / math.sqrt(2)


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """(cos(theta/2) e^{i phi/2}, sin(theta/2) e^{-i phi/2})."""
    return np.array(
        [math.cos(theta / 2) * np.exp(0.5j * phi), math.sin(theta / 2) * np.exp(-0.5j * phi)]
    )


def orthogonal_complement(v) -> np.ndarray:
    v = as_state(v)
    if v.size != 2:
        raise DimensionError("complement is defined for qubit states only")
    return np.array([-v[1].conj(), v[0].conj()])


@dataclass(frozen=True)
class Basis:
    """An ordered orthonormal qubit basis ``(first, second)``."""

    first: np.ndarray
    second: np.ndarray
    label: str = ""

    def __post_init__(self):
        a, b = as_state(self.first), as_state(self.second)
        if a.size != 2 or b.size != 2:
            raise DimensionError("basis vectors must be 2-dimensional")
        if abs(np.linalg.norm(a) - 1) > EXACT_TOL or abs(np.linalg.norm(b) - 1) > EXACT_TOL:
            raise ContractViolation(f"basis {self.label!r} vectors are not unit-norm")
        if abs(np.vdot(a, b)) > EXACT_TOL:
            raise ContractViolation(f"basis {self.label!r} vectors are not orthogonal")
        object.__setattr__(self, "first", a)
        object.__setattr__(self, "second", b)

    @classmethod
    def from_state(cls, v, label: str = "") -> "Basis":
        v = as_state(v)
        v = v / np.linalg.norm(v)
        return cls(v, orthogonal_complement(v), label)

    @classmethod
    def from_bloch(cls, theta: float, phi: float, label: str = "") -> "Basis":
        return cls.from_state(bloch_state(theta, phi), label)

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return self.first, self.second

    @property
    def names(self) -> tuple[str, str]:
        return f"{self.label}+", f"{self.label}-"

    @property
    def flip(self) -> np.ndarray:
        """Unitary exchanging the two basis vectors."""
        a, b = self.first, self.second
        return np.outer(a, b.conj()) + np.outer(b, a.conj())

    def coefficients(self, v) -> np.ndarray:
        v = as_state(v)
        return np.array([np.vdot(self.first, v), np.vdot(self.second, v)])

    def __iter__(self):
        return iter(self.vectors)


Z_BASIS = Basis(np.array([1, 0]), np.array([0, 1]), "z")
X_BASIS = Basis(np.array([1, 1]) * SQRT1_2, np.array([1, -1]) * SQRT1_2, "x")
Y_BASIS = Basis(np.array([1, 1j]) * SQRT1_2, np.array([1, -1j]) * SQRT1_2, "y")
NAMED_BASES = {"z": Z_BASIS, "x": X_BASIS, "y": Y_BASIS}
NAMED_STATES = {name: vec for b in NAMED_BASES.values() for name, vec in zip(b.names, b.vectors)}


@dataclass(frozen=True)
class HistoryState:
    amplitudes: np.ndarray
    slot_dims: tuple[int, int] = field(default=(2, 2))

    def __post_init__(self):
        amp = as_state(self.amplitudes)
        if amp.size != self.slot_dims[0] * self.slot_dims[1]:
            raise DimensionError(f"{amp.size} amplitudes for slot dims {self.slot_dims}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes as rows = t2 index, columns = t1 index."""
        return self.amplitudes.reshape(self.slot_dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "HistoryState":
        n = self.norm
        if n == 0:
            raise UndefinedInputError("zero history cannot be normalized")
        return HistoryState(self.amplitudes / n, self.slot_dims)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """Leading Schmidt vectors (later, earlier), scaled so odot() rebuilds
        the best rank-one approximation."""
        u, s, vh = np.linalg.svd(self.matrix)
        return u[:, 0] * s[0], vh[0, :]

    def __add__(self, other: "HistoryState") -> "HistoryState":
        return HistoryState(self.amplitudes + other.amplitudes, self.slot_dims)

    def __sub__(self, other: "HistoryState") -> "HistoryState":
        return HistoryState(self.amplitudes - other.amplitudes, self.slot_dims)

    def __mul__(self, c) -> "HistoryState":
        return HistoryState(self.amplitudes * c, self.slot_dims)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "HistoryState":
        return HistoryState(self.amplitudes / c, self.slot_dims)

    def allclose(self, other: "HistoryState", atol: float = EXACT_TOL) -> bool:
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))


def odot(later, earlier) -> HistoryState:
    later, earlier = as_state(later), as_state(earlier)
    if later.size != 2 or earlier.size != 2:
        raise DimensionError("odot takes two qubit states")
    return HistoryState(kron(later, earlier))


def transition_amplitude(U, x, y) -> complex:
    """<y|U|x>."""
    return complex(np.vdot(as_state(y), as_operator(U) @ as_state(x)))


def build_history(initial, U, B1: Basis, B2: Basis) -> HistoryState:
    """Sum over x in B1, y in B2 of <y|U|x> <x|initial> |y> (.) |x>."""
    initial = as_state(initial)
    U = as_operator(U)
    if U.shape != (2, 2) or initial.size != 2:
        raise DimensionError("build_history works on a single qubit")
    if not is_unitary(U, CHAINED_TOL):
        raise ContractViolation("time evolution U is not unitary")
    if abs(np.linalg.norm(initial) - 1) > CHAINED_TOL:
        raise ContractViolation("initial state is not unit-norm")
    total = np.zeros(4, dtype=complex)
    for x in B1:
        for y in B2:
            total += transition_amplitude(U, x, y) * np.vdot(x, initial) * kron(y, x)
    return HistoryState(total)


def product_coefficients(h, B2: Basis, B1: Basis) -> np.ndarray:
    """Expand a two-slot vector in the product basis B2 x B1.

    Order: (b a, b abar, bbar a, bbar abar), later slot first.
    """
    amp = h.amplitudes if isinstance(h, HistoryState) else as_state(h)
    return np.array([np.vdot(kron(y, x), amp) for y in B2 for x in B1])


def schmidt_rank(h: HistoryState, rel_tol: float = CHAINED_TOL) -> int:
    """Number of singular values of the t2-by-t1 amplitude matrix above
    ``rel_tol`` times the largest."""
    s = np.linalg.svd(h.matrix, compute_uv=False)
    if s[0] == 0:
        raise UndefinedInputError("schmidt rank of the zero history is undefined")
    return int(np.sum(s > rel_tol * s[0]))


def is_product_history(h: HistoryState, tol: float = CHAINED_TOL) -> bool:
    """True when h equals odot of its own marginals."""
    later, earlier = h.marginals()
    return h.allclose(odot(later, earlier), atol=tol)


def history_inner(g: HistoryState, h: HistoryState) -> complex:
    if g.slot_dims != h.slot_dims:
        raise DimensionError("histories live on different slot spaces")
    return inner(g.amplitudes, h.amplitudes)
