"""Monitored two-slit experiment with point slits and one monitor per slit.

Registers: photon path (path1, path2) followed by monitors M1, M2, each
starting spin down. A monitor flips iff the photon goes through its slit.
Screen detection at a point cannot tell the two paths apart, so both path
kets land on the same "arrived here" photon state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, PostSelectionError
from .linalg import (
    CHAINED_TOL,
    DOWN,
    EXACT_TOL,
    I2,
    SIGMA1,
    SIGMA3,
    UP,
    as_operator,
    eigenspaces,
    embed,
    is_hermitian,
    kron,
    outer,
    partial_trace,
    spin_dot,
)

PATH1 = np.array([1, 0], dtype=complex)
PATH2 = np.array([0, 1], dtype=complex)
SCREEN_DIMS = (2, 2, 2)

UP_DOWN = kron(UP, DOWN)
DOWN_UP = kron(DOWN, UP)
SINGLET = (UP_DOWN - DOWN_UP) / np.sqrt(2)
TRIPLET_ZERO = (UP_DOWN + DOWN_UP) / np.sqrt(2)

SPIN_DOT = spin_dot()
TRIPLET_PROJECTOR = 0.75 * np.eye(4) + SPIN_DOT
SINGLET_PROJECTOR = 0.25 * np.eye(4) - SPIN_DOT
TOTAL_SPIN_SQUARED = 1.5 * np.eye(4) + 2 * SPIN_DOT

# photon detection at one screen point: both paths -> "arrived" (index 0)
DETECT = np.array([[1, 1], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class SlitAmplitudes:
    a: complex
    b: complex

    @property
    def intensity(self) -> float:
        return abs(self.a) ** 2 + abs(self.b) ** 2


def phase_difference_amplitudes(delta: float) -> SlitAmplitudes:
    """a = e^{i delta/2}/sqrt2, b = e^{-i delta/2}/sqrt2."""
    r = 1 / np.sqrt(2)
    return SlitAmplitudes(r * np.exp(0.5j * delta), r * np.exp(-0.5j * delta))


@dataclass(frozen=True)
class ScreenModel:
    """Screen points parametrised by the slit phase difference, or an explicit
    per-point amplitude table (which then overrides the phase rule)."""

    points: tuple[float, ...]
    table: tuple[SlitAmplitudes, ...] | None = None

    def __post_init__(self):
        if self.table is not None and len(self.table) != len(self.points):
            raise ValueError("amplitude table length must match the number of points")
        for amp in self.amplitudes():
            if not (np.isfinite(amp.a) and np.isfinite(amp.b)):
                raise ContractViolation("screen amplitudes must be finite")

    @classmethod
    def phase_grid(cls, count: int, start: float = -2 * np.pi, stop: float = 2 * np.pi):
        return cls(tuple(float(x) for x in np.linspace(start, stop, count)))

    def amplitudes(self) -> list[SlitAmplitudes]:
        if self.table is not None:
            return list(self.table)
        return [phase_difference_amplitudes(d) for d in self.points]


def slit_cnot(photon_branch: str, monitor) -> np.ndarray:
    """Flip the monitor iff the photon passed this slit ('Y'); leave it for 'N'."""
    if photon_branch not in ("Y", "N"):
        raise ValueError("photon branch must be 'Y' or 'N'")
    gate = SIGMA1 if photon_branch == "Y" else I2
    return gate @ np.asarray(monitor, dtype=complex)


def which_path_state(s: SlitAmplitudes) -> np.ndarray:
    """a |path1>|M1 M2> + b |path2>|M1 M2> after both slit couplings."""
    out = np.zeros(8, dtype=complex)
    for amp, path, through1 in ((s.a, PATH1, True), (s.b, PATH2, False)):
        m1 = slit_cnot("Y" if through1 else "N", DOWN)
        m2 = slit_cnot("N" if through1 else "Y", DOWN)
        out += amp * kron(path, m1, m2)
    return out


def joint_state_at_screen(s: SlitAmplitudes) -> np.ndarray:
    """Photon x M1 x M2 given arrival at the screen point; unnormalized,
    with squared norm |a|^2 + |b|^2."""
    return kron(DETECT, np.eye(4)) @ which_path_state(s)


def monitor_vector(s: SlitAmplitudes) -> np.ndarray:
    """Unnormalized monitor state a|up down> + b|down up> at the screen point."""
    return s.a * UP_DOWN + s.b * DOWN_UP


def monitor_density(s: SlitAmplitudes) -> np.ndarray:
    """Unnormalized 4x4 monitor density matrix, photon traced out."""
    psi = joint_state_at_screen(s)
    return partial_trace(outer(psi), SCREEN_DIMS, [1, 2])


def density_block(s: SlitAmplitudes) -> np.ndarray:
    """The 2x2 block [[|a|^2, a b*], [b a*, |b|^2]] on span{|up down>, |down up>}."""
    return np.array(
        [[abs(s.a) ** 2, s.a * np.conj(s.b)], [s.b * np.conj(s.a), abs(s.b) ** 2]]
    )


def _intensity(vec: np.ndarray, proj: np.ndarray) -> float:
    return float(np.vdot(vec, proj @ vec).real)


def pattern_given_z_readout(s: SlitAmplitudes, which: str, outcome: str) -> float:
    if which not in ("M1", "M2") or outcome not in ("up", "down"):
        raise ValueError("readout is (M1|M2, up|down)")
    ket = UP if outcome == "up" else DOWN
    proj = embed(outer(ket), 0 if which == "M1" else 1, (2, 2))
    value = _intensity(monitor_vector(s), proj)
    if value <= EXACT_TOL**2:
        raise PostSelectionError(f"{which} reads {outcome} with zero probability here")
    return value


def pattern_given_total_spin(s: SlitAmplitudes, total_spin: int, monitors=None) -> float:
    """Screen intensity conditioned on the monitors' total spin (0 or 1)."""
    if total_spin not in (0, 1):
        raise ValueError("total spin must be 0 or 1")
    proj = TRIPLET_PROJECTOR if total_spin == 1 else SINGLET_PROJECTOR
    vec = monitor_vector(s) if monitors is None else monitors
    return _intensity(vec, proj)


def phase_shift(monitors, which: str, angle: float) -> np.ndarray:
    """Apply diag(1, e^{i angle}) to one monitor."""
    gate = np.diag([1, np.exp(1j * angle)])
    return embed(gate, 0 if which == "M1" else 1, (2, 2)) @ np.asarray(monitors, dtype=complex)


def observable_sectors(obs) -> list[tuple[float, np.ndarray]]:
    obs = as_operator(obs)
    if obs.shape != (4, 4) or not is_hermitian(obs, CHAINED_TOL):
        raise ContractViolation("monitor observable must be a hermitian 4x4 matrix")
    return eigenspaces(obs)


def pattern_given_observable(s: SlitAmplitudes, obs, sector: int) -> float:
    """Intensity in one eigenspace of ``obs`` (sectors in ascending eigenvalue order)."""
    sectors = observable_sectors(obs)
    return _intensity(monitor_vector(s), sectors[sector][1])


def spin_x_on(which: str) -> np.ndarray:
    return embed(SIGMA1 / 2, 0 if which == "M1" else 1, (2, 2))


def peculiar_combination(beta: float) -> np.ndarray:
    """s1 . s2 + beta s1^x."""
    return SPIN_DOT + beta * spin_x_on("M1")


def epr_from_screen(s: SlitAmplitudes) -> np.ndarray:
    """Normalized monitor pair left behind by a photon detected at this point."""
    if s.intensity <= EXACT_TOL**2:
        raise PostSelectionError("photon never arrives here, no monitor state to condition on")
    return monitor_vector(s) / np.sqrt(s.intensity)


def sz_on_m1() -> np.ndarray:
    return embed(SIGMA3, 0, (2, 2))
