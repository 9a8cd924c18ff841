"""Finite outcome distributions and reproducible shot sampling.

Sampling uses numpy's Philox4x32-10 counter-based bit generator keyed by the
64-bit seed. Each shot is a uniform double in [0, 1) mapped through the
inverse CDF of the outcome list in its stored order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import CHAINED_TOL


@dataclass(frozen=True)
class OutcomeDistribution:
    labels: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.probabilities):
            raise ValueError("labels and probabilities differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("outcome labels must be unique")
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < -CHAINED_TOL) or np.any(p > 1 + CHAINED_TOL):
            raise ValueError(f"probabilities outside [0, 1]: {p}")
        if abs(p.sum() - 1.0) > CHAINED_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")

    @classmethod
    def from_weights(cls, labels: Sequence[str], weights: Sequence[float]):
        """Build from nonnegative weights, clipping roundoff and renormalizing."""
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        # roundoff-level weights become exact zeros
        w[w < 1e-15 * w.max(initial=0.0)] = 0.0
        total = w.sum()
        if total <= 0:
            raise ValueError("all outcome weights are zero")
        return cls(tuple(labels), tuple(float(x) for x in w / total))

    def __getitem__(self, label: str) -> float:
        return self.probabilities[self.labels.index(label)]

    def __len__(self):
        return len(self.labels)

    def items(self):
        return zip(self.labels, self.probabilities)

    def sample_indices(self, shots: int, seed: int) -> np.ndarray:
        if shots < 0:
            raise ValueError("shots must be non-negative")
        rng = np.random.Generator(np.random.Philox(key=int(seed) % 2**64))
        u = rng.random(shots)
        cdf = np.cumsum(self.probabilities)
        cdf[-1] = 1.0
        return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)

    def sample_counts(self, shots: int, seed: int) -> dict[str, int]:
        idx = self.sample_indices(shots, seed)
        counts = np.bincount(idx, minlength=len(self.labels))
        return {lab: int(c) for lab, c in zip(self.labels, counts)}
