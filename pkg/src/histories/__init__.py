"""Temporal observables, history states and monitor-qubit protocols."""

__version__ = "0.1.0"
