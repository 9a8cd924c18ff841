#!/usr/bin/env python
"""Walk through the z+ / x-then-z monitor example and its three readouts."""
import numpy as np

from histories.history import X_BASIS, Z_BASIS, build_history, product_coefficients, schmidt_rank
from histories.linalg import I2, UP
from histories.monitor import (
    MeasurementSpec,
    bell_set,
    collapse_past,
    measure_monitors,
    monitor_matches_history,
    project_and_extract,
    run_protocol,
)
from histories.temporal import A, B, simultaneous_eigenhistories


def show(title, dist):
    print(title)
    for label, p in dist.items():
        print(f"  {label:8s} {p:.6f}")


def main():
    joint = run_protocol(UP, I2, X_BASIS, Z_BASIS)
    res = project_and_extract(joint, Z_BASIS)
    hist = build_history(UP, I2, X_BASIS, Z_BASIS)
    print(f"post-selection probability: {res.success_probability:.6f}")
    print(f"fidelity with history state: {monitor_matches_history(res, hist):.12f}")
    c = product_coefficients(res.monitor_state, Z_BASIS, X_BASIS)
    print("monitor coefficients on z+x+, z+x-, z-x+, z-x-:", np.round(c.real, 6))

    show("product readout", measure_monitors(res, MeasurementSpec.product(Z_BASIS, X_BASIS)))
    bell = bell_set(Z_BASIS, X_BASIS)
    show("Bell-type readout", measure_monitors(res, bell))
    print("  past implied by phi-: schmidt rank", schmidt_rank(collapse_past(bell, 1)))

    basis = simultaneous_eigenhistories(A, B)
    spec = MeasurementSpec.orthonormal_set([v.amplitudes for v in basis.vectors], basis.names)
    show("temporal (A, B) readout", measure_monitors(res, spec))


if __name__ == "__main__":
    main()
