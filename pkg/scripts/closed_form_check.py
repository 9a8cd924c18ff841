#!/usr/bin/env python
"""Compare the printed P(++) formula with brute-force decomposition on a grid."""
from __future__ import annotations

import argparse
import csv
import sys

from histories.multicopy import (
    angle_grid,
    decompose_history,
    probability_vpp_closed_form,
    probability_vpp_corrected,
)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-theta", type=int, default=20)
    p.add_argument("--n-phi", type=int, default=20)
    p.add_argument("--csv", help="write the per-point comparison here")
    args = p.parse_args()

    rows = []
    for ang in angle_grid(args.n_theta, args.n_phi):
        brute = decompose_history(ang.state()).probability("++")
        rows.append((ang.theta, ang.phi, brute, probability_vpp_closed_form(ang), probability_vpp_corrected(ang)))

    printed_err = max(abs(r[2] - r[3]) for r in rows)
    corrected_err = max(abs(r[2] - r[4]) for r in rows)
    print(f"grid {args.n_theta}x{args.n_phi}")
    print(f"max |brute - printed form|   = {printed_err:.3e}")
    print(f"max |brute - corrected form| = {corrected_err:.3e}")
    print(f"max |P(++) - 1/4|            = {max(abs(r[2] - 0.25) for r in rows):.4f}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "phi", "brute_force", "printed_form", "corrected_form"])
            w.writerows([[f"{x:#.12g}" for x in r] for r in rows])
        print(f"wrote {args.csv}", file=sys.stderr)


if __name__ == "__main__":
    main()
