#!/usr/bin/env python
"""Tabulate conditional screen patterns for the monitored two-slit setup."""
import argparse

import numpy as np

from histories import two_slit as ts


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=17)
    p.add_argument("--beta", type=float, default=0.5, help="weight of s1^x in the peculiar observable")
    args = p.parse_args()

    obs = ts.peculiar_combination(args.beta)
    n_sec = len(ts.observable_sectors(obs))
    head = ["delta", "total", "S1", "S0", "M1up"] + [f"L{k}" for k in range(n_sec)]
    print(" ".join(f"{h:>9s}" for h in head))
    for s, d in zip(ts.ScreenModel.phase_grid(args.points).amplitudes(), np.linspace(-2 * np.pi, 2 * np.pi, args.points)):
        vals = [
            d,
            s.intensity,
            ts.pattern_given_total_spin(s, 1),
            ts.pattern_given_total_spin(s, 0),
            ts.pattern_given_z_readout(s, "M1", "up"),
        ] + [ts.pattern_given_observable(s, obs, k) for k in range(n_sec)]
        print(" ".join(f"{v:9.5f}" for v in vals))


if __name__ == "__main__":
    main()
