"""Command line front end: ``histories run|check|sweep SCENARIO``.

Exit status 0 on success, 2 when the scenario fails validation, 3 when a
run fails (e.g. an impossible post-selection).
"""
from __future__ import annotations

import argparse
import sys

from .errors import HistoriesError
from .scenario import (
    ScenarioError,
    emit_report,
    load_scenario,
    run_scenario,
    with_overrides,
)

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="histories", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("scenario", help="scenario file (TOML)")
        sp.add_argument("--seed", type=_seed, help="override the scenario seed")
        sp.add_argument("--shots", type=_nonneg, help="override the number of sampled shots")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="write the report here instead of stdout")

    common(sub.add_parser("run", help="run a scenario and emit its report"))
    sp = sub.add_parser("sweep", help="run with grid sizes overridden")
    common(sp)
    sp.add_argument("--n-theta", type=_positive, help="multicopy_sweep: theta grid points")
    sp.add_argument("--n-phi", type=_positive, help="multicopy_sweep: phi grid points")
    sp.add_argument("--points", type=_positive, help="two_slit: number of screen points")
    ck = sub.add_parser("check", help="validate a scenario without running it")
    ck.add_argument("scenario")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read {args.scenario}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except ScenarioError as exc:
        print(f"invalid scenario {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "check":
        print(f"ok: {args.scenario} (kind={scenario.kind})")
        return EXIT_OK

    grid = {}
    if args.command == "sweep":
        grid = {"n_theta": args.n_theta, "n_phi": args.n_phi, "points": args.points}
    try:
        scenario = with_overrides(scenario, seed=args.seed, shots=args.shots, **grid)
    except ScenarioError as exc:
        print(f"invalid scenario {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        report = run_scenario(scenario)
    except HistoriesError as exc:
        print(f"run failed for {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    data = emit_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
