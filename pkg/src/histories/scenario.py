"""Scenario files: parsing, execution and report rendering.

Scenario files are TOML. Top-level keys are ``kind``, ``seed``, ``shots``
and a ``[parameters]`` table whose contents depend on ``kind``; see
``scenarios/`` in the repository and the README for the field reference.
"""
from __future__ import annotations

import io
import json
import math
import re
import sys
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import __version__
from .distribution import OutcomeDistribution
from .errors import HistoriesError
from .history import NAMED_BASES, NAMED_STATES, Basis, HistoryState, bloch_state, schmidt_rank
from .linalg import I2, SIGMA1, SIGMA2, SIGMA3, is_hermitian, kron
from .monitor import (
    MeasurementSpec,
    bell_set,
    measure_monitors,
    project_and_extract,
    run_protocol,
)
from .multicopy import (
    BlochAngles,
    angle_grid,
    decompose_history,
    probability_vpp_closed_form,
    probability_vpp_corrected,
)
from .temporal import make_temporal, simultaneous_eigenhistories
from . import two_slit as ts

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = ("eigenhistories", "monitor", "two_slit", "multicopy_sweep")
MATRIX_TOL = 1e-8

NAMED_GATES = {
    "identity": I2,
    "pauli_x": SIGMA1,
    "pauli_y": SIGMA2,
    "pauli_z": SIGMA3,
    "hadamard": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
}
NAMED_FACTORS = {
    "identity": I2,
    "sigma1": SIGMA1,
    "sigma2": SIGMA2,
    "sigma3": SIGMA3,
    "pauli_x": SIGMA1,
    "pauli_y": SIGMA2,
    "pauli_z": SIGMA3,
}


class ScenarioError(HistoriesError):
    """Invalid scenario document. ``field`` is a dotted path, ``line`` 1-based or None."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class MalformedScenarioError(ScenarioError):
    pass


class UnknownKindError(ScenarioError):
    pass


class NonUnitaryError(ScenarioError):
    pass


class NonOrthonormalBasisError(ScenarioError):
    pass


class ScenarioRuntimeError(HistoriesError):
    pass


@dataclass(frozen=True)
class EigenhistoriesParams:
    operators: tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    operator_names: tuple[str, str]
    initial: np.ndarray
    U: np.ndarray


@dataclass(frozen=True)
class MonitorParams:
    initial: np.ndarray
    U: np.ndarray
    B1: Basis
    B2: Basis
    measurement: MeasurementSpec


@dataclass(frozen=True)
class TwoSlitParams:
    screen: ts.ScreenModel
    readout: str
    observable: np.ndarray | None = None


@dataclass(frozen=True)
class SweepParams:
    n_theta: int = 20
    n_phi: int = 20
    point: BlochAngles = BlochAngles(math.pi / 2, math.pi / 4)


@dataclass(frozen=True)
class Scenario:
    kind: str
    parameters: Any
    seed: int = 0
    shots: int = 0
    source: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass(frozen=True)
class RunReport:
    exact_distribution: OutcomeDistribution
    sampled_counts: dict[str, int] | None
    tables: dict[str, Table]
    metadata: dict


# ---------------------------------------------------------------- parsing


class _Ctx:
    """Maps dotted field paths back to line numbers in the source text."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def line_of(self, path: str) -> int | None:
        key = path.split(".")[-1]
        key = re.sub(r"\[\d+\]$", "", key)
        pat = re.compile(rf"^\s*{re.escape(key)}\s*=")
        for i, ln in enumerate(self.lines, 1):
            if pat.match(ln):
                return i
        return None

    def fail(self, cls, message: str, path: str):
        raise cls(message, field=path, line=self.line_of(path))


def _number(x, path, ctx) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        ctx.fail(MalformedScenarioError, f"expected a number, got {x!r}", path)
    if not math.isfinite(x):
        ctx.fail(MalformedScenarioError, "value must be finite", path)
    return float(x)


def _complex(x, path, ctx) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            ctx.fail(MalformedScenarioError, "complex numbers are written [re, im]", path)
        return complex(_number(x[0], path, ctx), _number(x[1], path, ctx))
    return complex(_number(x, path, ctx))


def _vector(x, n, path, ctx) -> np.ndarray:
    if not isinstance(x, list) or len(x) != n:
        ctx.fail(MalformedScenarioError, f"expected a list of {n} amplitudes", path)
    return np.array([_complex(v, f"{path}[{i}]", ctx) for i, v in enumerate(x)])


def _matrix(x, n, path, ctx) -> np.ndarray:
    if not isinstance(x, list) or len(x) != n:
        ctx.fail(MalformedScenarioError, f"expected a {n}x{n} matrix", path)
    return np.array([_vector(row, n, f"{path}[{i}]", ctx) for i, row in enumerate(x)])


def _angles(x, path, ctx) -> tuple[float, float]:
    extra = set(x) - {"theta", "phi"}
    if extra or "theta" not in x or "phi" not in x:
        ctx.fail(MalformedScenarioError, "Bloch angles need exactly 'theta' and 'phi'", path)
    return _number(x["theta"], f"{path}.theta", ctx), _number(x["phi"], f"{path}.phi", ctx)


def _state(x, path, ctx) -> np.ndarray:
    if isinstance(x, str):
        if x not in NAMED_STATES:
            ctx.fail(MalformedScenarioError, f"unknown state {x!r}; use one of {sorted(NAMED_STATES)}", path)
        return NAMED_STATES[x].copy()
    if isinstance(x, dict):
        return bloch_state(*_angles(x, path, ctx))
    v = _vector(x, 2, path, ctx)
    if abs(np.linalg.norm(v) - 1) > MATRIX_TOL:
        ctx.fail(MalformedScenarioError, "state is not unit-norm", path)
    return v / np.linalg.norm(v)


def _unitary(x, path, ctx) -> np.ndarray:
    if isinstance(x, str):
        m = re.fullmatch(r"phase\(\s*([-+0-9.eE]+)\s*\)", x)
        if m:
            try:
                lam = float(m.group(1))
            except ValueError:
                ctx.fail(MalformedScenarioError, f"bad phase angle in {x!r}", path)
            return np.diag([1, np.exp(1j * lam)])
        if x not in NAMED_GATES:
            ctx.fail(
                MalformedScenarioError,
                f"unknown gate {x!r}; use one of {sorted(NAMED_GATES)} or phase(lambda)",
                path,
            )
        return NAMED_GATES[x].copy()
    if isinstance(x, dict):
        if x.get("name") != "phase" or set(x) != {"name", "lambda"}:
            ctx.fail(MalformedScenarioError, "gate tables must be {name = \"phase\", lambda = ...}", path)
        return np.diag([1, np.exp(1j * _number(x["lambda"], f"{path}.lambda", ctx))])
    U = _matrix(x, 2, path, ctx)
    if np.max(np.abs(U.conj().T @ U - np.eye(2))) > MATRIX_TOL:
        ctx.fail(NonUnitaryError, "matrix is not unitary within 1e-8", path)
    # snap to the nearest unitary so downstream 1e-10 checks hold
    w, _, vh = np.linalg.svd(U)
    return w @ vh


def _basis(x, path, ctx) -> Basis:
    if isinstance(x, str):
        if x not in NAMED_BASES:
            ctx.fail(MalformedScenarioError, f"unknown basis {x!r}; use one of {sorted(NAMED_BASES)}", path)
        return NAMED_BASES[x]
    if isinstance(x, dict):
        theta, phi = _angles(x, path, ctx)
        return Basis.from_bloch(theta, phi, label=path.split(".")[-1])
    if not isinstance(x, list) or len(x) != 2:
        ctx.fail(MalformedScenarioError, "explicit basis is a list of two 2-vectors", path)
    a = _vector(x[0], 2, f"{path}[0]", ctx)
    b = _vector(x[1], 2, f"{path}[1]", ctx)
    gram = np.array([[np.vdot(a, a), np.vdot(a, b)], [np.vdot(b, a), np.vdot(b, b)]])
    if np.max(np.abs(gram - np.eye(2))) > MATRIX_TOL:
        ctx.fail(NonOrthonormalBasisError, "basis vectors are not orthonormal within 1e-8", path)
    a = a / np.linalg.norm(a)
    b = b - np.vdot(a, b) * a
    return Basis(a, b / np.linalg.norm(b), label=path.split(".")[-1])


def _factor(x, path, ctx) -> np.ndarray:
    if isinstance(x, str):
        if x not in NAMED_FACTORS:
            ctx.fail(MalformedScenarioError, f"unknown operator factor {x!r}", path)
        return NAMED_FACTORS[x]
    return _matrix(x, 2, path, ctx)


def _measurement(x, B1, B2, path, ctx) -> MeasurementSpec:
    if x == "product":
        return MeasurementSpec.product(B2, B1)
    if x == "bell":
        return bell_set(B2, B1)
    if x == "temporal":
        basis = simultaneous_eigenhistories(make_temporal(SIGMA2, SIGMA1), make_temporal(SIGMA1, SIGMA3))
        return MeasurementSpec.orthonormal_set([v.amplitudes for v in basis.vectors], basis.names)
    if not isinstance(x, dict) or "kind" not in x:
        ctx.fail(
            MalformedScenarioError,
            "measurement is 'product', 'bell', 'temporal' or a table with a 'kind'",
            path,
        )
    kind = x["kind"]
    if kind == "set":
        vecs = x.get("vectors")
        if not isinstance(vecs, list) or len(vecs) != 4:
            ctx.fail(MalformedScenarioError, "a set measurement lists four 4-vectors", f"{path}.vectors")
        V = [_vector(v, 4, f"{path}.vectors[{i}]", ctx) for i, v in enumerate(vecs)]
        M = np.column_stack(V)
        if np.max(np.abs(M.conj().T @ M - np.eye(4))) > MATRIX_TOL:
            ctx.fail(NonOrthonormalBasisError, "measurement vectors are not orthonormal", f"{path}.vectors")
        q, r = np.linalg.qr(M)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        names = x.get("names")
        if names is not None and (not isinstance(names, list) or len(names) != 4):
            ctx.fail(MalformedScenarioError, "names must list four labels", f"{path}.names")
        return MeasurementSpec.orthonormal_set([q[:, k] for k in range(4)], names)
    if kind == "observable":
        obs = _matrix(x.get("matrix"), 4, f"{path}.matrix", ctx)
        if not is_hermitian(obs, MATRIX_TOL):
            ctx.fail(MalformedScenarioError, "observable must be hermitian", f"{path}.matrix")
        return MeasurementSpec.hermitian_observable((obs + obs.conj().T) / 2)
    ctx.fail(MalformedScenarioError, f"unknown measurement kind {kind!r}", f"{path}.kind")


def _int(x, path, ctx, lo=0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < lo:
        ctx.fail(MalformedScenarioError, f"expected an integer >= {lo}", path)
    return x


def _check_keys(d: dict, allowed: set, path: str, ctx):
    for k in d:
        if k not in allowed:
            ctx.fail(MalformedScenarioError, f"unexpected key; allowed: {sorted(allowed)}", f"{path}.{k}")


def _parse_eigenhistories(p, ctx):
    _check_keys(p, {"operators", "initial", "U"}, "parameters", ctx)
    ops = p.get("operators", [["sigma2", "sigma1"], ["sigma1", "sigma3"]])
    if not isinstance(ops, list) or len(ops) != 2 or any(not isinstance(o, list) or len(o) != 2 for o in ops):
        ctx.fail(MalformedScenarioError, "operators is a pair of [later, earlier] factors", "parameters.operators")
    pairs = tuple(
        (_factor(o[0], f"parameters.operators[{i}]", ctx), _factor(o[1], f"parameters.operators[{i}]", ctx))
        for i, o in enumerate(ops)
    )
    names = tuple(
        "(.)".join(f if isinstance(f, str) else "matrix" for f in o) for o in ops
    )
    try:
        simultaneous_eigenhistories(make_temporal(*pairs[0]), make_temporal(*pairs[1]))
    except HistoriesError as exc:
        ctx.fail(MalformedScenarioError, str(exc), "parameters.operators")
    return EigenhistoriesParams(
        operators=pairs,
        operator_names=names,
        initial=_state(p.get("initial", "z+"), "parameters.initial", ctx),
        U=_unitary(p.get("U", "identity"), "parameters.U", ctx),
    )


def _parse_monitor(p, ctx):
    _check_keys(p, {"initial", "U", "B1", "B2", "measurement"}, "parameters", ctx)
    for req in ("initial", "B1", "B2"):
        if req not in p:
            ctx.fail(MalformedScenarioError, "required field missing", f"parameters.{req}")
    B1 = _basis(p["B1"], "parameters.B1", ctx)
    B2 = _basis(p["B2"], "parameters.B2", ctx)
    return MonitorParams(
        initial=_state(p["initial"], "parameters.initial", ctx),
        U=_unitary(p.get("U", "identity"), "parameters.U", ctx),
        B1=B1,
        B2=B2,
        measurement=_measurement(p.get("measurement", "product"), B1, B2, "parameters.measurement", ctx),
    )


def _parse_two_slit(p, ctx):
    _check_keys(p, {"phases", "amplitudes", "readout", "beta", "observable"}, "parameters", ctx)
    phases = p.get("phases", {"start": -2 * math.pi, "stop": 2 * math.pi, "count": 256})
    if isinstance(phases, dict):
        _check_keys(phases, {"start", "stop", "count"}, "parameters.phases", ctx)
        count = _int(phases.get("count", 256), "parameters.phases.count", ctx, lo=1)
        start = _number(phases.get("start", -2 * math.pi), "parameters.phases.start", ctx)
        stop = _number(phases.get("stop", 2 * math.pi), "parameters.phases.stop", ctx)
        points = tuple(float(x) for x in np.linspace(start, stop, count))
    elif isinstance(phases, list) and phases:
        points = tuple(_number(x, f"parameters.phases[{i}]", ctx) for i, x in enumerate(phases))
    else:
        ctx.fail(MalformedScenarioError, "phases is a {start, stop, count} table or a list", "parameters.phases")
    table = None
    if "amplitudes" in p:
        amps = p["amplitudes"]
        if not isinstance(amps, list) or not amps:
            ctx.fail(MalformedScenarioError, "amplitudes lists [a, b] per point", "parameters.amplitudes")
        table = tuple(
            ts.SlitAmplitudes(*_vector(row, 2, f"parameters.amplitudes[{i}]", ctx)) for i, row in enumerate(amps)
        )
        if "phases" not in p:
            points = tuple(float(i) for i in range(len(table)))
        elif len(table) != len(points):
            ctx.fail(MalformedScenarioError, "amplitude table and phases differ in length", "parameters.amplitudes")
    readout = p.get("readout", "total_spin")
    observable = None
    if readout == "peculiar":
        observable = ts.peculiar_combination(_number(p.get("beta", 0.0), "parameters.beta", ctx))
    elif readout == "observable":
        observable = _matrix(p.get("observable"), 4, "parameters.observable", ctx)
        if not is_hermitian(observable, MATRIX_TOL):
            ctx.fail(MalformedScenarioError, "observable must be hermitian", "parameters.observable")
    elif readout not in ("total_spin", "M1_z", "M2_z"):
        ctx.fail(
            MalformedScenarioError,
            "readout is one of total_spin, M1_z, M2_z, peculiar, observable",
            "parameters.readout",
        )
    return TwoSlitParams(ts.ScreenModel(points, table), readout, observable)


def _parse_sweep(p, ctx):
    _check_keys(p, {"n_theta", "n_phi", "point"}, "parameters", ctx)
    point = SweepParams.point
    if "point" in p:
        if not isinstance(p["point"], dict):
            ctx.fail(MalformedScenarioError, "point is a {theta, phi} table", "parameters.point")
        t, ph = _angles(p["point"], "parameters.point", ctx)
        try:
            point = BlochAngles(t, ph)
        except ValueError as exc:
            ctx.fail(MalformedScenarioError, str(exc), "parameters.point")
    return SweepParams(
        n_theta=_int(p.get("n_theta", 20), "parameters.n_theta", ctx, lo=1),
        n_phi=_int(p.get("n_phi", 20), "parameters.n_phi", ctx, lo=1),
        point=point,
    )


_PARSERS = {
    "eigenhistories": _parse_eigenhistories,
    "monitor": _parse_monitor,
    "two_slit": _parse_two_slit,
    "multicopy_sweep": _parse_sweep,
}


def parse_scenario(text: str) -> Scenario:
    ctx = _Ctx(text)
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise MalformedScenarioError(f"not valid TOML ({exc})", line=int(m.group(1)) if m else None) from None
    _check_keys(doc, {"kind", "seed", "shots", "parameters"}, "", ctx)
    kind = doc.get("kind")
    if kind is None:
        raise MalformedScenarioError("required field missing", field="kind")
    if kind not in KINDS:
        ctx.fail(UnknownKindError, f"unknown kind {kind!r}; expected one of {list(KINDS)}", "kind")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        ctx.fail(MalformedScenarioError, "seed must be an unsigned 64-bit integer", "seed")
    shots = _int(doc.get("shots", 0), "shots", ctx)
    params = doc.get("parameters", {})
    if not isinstance(params, dict):
        ctx.fail(MalformedScenarioError, "parameters must be a table", "parameters")
    try:
        parsed = _PARSERS[kind](params, ctx)
    except ScenarioError:
        raise
    except HistoriesError as exc:
        raise MalformedScenarioError(str(exc), field="parameters") from None
    return Scenario(kind, parsed, seed, shots, source=doc)


def load_scenario(path) -> Scenario:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedScenarioError(f"file is not UTF-8 ({exc})") from None
    return parse_scenario(text)


# ---------------------------------------------------------------- running


def _run_eigenhistories(p: EigenhistoriesParams):
    (pl, pe), (ql, qe) = p.operators
    P = make_temporal(pl, pe, p.operator_names[0])
    Q = make_temporal(ql, qe, p.operator_names[1])
    basis = simultaneous_eigenhistories(P, Q)
    history = HistoryState(kron(p.U @ p.initial, p.initial))
    weights = [abs(np.vdot(v.amplitudes, history.amplitudes)) ** 2 for v in basis.vectors]
    dist = OutcomeDistribution.from_weights(basis.names, weights)
    cols = ["label", "lambda_P", "lambda_Q", "schmidt_rank"]
    for k in range(4):
        cols += [f"amp{k}_re", f"amp{k}_im"]
    rows = []
    for name, (lp, lq), v in zip(basis.names, basis.labels, basis.vectors):
        row = [name, lp, lq, schmidt_rank(v)]
        for c in v.amplitudes:
            row += [c.real, c.imag]
        rows.append(tuple(row))
    return dist, {"eigenhistories": Table(tuple(cols), tuple(rows))}


def _run_monitor(p: MonitorParams):
    from .history import build_history, product_coefficients
    from .monitor import monitor_matches_history

    joint = run_protocol(p.initial, p.U, p.B1, p.B2)
    result = project_and_extract(joint, p.B2)
    dist = measure_monitors(result, p.measurement)
    history = build_history(p.initial, p.U, p.B1, p.B2)
    coeffs = product_coefficients(result.monitor_state, p.B2, p.B1)
    rows = tuple(
        (f"{ny}*{nx}", coeffs[2 * i + j].real, coeffs[2 * i + j].imag)
        for i, ny in enumerate(p.B2.names)
        for j, nx in enumerate(p.B1.names)
    )
    summary = Table(
        ("success_probability", "history_fidelity"),
        ((result.success_probability, monitor_matches_history(result, history)),),
    )
    return dist, {"monitor_state": Table(("component", "re", "im"), rows), "summary": summary}


def _two_slit_sectors(p: TwoSlitParams):
    """(name, intensity function) per readout sector."""
    if p.readout == "total_spin":
        return [
            ("S1", lambda s: ts.pattern_given_total_spin(s, 1)),
            ("S0", lambda s: ts.pattern_given_total_spin(s, 0)),
        ]
    if p.readout in ("M1_z", "M2_z"):
        which = p.readout[:2]

        def z(outcome):
            def f(s):
                try:
                    return ts.pattern_given_z_readout(s, which, outcome)
                except HistoriesError:
                    return 0.0
            return f

        return [(f"{which}up", z("up")), (f"{which}down", z("down"))]
    sectors = ts.observable_sectors(p.observable)
    out = []
    for k, (lam, _) in enumerate(sectors):
        out.append((f"L{k}", (lambda kk: lambda s: ts.pattern_given_observable(s, p.observable, kk))(k)))
    return out


def _run_two_slit(p: TwoSlitParams):
    sectors = _two_slit_sectors(p)
    cols = ["point", "delta", "a_re", "a_im", "b_re", "b_im", "intensity_total"]
    cols += [f"intensity_{name}" for name, _ in sectors]
    rows, labels, weights = [], [], []
    for k, (delta, s) in enumerate(zip(p.screen.points, p.screen.amplitudes())):
        vals = [f(s) for _, f in sectors]
        rows.append((k, delta, s.a.real, s.a.imag, s.b.real, s.b.imag, s.intensity, *vals))
        for (name, _), v in zip(sectors, vals):
            labels.append(f"p{k}:{name}")
            weights.append(v)
    try:
        dist = OutcomeDistribution.from_weights(labels, weights)
    except ValueError as exc:
        raise ScenarioRuntimeError(f"two_slit scenario: {exc}") from None
    tables = {"pattern": Table(tuple(cols), tuple(rows))}
    if p.observable is not None:
        sec = ts.observable_sectors(p.observable)
        tables["sectors"] = Table(("sector", "eigenvalue"), tuple((f"L{k}", lam) for k, (lam, _) in enumerate(sec)))
    return dist, tables


def _run_sweep(p: SweepParams):
    rows = []
    for ang in angle_grid(p.n_theta, p.n_phi):
        d = decompose_history(ang.state())
        rows.append(
            (ang.theta, ang.phi, *d.probabilities, probability_vpp_closed_form(ang), probability_vpp_corrected(ang))
        )
    cols = ("theta", "phi", "p_pp", "p_pm", "p_mp", "p_mm", "closed_form", "corrected_form")
    d = decompose_history(p.point.state())
    dist = OutcomeDistribution.from_weights(("++", "+-", "-+", "--"), d.probabilities)
    return dist, {"sweep": Table(cols, tuple(rows))}


_RUNNERS = {
    "eigenhistories": _run_eigenhistories,
    "monitor": _run_monitor,
    "two_slit": _run_two_slit,
    "multicopy_sweep": _run_sweep,
}


def run_scenario(s: Scenario) -> RunReport:
    try:
        dist, tables = _RUNNERS[s.kind](s.parameters)
    except ScenarioRuntimeError:
        raise
    except HistoriesError as exc:
        raise ScenarioRuntimeError(f"{s.kind} scenario: {exc}") from exc
    counts = dist.sample_counts(s.shots, s.seed) if s.shots > 0 else None
    meta = {
        "kind": s.kind,
        "seed": s.seed,
        "shots": s.shots,
        "scenario": s.source,
        "tool": "histories",
        "version": __version__,
        "prng": "numpy Philox4x32-10, key=seed, inverse-CDF on uniform doubles",
    }
    return RunReport(dist, counts, tables, meta)


def with_overrides(s: Scenario, seed=None, shots=None, **grid) -> Scenario:
    """Replace seed/shots and, for sweep-like kinds, grid sizes."""
    p = s.parameters
    grid = {k: v for k, v in grid.items() if v is not None}
    if grid:
        if s.kind == "multicopy_sweep":
            p = replace(p, **{k: grid[k] for k in ("n_theta", "n_phi") if k in grid})
        elif s.kind == "two_slit" and "points" in grid:
            if p.screen.table is not None:
                raise MalformedScenarioError("cannot regrid an explicit amplitude table", field="parameters.amplitudes")
            pts = p.screen.points
            lo, hi = (pts[0], pts[-1]) if len(pts) > 1 else (-2 * math.pi, 2 * math.pi)
            p = replace(p, screen=ts.ScreenModel(tuple(float(x) for x in np.linspace(lo, hi, grid["points"]))))
        else:
            raise MalformedScenarioError(f"no grid to override for kind {s.kind!r}", field="kind")
    return replace(
        s,
        parameters=p,
        seed=s.seed if seed is None else seed,
        shots=s.shots if shots is None else shots,
    )


# ---------------------------------------------------------------- output


def fmt_number(x) -> str:
    """Decimal with 12 significant digits, trailing zeros kept."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0:
        x = 0.0
    return format(x, "#.12g")


def _cell(x) -> str:
    return x if isinstance(x, str) else fmt_number(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return 0.0 if x == 0 else x
    return x


def emit_report(r: RunReport, format: str = "csv") -> bytes:
    if format == "csv":
        return _emit_csv(r)
    if format == "json":
        return _emit_json(r)
    raise ValueError(f"unknown report format {format!r}")


def _emit_csv(r: RunReport) -> bytes:
    buf = io.StringIO(newline="")
    header = ["outcome", "probability"]
    if r.sampled_counts is not None:
        header.append("count")
    buf.write(",".join(header) + "\n")
    for label, p in r.exact_distribution.items():
        row = [label, fmt_number(p)]
        if r.sampled_counts is not None:
            row.append(str(r.sampled_counts[label]))
        buf.write(",".join(row) + "\n")
    for name in sorted(r.tables):
        t = r.tables[name]
        buf.write("\n")
        buf.write(",".join(t.columns) + "\n")
        for row in t.rows:
            buf.write(",".join(_cell(c) for c in row) + "\n")
    return buf.getvalue().encode("utf-8")


def _emit_json(r: RunReport) -> bytes:
    doc = {
        "exact_distribution": [
            {"outcome": lab, "probability": p} for lab, p in r.exact_distribution.items()
        ],
        "sampled_counts": r.sampled_counts,
        "tables": {
            name: {"columns": list(t.columns), "rows": [list(row) for row in t.rows]}
            for name, t in r.tables.items()
        },
        "metadata": r.metadata,
    }
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False)
    return (text + "\n").encode("utf-8")
