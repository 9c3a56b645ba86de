"""Command-line front end: JSON/flag configs in, JSON reports and CSV out.

Subcommands: ``qfim``, ``scenario <id>``, ``bounds``, ``measurement``,
``gaussian``, ``grape``, ``thermo``.  Any sweepable parameter may be a
comma-separated list (or a JSON list in ``--config``); the cartesian product
of listed parameters forms a grid with one CSV row per point.  Reports are
written atomically with floats at 17 significant digits, so identical configs
produce byte-identical files up to the ``timing`` block.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ConfigError, DomainError, NumericalFailureError
from .families import FAMILIES, GAUSSIAN_PRESETS, attainability_payload, qubit_theta_phi_family
from .grape import ControlProblem, grape_run, objective_value, propagate
from .measurement import sld_measurement
from .numerics import PAULI_X, PAULI_Y, PAULI_Z
from .qfim_core import crb_report, qfim_general, sld_compute
from .scenarios import (
    scenario_controlled_field,
    scenario_dephasing_qubit,
    scenario_ecs,
    scenario_mzi_double_phase,
    scenario_noon,
    scenario_spin_field,
    scenario_two_qubit_ancilla,
    squeezed_vacuum_fock,
)
from .states import spectral_decompose, state_derivatives

REPORT_SCHEMA = "qmetro.report.v1"
CSV_SCHEMA = "qmetro.grid.v1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("qfim", "scenario", "bounds", "measurement", "gaussian", "grape", "thermo")

_COMMON_KEYS = {"command", "out", "csv", "seed", "tol", "n"}
_ALLOWED_KEYS = {
    "qfim": _COMMON_KEYS | {"family", "params", "fixed"},
    "bounds": _COMMON_KEYS | {"family", "params", "fixed"},
    "measurement": _COMMON_KEYS | {"family", "params", "fixed", "param_index"},
    "scenario": _COMMON_KEYS | {"scenario", "params"},
    "gaussian": _COMMON_KEYS | {"preset", "params", "fixed"},
    "thermo": _COMMON_KEYS | {"params", "fixed"},
    "grape": _COMMON_KEYS | {"grape"},
}

SCENARIO_PARAMS = {
    "dephasing": {"B": 1.0, "gamma": 0.1, "t": 1.0},
    "spin-field": {"B": 1.0, "theta": 0.5, "t": 1.0, "r_in": (0.0, 1.0, 0.0)},
    "two-qubit-ancilla": {"B": 1.0, "theta": 0.5, "phi": 0.3, "t": 1.0},
    "controlled-field": {"B": 1.0, "theta": 0.5, "phi": 0.3, "dt": 0.2, "N": 4},
    "mzi": {"alpha": 1.0, "chi": "vacuum", "r": 0.5, "cutoff": 30},
    "noon": {"d": 2, "N": 2, "c1": 0.5},
    "ecs": {"d": 2, "alpha": 2.0, "c1": 0.4},
}

GRAPE_KEYS = {
    "preset", "B", "gamma", "T", "slices", "controls", "objective",
    "learning_rate", "max_iterations", "tolerance", "init", "init_scale", "seed",
}


# ---------------------------------------------------------------------------
# Deterministic serialization: floats at 17 significant digits.

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def _serialize(obj, pieces: list, indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, bool):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(_fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        pieces.append(f'{{"imag": {_fmt_float(obj.imag)}, "real": {_fmt_float(obj.real)}}}')
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _serialize(obj.tolist(), pieces, indent)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            pieces.append("[]")
            return
        pieces.append("[")
        for i, item in enumerate(obj):
            pieces.append("\n" + pad + "  ")
            _serialize(item, pieces, indent + 1)
            if i + 1 < len(obj):
                pieces.append(",")
        pieces.append("\n" + pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            pieces.append("\n" + pad + "  " + json.dumps(str(key)) + ": ")
            _serialize(obj[key], pieces, indent + 1)
            if i + 1 < len(keys):
                pieces.append(",")
        pieces.append("\n" + pad + "}")
    else:
        raise ConfigError([f"cannot serialize value of type {type(obj).__name__}"])


def dumps_report(obj) -> str:
    pieces: list = []
    _serialize(obj, pieces, 0)
    return "".join(pieces) + "\n"


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qmetro-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Config parsing and validation.

def parse_config(text: str) -> dict:
    """Parse and validate a JSON run configuration; never partially applied."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be an object"])
    return validate_config(raw)


def validate_config(raw: dict) -> dict:
    problems = []
    command = raw.get("command")
    if command not in COMMANDS:
        problems.append(f"command: expected one of {COMMANDS}, got {command!r}")
        raise ConfigError(problems)
    allowed = _ALLOWED_KEYS[command]
    for key in raw:
        if key not in allowed:
            problems.append(f"{key}: unknown key")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        problems.append("params: must be an object")
        params = {}
    for name, value in params.items():
        if isinstance(value, (list, tuple)):
            if not all(isinstance(v, (int, float)) for v in value):
                problems.append(f"params.{name}: list entries must be numbers")
        elif not isinstance(value, (int, float, str)):
            problems.append(f"params.{name}: must be a number, string, or list of numbers")
    if command == "qfim" or command == "bounds" or command == "measurement":
        family = raw.get("family")
        if not isinstance(family, str):
            problems.append("family: required string (builtin:<id>)")
        else:
            name = family.removeprefix("builtin:")
            if name not in FAMILIES:
                problems.append(
                    f"family: unknown family {name!r}; choose from {sorted(FAMILIES)}"
                )
            else:
                spec = FAMILIES[name]
                for key in params:
                    if key not in spec["params"]:
                        problems.append(f"params.{key}: unknown parameter for family {name!r}")
                fixed = raw.get("fixed", {})
                for key in fixed:
                    if key not in spec["fixed"]:
                        problems.append(f"fixed.{key}: unknown setting for family {name!r}")
    if command == "scenario":
        scenario = raw.get("scenario")
        if scenario not in SCENARIO_PARAMS:
            problems.append(
                f"scenario: unknown id {scenario!r}; choose from {sorted(SCENARIO_PARAMS)}"
            )
        else:
            for key in params:
                if key not in SCENARIO_PARAMS[scenario]:
                    problems.append(f"params.{key}: unknown parameter for scenario {scenario!r}")
    if command == "gaussian":
        preset = raw.get("preset")
        if preset not in GAUSSIAN_PRESETS:
            problems.append(
                f"preset: unknown Gaussian preset {preset!r}; choose from {sorted(GAUSSIAN_PRESETS)}"
            )
    if command == "grape":
        grape = raw.get("grape")
        if not isinstance(grape, dict):
            problems.append("grape: required object")
        else:
            for key in grape:
                if key not in GRAPE_KEYS:
                    problems.append(f"grape.{key}: unknown key")
    for key, typ in (("seed", int), ("n", int)):
        if key in raw and not isinstance(raw[key], int):
            problems.append(f"{key}: must be an integer")
    if "tol" in raw and not isinstance(raw["tol"], (int, float)):
        problems.append("tol: must be a number")
    for key in ("out", "csv"):
        if key in raw and not isinstance(raw[key], str):
            problems.append(f"{key}: must be a path string")
    if problems:
        raise ConfigError(problems)
    return raw


def _expand_grid(params: dict) -> list[dict]:
    names = list(params)
    axes = []
    for name in names:
        value = params[name]
        axes.append(list(value) if isinstance(value, (list, tuple)) else [value])
    return [dict(zip(names, combo)) for combo in itertools.product(*axes)]


def _max_workers() -> int:
    env = os.environ.get("QMETRO_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError([f"QMETRO_THREADS: not an integer: {env!r}"]) from None
    return 1


def _map_grid(fn, points: list[dict]) -> list[dict]:
    workers = _max_workers()
    if workers == 1 or len(points) == 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


# ---------------------------------------------------------------------------
# Command implementations.

def _family_runner(cfg: dict):
    name = cfg["family"].removeprefix("builtin:")
    spec = FAMILIES[name]
    fixed = dict(spec["fixed"])
    fixed.update(cfg.get("fixed", {}))
    defaults = {p: 0.0 for p in spec["params"]}
    defaults.update(cfg.get("params", {}))
    return name, spec, fixed, defaults


def _run_qfim(cfg: dict) -> tuple[dict, list[dict]]:
    name, spec, fixed, params = _family_runner(cfg)
    points = _expand_grid(params)

    def evaluate(point):
        out = dict(point)
        out.update(spec["compute"](point, fixed))
        return out

    rows = _map_grid(evaluate, points)
    return {"family": name, "fixed": fixed, "results": rows}, rows


def _run_bounds(cfg: dict) -> tuple[dict, list[dict]]:
    name, spec, fixed, params = _family_runner(cfg)
    n = int(cfg.get("n", 1))
    tol = float(cfg.get("tol", 1e-8))
    points = _expand_grid(params)

    def evaluate(point):
        out = dict(point)
        payload = spec["compute"](point, fixed)
        out.update(payload)
        if name == "qubit-theta-phi":
            x = np.array([point["theta"], point["phi"]])
            family = qubit_theta_phi_family()
            out.update(attainability_payload(family, x, tol=tol))
        elif name == "dephasing-qubit":
            from .scenarios import dephasing_family

            family = dephasing_family(fixed["t"], 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]))
            out.update(attainability_payload(family, np.array([point["B"], point["gamma"]]), tol=tol))
        from .qfim_core import QfimMatrix

        report = crb_report(QfimMatrix(np.asarray(payload["qfim"], dtype=float)), n=n)
        out["trace_f_inverse"] = report.trace_inverse
        out["diagonal_bound_sum"] = report.diagonal_bound_sum
        out["singular"] = report.singular
        return out

    rows = _map_grid(evaluate, points)
    return {"family": name, "fixed": fixed, "n": n, "results": rows}, rows


def _run_measurement(cfg: dict) -> tuple[dict, list[dict]]:
    name, spec, fixed, params = _family_runner(cfg)
    index = int(cfg.get("param_index", 0))
    points = _expand_grid(params)

    if name == "qubit-theta-phi":
        family = qubit_theta_phi_family()

        def point_family(point):
            return family, np.array([point["theta"], point["phi"]])

    elif name == "dephasing-qubit":
        from .scenarios import dephasing_family

        base = dephasing_family(fixed["t"], 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]))

        def point_family(point):
            return base, np.array([point["B"], point["gamma"]])

    else:
        raise ConfigError([f"family: measurement command supports qubit-theta-phi and dephasing-qubit, not {name!r}"])

    def evaluate(point):
        family, x = point_family(point)
        rho = family.density(x)
        spectral = spectral_decompose(rho)
        drho = state_derivatives(family, x)
        slds = sld_compute(spectral, drho)
        qfim = qfim_general(spectral, drho).matrix
        povm, frozen = sld_measurement(slds.operators[index], rho)
        return {
            **point,
            "param_index": index,
            "qfi": float(qfim[index, index]),
            "frozen_cfi": frozen,
            "deviation": abs(frozen - float(qfim[index, index])),
            "n_outcomes": len(povm.elements),
        }

    rows = _map_grid(evaluate, points)
    return {"family": name, "fixed": fixed, "param_index": index, "results": rows}, rows


def _run_scenario(cfg: dict) -> tuple[dict, list[dict]]:
    scenario = cfg["scenario"]
    defaults = dict(SCENARIO_PARAMS[scenario])
    defaults.update(cfg.get("params", {}))
    sweep = {k: v for k, v in defaults.items() if isinstance(v, (list, tuple)) and k != "r_in"}
    fixed = {k: v for k, v in defaults.items() if k not in sweep}
    points = _expand_grid(sweep) if sweep else [{}]

    def evaluate(point):
        merged = {**fixed, **point}
        res = _dispatch_scenario(scenario, merged)
        row = {
            **{k: v for k, v in merged.items() if isinstance(v, (int, float))},
            "max_deviation": res.max_deviation,
            "qfim": res.computed,
            "closed_form": res.closed_form,
        }
        row.update(res.bounds)
        row.update({f"flag_{k}": v for k, v in res.flags.items()})
        return row

    rows = _map_grid(evaluate, points)
    return {"scenario": scenario, "inputs": defaults, "results": rows}, rows


def _dispatch_scenario(scenario: str, p: dict):
    if scenario == "dephasing":
        return scenario_dephasing_qubit(p["B"], p["gamma"], p["t"])
    if scenario == "spin-field":
        return scenario_spin_field(p["B"], p["theta"], p["t"], p["r_in"])
    if scenario == "two-qubit-ancilla":
        return scenario_two_qubit_ancilla(p["B"], p["theta"], p["phi"], p["t"])
    if scenario == "controlled-field":
        return scenario_controlled_field(p["B"], p["theta"], p["phi"], p["dt"], int(p["N"]))
    if scenario == "mzi":
        cutoff = int(p["cutoff"])
        if p["chi"] == "vacuum":
            chi = np.zeros(cutoff + 1, dtype=complex)
            chi[0] = 1.0
        elif p["chi"] == "squeezed":
            chi = squeezed_vacuum_fock(float(p["r"]), cutoff)
        else:
            raise ConfigError([f"params.chi: unknown port state {p['chi']!r}"])
        return scenario_mzi_double_phase(complex(p["alpha"]), chi, cutoff)
    if scenario == "noon":
        return scenario_noon(int(p["d"]), int(p["N"]), p["c1"])
    if scenario == "ecs":
        return scenario_ecs(int(p["d"]), complex(p["alpha"]), p["c1"])
    raise ConfigError([f"scenario: unknown id {scenario!r}"])


def _run_gaussian(cfg: dict) -> tuple[dict, list[dict]]:
    preset = cfg["preset"]
    spec = FAMILIES[f"gaussian-{preset}"]
    fixed = dict(spec["fixed"])
    fixed.update(cfg.get("fixed", {}))
    params = {p: 0.5 for p in spec["params"]}
    params.update(cfg.get("params", {}))
    points = _expand_grid(params)

    def evaluate(point):
        return {**point, **spec["compute"](point, fixed)}

    rows = _map_grid(evaluate, points)
    return {"preset": preset, "fixed": fixed, "results": rows}, rows


def _run_thermo(cfg: dict) -> tuple[dict, list[dict]]:
    spec = FAMILIES["thermal"]
    fixed = dict(spec["fixed"])
    fixed.update(cfg.get("fixed", {}))
    params = {"T": 1.0}
    params.update(cfg.get("params", {}))
    points = _expand_grid(params)

    def evaluate(point):
        return {**point, **spec["compute"](point, fixed)}

    rows = _map_grid(evaluate, points)
    return {"fixed": fixed, "results": rows}, rows


def build_grape_problem(grape_cfg: dict) -> tuple[ControlProblem, np.ndarray, dict]:
    """Dephasing-magnetometry GRAPE preset: B sigma_z encoding, sigma_z dephasing."""
    cfg = {
        "preset": "dephasing-magnetometry",
        "B": 1.0,
        "gamma": 0.1,
        "T": 2.0,
        "slices": 20,
        "controls": ["sx", "sy"],
        "objective": "qfi_aa",
        "learning_rate": 0.02,
        "max_iterations": 150,
        "tolerance": 1e-8,
        "init": "zero",
        "init_scale": 0.1,
        "seed": 0,
    }
    cfg.update(grape_cfg)
    if cfg["preset"] != "dephasing-magnetometry":
        raise ConfigError([f"grape.preset: unknown preset {cfg['preset']!r}"])
    ctrl_map = {"sx": PAULI_X, "sy": PAULI_Y, "sz": PAULI_Z}
    try:
        controls = [ctrl_map[c] for c in cfg["controls"]]
    except KeyError as exc:
        raise ConfigError([f"grape.controls: unknown control {exc.args[0]!r}"]) from None
    m = int(cfg["slices"])
    dt = float(cfg["T"]) / m
    if cfg["init"] == "zero":
        amplitudes = np.zeros((len(controls), m))
    elif cfg["init"] == "random":
        rng = np.random.default_rng(int(cfg["seed"]))
        amplitudes = cfg["init_scale"] * rng.standard_normal((len(controls), m))
    else:
        raise ConfigError([f"grape.init: expected 'zero' or 'random', got {cfg['init']!r}"])
    plus = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    problem = ControlProblem(
        hamiltonian=lambda x: x[0] * PAULI_Z,
        dhamiltonian=[lambda x: PAULI_Z],
        controls=controls,
        amplitudes=amplitudes,
        dt=dt,
        probe=plus,
        lindblad_ops=[PAULI_Z],
        rates=[cfg["gamma"] / 2.0],
        objective=cfg["objective"],
        param_index=0,
        learning_rate=float(cfg["learning_rate"]),
        max_iterations=int(cfg["max_iterations"]),
        tolerance=float(cfg["tolerance"]),
    )
    return problem, np.array([float(cfg["B"])]), cfg


def _run_grape(cfg: dict) -> tuple[dict, list[dict]]:
    problem, x, grape_cfg = build_grape_problem(cfg.get("grape", {}))
    t_total = problem.total_time
    baseline = objective_value(problem, x, propagate(problem, x, np.zeros_like(problem.amplitudes)))
    result = grape_run(problem, x)
    rows = [
        {"iteration": i, "objective": val} for i, val in enumerate(result.history)
    ]
    report = {
        "preset": grape_cfg,
        "baseline_objective": baseline,
        "uncontrolled_closed_form": 4.0 * t_total**2 * math.exp(-2.0 * grape_cfg["gamma"] * t_total) * (
            1.0 if grape_cfg["objective"] == "qfi_aa" else float("nan")
        ),
        "best_objective": result.best_objective,
        "iterations": result.iterations,
        "converged": result.converged,
        "best_amplitudes": result.best_amplitudes,
        "results": rows,
    }
    return report, rows


_RUNNERS = {
    "qfim": _run_qfim,
    "bounds": _run_bounds,
    "measurement": _run_measurement,
    "scenario": _run_scenario,
    "gaussian": _run_gaussian,
    "thermo": _run_thermo,
    "grape": _run_grape,
}


def run(cfg: dict) -> dict:
    """Execute a validated config: compute, then write report/CSV files."""
    start = time.perf_counter()
    body, rows = _RUNNERS[cfg["command"]](cfg)
    report = {
        "schema": REPORT_SCHEMA,
        "command": cfg["command"],
        "inputs": {k: v for k, v in cfg.items() if k not in ("out", "csv")},
        **body,
        "timing": {"seconds": time.perf_counter() - start},
    }
    out = cfg.get("out")
    if out:
        atomic_write(out, dumps_report(report))
    csv_path = cfg.get("csv")
    if csv_path:
        atomic_write(csv_path, _format_csv(rows))
    return report


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return json.dumps(str(value))


def _format_csv(rows: list[dict]) -> str:
    """Grid CSV: schema column, scalar columns in sorted order, QFIM flattened row-major."""
    if not rows:
        return "schema\n"
    scalar_keys = sorted(
        k for k, v in rows[0].items()
        if isinstance(v, (int, float, bool, np.integer, np.floating)) and k != "qfim"
    )
    qfim = rows[0].get("qfim")
    qfim_cols = []
    if qfim is not None:
        arr = np.asarray(qfim)
        qfim_cols = [f"f_{i}_{j}" for i in range(arr.shape[0]) for j in range(arr.shape[1])]
    header = ["schema"] + scalar_keys + qfim_cols
    lines = [",".join(header)]
    for row in rows:
        cells = [CSV_SCHEMA] + [_csv_cell(row.get(k, "")) for k in scalar_keys]
        if qfim_cols:
            cells += [_csv_cell(v) for v in np.asarray(row["qfim"]).flatten()]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Argument handling.

def _collect_pairs(rest: list[str]) -> dict:
    params = {}
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--") or i + 1 >= len(rest):
            raise ConfigError([f"arguments: expected --name value pairs, got {tok!r}"])
        params[tok[2:]] = rest[i + 1]
        i += 2
    return params


def _coerce(value: str):
    if "," in value:
        return [float(v) for v in value.split(",") if v.strip()]
    try:
        return int(value) if value.strip().lstrip("+-").isdigit() else float(value)
    except ValueError:
        return value


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qmetro",
        description="Quantum Fisher information and multiparameter estimation toolkit",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} command", allow_abbrev=False)
        if name == "scenario":
            p.add_argument("scenario_id", choices=sorted(SCENARIO_PARAMS))
        if name == "gaussian":
            p.add_argument("--preset", default="coherent-displacement")
        if name in ("qfim", "bounds", "measurement"):
            p.add_argument("--family", default="builtin:qubit-theta-phi")
        p.add_argument("--config", help="JSON config file; flags override its entries")
        p.add_argument("--out", help="report JSON path")
        p.add_argument("--csv", help="grid CSV path")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)

    args, rest = parser.parse_known_args(argv)
    try:
        raw: dict = {}
        if args.config:
            with open(args.config, "r") as handle:
                raw = json.loads(handle.read())
                if not isinstance(raw, dict):
                    raise ConfigError(["config root must be an object"])
        raw["command"] = args.command
        if args.command == "scenario":
            raw["scenario"] = args.scenario_id
        if args.command == "gaussian" and args.preset:
            raw["preset"] = args.preset
        if getattr(args, "family", None):
            raw["family"] = args.family
        for key in ("out", "csv", "seed", "tol"):
            value = getattr(args, key, None)
            if value is not None:
                raw[key] = value
        flag_params = {k: _coerce(v) for k, v in _collect_pairs(rest).items()}
        if flag_params:
            params = dict(raw.get("params", {}))
            params.update(flag_params)
            raw["params"] = params
        cfg = validate_config(raw)
        report = run(cfg)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"qmetro: config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"qmetro: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailureError as exc:
        print(f"qmetro: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if not cfg.get("out"):
        sys.stdout.write(dumps_report(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
