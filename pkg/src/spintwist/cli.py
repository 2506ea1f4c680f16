"""Command-line interface.

Subcommands: derive-params, evolve, squeeze, compare, sweep-n, sweep-chi,
sweep-omega0, audit-cutoff, estimate-physical.  Every run writes CSV data
files plus one JSON run summary holding parameters, verdicts, tolerances and
the package version; re-running a summary's parameters reproduces the CSVs
byte for byte.

Exit codes: 0 success, 2 usage or config error, 3 model validation failure,
4 flagged results under --strict, 1 unexpected failure.  Errors also emit a
single machine-readable JSON line on stderr.

Grid syntax: integer grids are start:stop:step (inclusive), real grids are
start:stop:count.  A JSON config file may predefine any flag (section
"flags") and exactly one parameter block ("raman", "dicke" or "two_axis");
explicit command-line flags win over the config.  Raman-block frequencies
are laboratory values nu = omega/2pi in MHz unless the block carries
"units": "angular"; the conversion happens once, here, and is recorded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    compare_full_vs_effective,
    convergence_audit,
    default_omega0_grid,
    max_squeezing_point,
    sweep_chi,
    sweep_omega0,
    sweep_scaling,
)
from .fileio import (
    write_run_summary,
    write_scaling_csv,
    write_sweep_csv,
    write_trace_csv,
)
from .model_builder import (
    ModelValidationError,
    RamanDriveParams,
    TwoAxisParams,
    TwoModeDickeParams,
    build_two_axis,
    derive_effective_params,
    dispersive_ratio,
    map_to_two_axis,
)
from .physical import estimate_physical
from .propagator import EvolutionPlan, SpectralPropagator, evolve_amplitudes
from .spin_algebra import build_spin_ops, coherent_state_down
from .squeezing import default_window, find_max_squeezing

MHZ_TO_ANGULAR = 2.0 * math.pi * 1e6

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_FLAGGED = 4


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        super().__init__(message)
        self.category = category
        self.code = code


def parse_int_grid(text: str) -> list[int]:
    """start:stop:step, inclusive of stop when it lands on the grid."""
    try:
        start, stop, step = (int(p) for p in text.split(":"))
    except ValueError:
        raise CliError("config", f"bad integer grid {text!r}; expected start:stop:step", EXIT_USAGE)
    if step <= 0 or stop < start:
        raise CliError("config", f"bad integer grid {text!r}: need stop >= start, step > 0", EXIT_USAGE)
    return list(range(start, stop + 1, step))


def parse_real_grid(text: str) -> np.ndarray:
    """start:stop:count, linearly spaced."""
    parts = text.split(":")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except (ValueError, IndexError):
        raise CliError("config", f"bad real grid {text!r}; expected start:stop:count", EXIT_USAGE)
    if count < 1 or stop < start:
        raise CliError("config", f"bad real grid {text!r}: need stop >= start, count >= 1", EXIT_USAGE)
    return np.linspace(start, stop, count)


def _pair(values, field: str) -> tuple[float, float]:
    if not isinstance(values, (list, tuple)) or len(values) != 2:
        raise CliError("config", f"field {field!r} must be a pair [i1, i2]", EXIT_USAGE)
    return (float(values[0]), float(values[1]))


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError("config", f"config file not found: {path}", EXIT_USAGE)
    except json.JSONDecodeError as exc:
        raise CliError("config", f"config parse error in {path}: {exc}", EXIT_USAGE)
    if not isinstance(config, dict):
        raise CliError("config", "config root must be a JSON object", EXIT_USAGE)
    blocks = [k for k in ("raman", "dicke", "two_axis") if k in config]
    if len(blocks) > 1:
        raise CliError(
            "config",
            f"exactly one parameter block allowed, found {blocks}; "
            "the raw -> effective -> two-axis chain is applied automatically",
            EXIT_USAGE,
        )
    return config


def raman_from_block(block: dict) -> tuple[RamanDriveParams, dict]:
    """Build RamanDriveParams from a config block, converting MHz once."""
    units = block.get("units", "mhz")
    if units not in ("mhz", "angular"):
        raise CliError("config", f"field 'units' must be 'mhz' or 'angular', got {units!r}", EXIT_USAGE)
    scale = MHZ_TO_ANGULAR if units == "mhz" else 1.0
    required = [
        "coupling_g_r", "coupling_g_s", "rabi_r", "rabi_s",
        "detuning_r", "detuning_s",
        "cavity_detuning_a", "cavity_detuning_b", "atomic_detuning_1", "atom_count",
    ]
    for name in required:
        if name not in block:
            raise CliError("config", f"raman block missing field {name!r}", EXIT_USAGE)
    def spair(name):
        p = _pair(block[name], name)
        return (p[0] * scale, p[1] * scale)
    try:
        params = RamanDriveParams(
            coupling_g_r=spair("coupling_g_r"),
            coupling_g_s=spair("coupling_g_s"),
            rabi_r=spair("rabi_r"),
            rabi_s=spair("rabi_s"),
            detuning_r=spair("detuning_r"),
            detuning_s=spair("detuning_s"),
            cavity_detuning_a=float(block["cavity_detuning_a"]) * scale,
            cavity_detuning_b=float(block["cavity_detuning_b"]) * scale,
            atomic_detuning_1=float(block["atomic_detuning_1"]) * scale,
            atom_count=int(block["atom_count"]),
            phase_r=_pair(block["phase_r"], "phase_r") if "phase_r" in block else (0.0, math.pi / 2),
            phase_s=_pair(block["phase_s"], "phase_s") if "phase_s" in block else (0.0, -math.pi / 2),
        )
    except ModelValidationError as exc:
        raise CliError("validation", str(exc), EXIT_VALIDATION)
    record = {"input_units": units, "mhz_to_angular": scale if units == "mhz" else 1.0}
    return params, record


def _dicke_from_block(block: dict) -> TwoModeDickeParams:
    required = ["omega_a_eff", "omega_b_eff", "omega_0", "lambda_1", "lambda_2", "atom_count"]
    for name in required:
        if name not in block:
            raise CliError("config", f"dicke block missing field {name!r}", EXIT_USAGE)
    try:
        return TwoModeDickeParams(
            omega_a_eff=float(block["omega_a_eff"]),
            omega_b_eff=float(block["omega_b_eff"]),
            omega_0=float(block["omega_0"]),
            lambda_1=float(block["lambda_1"]),
            lambda_2=float(block["lambda_2"]),
            atom_count=int(block["atom_count"]),
            eta=float(block.get("eta", 0.0)),
        )
    except ModelValidationError as exc:
        raise CliError("validation", str(exc), EXIT_VALIDATION)


def _flag(args, config, name, default=None):
    """Command-line value if given, else config 'flags' section, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    flags = config.get("flags", {})
    if name in flags:
        return flags[name]
    return default


def resolve_two_axis(args, config) -> tuple[TwoAxisParams, dict]:
    """Two-axis parameters from flags or from the config chain, recorded."""
    chain: dict = {}
    if "raman" in config:
        raw, record = raman_from_block(config["raman"])
        eff, report = derive_effective_params(raw)
        chain["elimination_report"] = report.summary()
        chain.update(record)
        chain["dicke_params"] = _dicke_dict(eff)
        try:
            params = map_to_two_axis(eff)
        except ModelValidationError as exc:
            raise CliError("validation", str(exc), EXIT_VALIDATION)
        chain["dispersive_ratio"] = dispersive_ratio(eff)
    elif "dicke" in config:
        eff = _dicke_from_block(config["dicke"])
        try:
            params = map_to_two_axis(eff)
        except ModelValidationError as exc:
            raise CliError("validation", str(exc), EXIT_VALIDATION)
        chain["dicke_params"] = _dicke_dict(eff)
        chain["dispersive_ratio"] = dispersive_ratio(eff)
    elif "two_axis" in config:
        block = config["two_axis"]
        for name in ("q", "chi", "omega_0", "atom_count"):
            if name not in block:
                raise CliError("config", f"two_axis block missing field {name!r}", EXIT_USAGE)
        params = TwoAxisParams(
            q=float(block["q"]), chi=float(block["chi"]),
            omega_0=float(block["omega_0"]), atom_count=int(block["atom_count"]),
        )
    else:
        if args.n is None:
            raise CliError("config", "missing --n (or a config parameter block)", EXIT_USAGE)
        params = TwoAxisParams(
            q=args.q if args.q is not None else 1.0,
            chi=args.chi if args.chi is not None else 0.0,
            omega_0=args.omega0 if args.omega0 is not None else 0.0,
            atom_count=args.n,
        )
        return params, chain
    # explicit flags override the chained values
    overrides = {
        "q": args.q, "chi": args.chi, "omega_0": args.omega0, "atom_count": args.n,
    }
    updates = {k: v for k, v in overrides.items() if v is not None}
    if updates:
        chain["flag_overrides"] = updates
        params = TwoAxisParams(**{**_two_axis_dict(params), **updates})
    return params, chain


def resolve_dicke(args, config) -> tuple[TwoModeDickeParams, dict]:
    chain: dict = {}
    if "raman" in config:
        raw, record = raman_from_block(config["raman"])
        eff, report = derive_effective_params(raw)
        chain["elimination_report"] = report.summary()
        chain.update(record)
    elif "dicke" in config:
        eff = _dicke_from_block(config["dicke"])
    else:
        missing = [n for n, v in (("--n", args.n), ("--omega-a", args.omega_a),
                                  ("--omega-b", args.omega_b),
                                  ("--lambda1", args.lambda1), ("--lambda2", args.lambda2))
                   if v is None]
        if missing:
            raise CliError("config", f"missing {', '.join(missing)} (or a config block)", EXIT_USAGE)
        try:
            eff = TwoModeDickeParams(
                omega_a_eff=args.omega_a, omega_b_eff=args.omega_b,
                omega_0=args.omega0 if args.omega0 is not None else 1.0,
                lambda_1=args.lambda1, lambda_2=args.lambda2, atom_count=args.n,
            )
        except ModelValidationError as exc:
            raise CliError("validation", str(exc), EXIT_VALIDATION)
    return eff, chain


def _two_axis_dict(p: TwoAxisParams) -> dict:
    return {"q": p.q, "chi": p.chi, "omega_0": p.omega_0, "atom_count": p.atom_count}


def _dicke_dict(p: TwoModeDickeParams) -> dict:
    return {
        "omega_a_eff": p.omega_a_eff, "omega_b_eff": p.omega_b_eff,
        "omega_0": p.omega_0, "lambda_1": p.lambda_1, "lambda_2": p.lambda_2,
        "atom_count": p.atom_count, "eta": p.eta,
    }


def _points(args, fallback: int) -> int:
    points = args.points if args.points is not None else fallback
    if points < 2:
        raise CliError("config", f"--points must be >= 2, got {points}", EXIT_USAGE)
    return points


def _out_dir(args) -> Path:
    directory = args.out_dir or os.environ.get("SPINTWIST_OUTDIR") or "."
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _finish(args, summary: dict, flags) -> int:
    flat = [f for group in flags for f in ((group,) if isinstance(group, str) else group)]
    summary["flags"] = sorted(set(flat))
    summary["version"] = __version__
    out = _out_dir(args) / f"{args.out}.json"
    write_run_summary(summary, out)
    print(out)
    if flat and args.strict:
        raise CliError("flagged", f"flagged results under --strict: {sorted(set(flat))}", EXIT_FLAGGED)
    return EXIT_OK


# ---------------------------------------------------------------- commands

def cmd_derive_params(args, config) -> int:
    if "raman" not in config:
        raise CliError("config", "derive-params needs a config file with a 'raman' block", EXIT_USAGE)
    raw, record = raman_from_block(config["raman"])
    eff, report = derive_effective_params(raw, ratio_min=args.ratio_min)
    summary = {
        "command": "derive-params",
        **record,
        "dicke_params_angular": _dicke_dict(eff),
        "dicke_params_mhz": {k: (v / MHZ_TO_ANGULAR if k != "atom_count" else v)
                             for k, v in _dicke_dict(eff).items()},
        "elimination_report": report.summary(),
        "dispersive_ratio": dispersive_ratio(eff),
    }
    try:
        two_axis = map_to_two_axis(eff)
        summary["two_axis_params_angular"] = _two_axis_dict(two_axis)
    except ModelValidationError as exc:
        summary["two_axis_params_angular"] = None
        summary["two_axis_error"] = str(exc)
    flags = [] if report.large_detuning_ok else ["large_detuning_violated"]
    return _finish(args, summary, [tuple(flags)])


def cmd_evolve(args, config) -> int:
    params, chain = resolve_two_axis(args, config)
    ops = build_spin_ops(params.atom_count)
    h = build_two_axis(params, ops)
    points = _points(args, 2001)
    t_max = args.t_max if args.t_max is not None else default_window(params.q, params.atom_count)
    times = np.linspace(0.0, t_max, points)
    plan = EvolutionPlan(hamiltonian=h, times=times, method=args.method)
    states = evolve_amplitudes(plan, coherent_state_down(params.atom_count).amplitudes)
    js = [np.real(np.sum(states.conj() * (op @ states), axis=0)) for op in ops.as_vector()]
    norms = np.linalg.norm(states, axis=0)
    from .fileio import _write_rows

    path = _out_dir(args) / f"{args.out}.csv"
    _write_rows(path, ("time", "jx", "jy", "jz", "j_length", "norm"),
                zip(times, js[0], js[1], js[2], np.sqrt(js[0]**2 + js[1]**2 + js[2]**2), norms))
    summary = {
        "command": "evolve", **chain, "two_axis_params": _two_axis_dict(params),
        "t_max": float(t_max), "points": points, "method": plan.resolved_method(),
        "data": str(path),
    }
    return _finish(args, summary, [])


def cmd_squeeze(args, config) -> int:
    params, chain = resolve_two_axis(args, config)
    ops = build_spin_ops(params.atom_count)
    h = build_two_axis(params, ops)
    points = _points(args, 2001)
    t_max = args.t_max if args.t_max is not None else default_window(params.q, params.atom_count)
    trace = find_max_squeezing(h, coherent_state_down(params.atom_count), t_max, ops,
                               points=points)
    path = _out_dir(args) / f"{args.out}.csv"
    write_trace_csv(trace, path)
    summary = {
        "command": "squeeze", **chain, "two_axis_params": _two_axis_dict(params),
        "t_max": float(t_max), "points": points,
        "xi_m_squared": trace.xi_m_squared, "t_m": trace.t_m,
        "data": str(path),
    }
    return _finish(args, summary, [trace.flags])


def cmd_compare(args, config) -> int:
    eff, chain = resolve_dicke(args, config)
    result = compare_full_vs_effective(
        eff, window=args.window, points=_points(args, 801), start_cutoff=args.start_cutoff
    )
    out = _out_dir(args)
    full_csv = out / f"{args.out}_full.csv"
    eff_csv = out / f"{args.out}_effective.csv"
    _write_pair_traces(result, full_csv, eff_csv)
    summary = {
        "command": "compare", **chain, **result.metadata,
        "max_abs_deviation": result.max_abs_deviation,
        "data_full": str(full_csv), "data_effective": str(eff_csv),
    }
    return _finish(args, summary, [result.flags])


def _write_pair_traces(result, full_csv, eff_csv) -> None:
    from .fileio import _write_rows

    _write_rows(full_csv, ("time", "xi_squared"), zip(result.times, result.xi_full))
    _write_rows(eff_csv, ("time", "xi_squared"), zip(result.times, result.xi_effective))


def cmd_sweep_n(args, config) -> int:
    n_values = parse_int_grid(args.n_grid)
    fit = sweep_scaling(n_values, chi=args.chi, omega_0=args.omega0 or 0.0,
                        points=_points(args, 2001), workers=args.workers)
    path = _out_dir(args) / f"{args.out}.csv"
    write_scaling_csv(fit, path)
    summary = {
        "command": "sweep-n", **fit.metadata,
        "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
        "fit_warnings": list(fit.warnings), "data": str(path),
    }
    return _finish(args, summary, [fit.warnings])


def cmd_sweep_chi(args, config) -> int:
    grid = parse_real_grid(args.chi_grid)
    result = sweep_chi(grid, atom_count=args.n, points=_points(args, 2001), workers=args.workers)
    path = _out_dir(args) / f"{args.out}.csv"
    write_sweep_csv(result, path)
    summary = {"command": "sweep-chi", **result.metadata, "data": str(path)}
    return _finish(args, summary, result.flags)


def cmd_sweep_omega0(args, config) -> int:
    if args.omega0_grid is not None:
        grid = parse_real_grid(args.omega0_grid)
    else:
        grid = default_omega0_grid(args.n)
    result = sweep_omega0(grid, chi=args.chi, atom_count=args.n,
                          points=_points(args, 2001), workers=args.workers)
    path = _out_dir(args) / f"{args.out}.csv"
    write_sweep_csv(result, path)
    summary = {"command": "sweep-omega0", **result.metadata, "data": str(path)}
    return _finish(args, summary, result.flags)


def cmd_audit_cutoff(args, config) -> int:
    eff, chain = resolve_dicke(args, config)
    report = convergence_audit(eff, window=args.window, points=_points(args, 801),
                               start_cutoff=args.start_cutoff)
    summary = {
        "command": "audit-cutoff", **chain,
        "dicke_params": _dicke_dict(eff),
        "dispersive_ratio": dispersive_ratio(eff),
        "cutoff_report": report.summary(),
    }
    return _finish(args, summary, [report.warnings])


def cmd_estimate_physical(args, config) -> int:
    estimate = estimate_physical(
        g_s1_mhz=args.g_s1, rabi_s1_mhz=args.rabi_s1, delta_s1_mhz=args.delta_s1,
        omega_a_mhz=args.omega_a, atom_count=args.n or 100,
        chi=args.chi if args.chi is not None else -1.0,
        gamma_mhz=args.gamma, kappa_mhz=args.kappa, points=_points(args, 2001),
    )
    summary = {"command": "estimate-physical", **estimate.summary(),
               "input_units": "nu = omega/2pi in MHz"}
    flags = [] if estimate.faster_than_decay else ["slower_than_decay"]
    return _finish(args, summary, [tuple(flags)])


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spintwist",
        description="Spin-squeezing dynamics of a two-cavity collective-spin model",
    )
    parser.add_argument("--version", action="version", version=f"spintwist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_out):
        p.add_argument("--config", help="JSON config file; flags given here win over it")
        p.add_argument("--out-dir", help="output directory (default $SPINTWIST_OUTDIR or .)")
        p.add_argument("--out", default=default_out, help="output file stem")
        p.add_argument("--strict", action="store_true",
                       help="treat flagged results as failures (exit 4)")
        p.add_argument("--points", type=int, default=None, help="time-grid points")
        p.add_argument("--workers", type=int, default=None, help="parallel sweep workers")

    def two_axis_flags(p):
        p.add_argument("--q", type=float, default=None)
        p.add_argument("--chi", type=float, default=None)
        p.add_argument("--omega0", type=float, default=None)
        p.add_argument("--n", type=int, default=None, help="atom number")

    def dicke_flags(p):
        p.add_argument("--omega-a", type=float, default=None, help="omega_A in units of omega_0")
        p.add_argument("--omega-b", type=float, default=None)
        p.add_argument("--lambda1", type=float, default=None)
        p.add_argument("--lambda2", type=float, default=None)
        p.add_argument("--omega0", type=float, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--window", type=float, default=None, help="comparison window")
        p.add_argument("--start-cutoff", type=int, default=1)

    p = sub.add_parser("derive-params", help="Raman inputs -> effective model parameters")
    common(p, "derive_params")
    p.add_argument("--ratio-min", type=float, default=10.0,
                   help="required detuning/drive ratio for the large-detuning verdict")
    p.set_defaults(func=cmd_derive_params)

    p = sub.add_parser("evolve", help="evolve the pole state, write spin observables")
    common(p, "evolve")
    two_axis_flags(p)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--method", choices=("auto", "spectral", "krylov"), default="auto")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("squeeze", help="squeezing trace and its refined minimum")
    common(p, "squeeze")
    two_axis_flags(p)
    p.add_argument("--t-max", type=float, default=None)
    p.set_defaults(func=cmd_squeeze)

    p = sub.add_parser("compare", help="full two-mode Dicke model vs two-axis reduction")
    common(p, "compare")
    dicke_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep-n", help="scaling of the maximal squeezing with atom number")
    common(p, "sweep_n")
    p.add_argument("--chi", type=float, required=True)
    p.add_argument("--omega0", type=float, default=0.0)
    p.add_argument("--n", dest="n_grid", default="20:200:10",
                   help="integer grid start:stop:step")
    p.set_defaults(func=cmd_sweep_n)

    p = sub.add_parser("sweep-chi", help="maximal squeezing against chi")
    common(p, "sweep_chi")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chi-grid", default="-1:0:21", help="real grid start:stop:count")
    p.set_defaults(func=cmd_sweep_chi)

    p = sub.add_parser("sweep-omega0", help="maximal squeezing against omega_0")
    common(p, "sweep_omega0")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chi", type=float, required=True)
    p.add_argument("--omega0-grid", default=None, help="real grid start:stop:count")
    p.set_defaults(func=cmd_sweep_omega0)

    p = sub.add_parser("audit-cutoff", help="Fock-cutoff convergence audit of the full model")
    common(p, "audit_cutoff")
    dicke_flags(p)
    p.set_defaults(func=cmd_audit_cutoff)

    p = sub.add_parser("estimate-physical", help="laboratory-unit estimates (MHz, ns)")
    common(p, "estimate_physical")
    p.add_argument("--g-s1", type=float, default=20.0, help="g_s1/2pi in MHz")
    p.add_argument("--rabi-s1", type=float, default=20.0)
    p.add_argument("--delta-s1", type=float, default=100.0)
    p.add_argument("--omega-a", type=float, default=-20.0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--chi", type=float, default=-1.0)
    p.add_argument("--gamma", type=float, default=3.0, help="atomic decay gamma/2pi in MHz")
    p.add_argument("--kappa", type=float, default=1.3, help="photon decay kappa/2pi in MHz")
    p.set_defaults(func=cmd_estimate_physical)

    return parser


def _apply_config_flags(args, config) -> None:
    """Config 'flags' section fills in any flag the command line left unset."""
    for name, value in config.get("flags", {}).items():
        if getattr(args, name, None) is None:
            if not hasattr(args, name):
                raise CliError("config", f"unknown flag {name!r} in config", EXIT_USAGE)
            setattr(args, name, value)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        config = load_config(args.config)
        _apply_config_flags(args, config)
        return args.func(args, config)
    except CliError as exc:
        _emit_error(exc.category, str(exc))
        return exc.code
    except ModelValidationError as exc:
        _emit_error("validation", str(exc))
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _emit_error("unexpected", f"{type(exc).__name__}: {exc}")
        return EXIT_UNEXPECTED


def _emit_error(category: str, message: str) -> None:
    print(json.dumps({"error_category": category, "message": message}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
