"""CSV / JSON persistence for traces and sweeps.

File contracts (stable, consumed by external plotting tools):

* trace CSV     — columns  time, xi_squared, optimal_angle, theta, phi, j_length
* sweep CSV     — columns  axis_value, xi_m_squared, t_m
* run summary   — JSON object holding the full metadata of the run

Floats are rendered with 12 significant digits, files are UTF-8 with LF
line endings, and the pipeline is deterministic: rewriting from the same
inputs reproduces files byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

TRACE_COLUMNS = ("time", "xi_squared", "optimal_angle", "theta", "phi", "j_length")
SWEEP_COLUMNS = ("axis_value", "xi_m_squared", "t_m")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_rows(path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_trace_csv(trace, path) -> None:
    rows = zip(trace.times, trace.xi_squared, trace.optimal_angle,
               trace.theta, trace.phi, trace.j_length)
    _write_rows(path, TRACE_COLUMNS, rows)


def write_sweep_csv(result, path) -> None:
    rows = zip(result.axis_values, result.xi_m_squared, result.t_m)
    _write_rows(path, SWEEP_COLUMNS, rows)


def write_scaling_csv(fit, path) -> None:
    """Scaling results share the sweep column contract (axis = atom number)."""
    rows = zip(fit.n_values, fit.xi_m_squared, fit.t_m)
    _write_rows(path, SWEEP_COLUMNS, rows)


def write_run_summary(summary: dict, path) -> None:
    text = json.dumps(summary, indent=2, sort_keys=True, default=_jsonable)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj)}")


def read_csv_columns(path) -> dict[str, np.ndarray]:
    """Parse one of our CSVs back into named float columns."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    data = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    arr = np.array(data, dtype=float) if data else np.empty((0, len(header)))
    if data and arr.shape[1] != len(header):
        raise ValueError(f"{path}: row width does not match header")
    return {name: arr[:, k] for k, name in enumerate(header)}
