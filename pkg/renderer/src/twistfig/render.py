"""Figure kinds and their CSV/JSON input contracts.

Four kinds, matching the data files the simulation CLI writes:

  trace-compare   overlaid xi^2(t) curves; inputs need (time, xi_squared)
  scaling         log-log xi_M^2 vs N with fitted lines annotated from the
                  sidecar JSON summaries; inputs are sweep CSVs
  chi-insert      xi_M^2 against chi; one sweep CSV
  omega0-family   xi_M^2 against omega_0, one curve per input sweep CSV

Sweep CSVs must carry exactly the columns (axis_value, xi_m_squared, t_m).
A sidecar JSON summary named <stem>.json (with trailing _full/_effective
stripped) supplies legend labels and fit annotations when present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "twistfig"

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("trace-compare", "scaling", "chi-insert", "omega0-family")

SWEEP_COLUMNS = ["axis_value", "xi_m_squared", "t_m"]
TRACE_REQUIRED = ["time", "xi_squared"]


class InputError(ValueError):
    """Missing, empty or malformed input file."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise InputError("at least one input file is required")


def read_columns(path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    lines = [ln for ln in path.read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines:
        raise InputError(f"{path}: empty file")
    header = lines[0].split(",")
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise InputError(f"{path}:{k}: row width {len(cells)} != header width {len(header)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise InputError(f"{path}:{k}: {exc}")
    if not rows:
        raise InputError(f"{path}: no data rows (header only)")
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(header)}


def check_columns(path, columns, required, exact=False) -> None:
    names = list(columns)
    if exact and names != required:
        raise InputError(f"{path}: columns {names} do not match the contract {required}")
    missing = [c for c in required if c not in names]
    if missing:
        raise InputError(f"{path}: missing required columns {missing}")


def sidecar_metadata(path) -> dict:
    stem = Path(path).stem
    for suffix in ("_full", "_effective"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    candidate = Path(path).with_name(stem + ".json")
    if candidate.exists():
        try:
            return json.loads(candidate.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            raise InputError(f"{candidate}: malformed JSON sidecar")
    return {}


def _legend_label(path, meta) -> str:
    stem = Path(path).stem
    if stem.endswith("_full"):
        return "two-mode Dicke model"
    if stem.endswith("_effective"):
        return "two-axis reduction"
    parts = []
    if "chi" in meta:
        parts.append(f"chi = {meta['chi']:g}")
    if "atom_count" in meta:
        parts.append(f"N = {meta['atom_count']}")
    return ", ".join(parts) if parts else stem


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it; returns the output path."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    try:
        if spec.kind == "trace-compare":
            _trace_compare(ax, spec)
        elif spec.kind == "scaling":
            _scaling(ax, spec)
        elif spec.kind == "chi-insert":
            _chi_insert(ax, spec)
        else:
            _omega0_family(ax, spec)
        if spec.title:
            ax.set_title(spec.title)
        out = Path(spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, metadata=_deterministic_metadata(out))
        return out
    finally:
        plt.close(fig)


def _deterministic_metadata(out: Path):
    if out.suffix.lower() == ".svg":
        return {"Date": None}
    if out.suffix.lower() == ".pdf":
        return {"CreationDate": None}
    return None


def _trace_compare(ax, spec):
    styles = ["-", "--", ":", "-."]
    for k, path in enumerate(spec.inputs):
        cols = read_columns(path)
        check_columns(path, cols, TRACE_REQUIRED)
        meta = sidecar_metadata(path)
        ax.plot(cols["time"], cols["xi_squared"], styles[k % len(styles)],
                label=_legend_label(path, meta))
    ax.axhline(1.0, color="0.8", lw=0.8, zorder=0)
    ax.set_xlabel("time")
    ax.set_ylabel(r"$\xi_S^2$")
    ax.legend()


def _scaling(ax, spec):
    for path in spec.inputs:
        cols = read_columns(path)
        check_columns(path, cols, SWEEP_COLUMNS, exact=True)
        meta = sidecar_metadata(path)
        n = cols["axis_value"]
        label = _legend_label(path, meta)
        if "slope" in meta:
            label += f" (slope {meta['slope']:.3f})"
        points = ax.loglog(n, cols["xi_m_squared"], "o", ms=4, label=label)
        if "slope" in meta and "intercept" in meta:
            fit = np.exp(meta["intercept"]) * n ** meta["slope"]
            ax.loglog(n, fit, "-", color=points[0].get_color(), lw=1, alpha=0.7)
    ax.set_xlabel("atom number N")
    ax.set_ylabel(r"$\xi_M^2$")
    ax.legend()


def _chi_insert(ax, spec):
    for path in spec.inputs:
        cols = read_columns(path)
        check_columns(path, cols, SWEEP_COLUMNS, exact=True)
        meta = sidecar_metadata(path)
        ax.plot(cols["axis_value"], cols["xi_m_squared"], "o-", ms=4,
                label=_legend_label(path, meta))
    ax.set_xlabel(r"$\chi$")
    ax.set_ylabel(r"$\xi_M^2$")
    if len(spec.inputs) > 1:
        ax.legend()


def _omega0_family(ax, spec):
    for path in spec.inputs:
        cols = read_columns(path)
        check_columns(path, cols, SWEEP_COLUMNS, exact=True)
        meta = sidecar_metadata(path)
        ax.plot(cols["axis_value"], cols["xi_m_squared"], "o-", ms=3,
                label=_legend_label(path, meta))
    ax.set_xlabel(r"$\omega_0\,/\,|q|$")
    ax.set_ylabel(r"$\xi_M^2$")
    ax.legend()
