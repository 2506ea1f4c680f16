"""Experiment drivers: full-vs-effective comparison, N-scaling fits, and
chi / omega_0 sweeps of the maximal squeezing factor.

Internal unit convention for all sweeps: q = 1, so times come out in units
of 1/|q| and omega_0 values are read in units of |q|.  The full-vs-effective
comparison instead works in units of omega_0 (the caller passes ratios).
Sweep points are independent and run on a thread pool; aggregation is always
ordered by axis value.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .model_builder import (
    TwoAxisParams,
    TwoModeDickeParams,
    build_two_axis,
    build_two_mode_dicke,
    dispersive_ratio,
    map_to_two_axis,
    vacuum_product_state,
)
from .propagator import SpectralPropagator
from .spin_algebra import build_spin_ops, coherent_state_down
from .squeezing import (
    DEFAULT_GRID_POINTS,
    SqueezingTrace,
    default_window,
    find_max_squeezing,
    trace_from_states,
)

#: sup-norm change of the full-model trace accepted as Fock-cutoff convergence
CUTOFF_CONVERGENCE_TOL = 1e-6

#: doublings tried before the cutoff ladder gives up
MAX_CUTOFF_DOUBLINGS = 3

#: comparison window = this factor times the first squeezing minimum time
COMPARISON_WINDOW_MARGIN = 1.5


def _max_workers() -> int:
    env = os.environ.get("SPINTWIST_WORKERS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _run_ordered(fn, values, workers=None):
    """Map fn over values concurrently, results in input order."""
    workers = workers or _max_workers()
    if workers == 1 or len(values) <= 1:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, values))


@dataclass(frozen=True)
class SweepResult:
    """One squeezing summary per axis value, plus everything needed to re-run."""

    axis_name: str
    axis_values: np.ndarray
    xi_m_squared: np.ndarray
    t_m: np.ndarray
    metadata: dict
    flags: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        values = np.asarray(self.axis_values, dtype=float)
        if values.size and np.any(np.diff(values) <= 0):
            raise ValueError("axis_values must be strictly ascending")
        if not (values.size == len(self.xi_m_squared) == len(self.t_m)):
            raise ValueError("one result row per axis value required")


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of log xi_M^2 against log N."""

    n_values: np.ndarray
    xi_m_squared: np.ndarray
    t_m: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    metadata: dict
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComparisonResult:
    """Squeezing traces of the two-mode Dicke model and its two-axis reduction."""

    times: np.ndarray
    xi_full: np.ndarray
    xi_effective: np.ndarray
    max_abs_deviation: float
    effective_params: TwoAxisParams
    cutoff_report: "CutoffReport"
    metadata: dict
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class CutoffReport:
    """Fock-cutoff ladder evidence for one full-model trace."""

    cutoffs: tuple[int, ...]
    sup_changes: tuple[float, ...]
    converged: bool
    chosen_cutoff: int
    mean_photons_a: float
    mean_photons_b: float
    dispersive_estimate_a: float
    dispersive_estimate_b: float
    dispersive_ratio: float = float("inf")
    warnings: tuple[str, ...] = ()

    def summary(self) -> dict:
        return {
            "cutoffs": list(self.cutoffs),
            "sup_changes": list(self.sup_changes),
            "converged": self.converged,
            "chosen_cutoff": self.chosen_cutoff,
            "mean_photons_a": self.mean_photons_a,
            "mean_photons_b": self.mean_photons_b,
            "dispersive_estimate_a": self.dispersive_estimate_a,
            "dispersive_estimate_b": self.dispersive_estimate_b,
            "dispersive_ratio": self.dispersive_ratio,
            "warnings": list(self.warnings),
        }


def _full_model_trace(eff: TwoModeDickeParams, cutoff: int, times: np.ndarray):
    """Trace of the full model at one symmetric cutoff, plus photon numbers."""
    h, basis = build_two_mode_dicke(eff, cutoff, cutoff)
    initial = vacuum_product_state(eff, cutoff, cutoff)
    prop = SpectralPropagator(h)
    states = prop.states(initial.amplitudes, times)
    ops = build_spin_ops(eff.atom_count)
    trace = trace_from_states(states, times, basis, ops)
    occ = np.arange(cutoff + 1, dtype=float)
    psi = states.reshape(basis.spin_dim, cutoff + 1, cutoff + 1, len(times))
    prob = np.abs(psi) ** 2
    mean_a = float(np.mean(np.einsum("sabt,a->t", prob, occ)))
    mean_b = float(np.mean(np.einsum("sabt,b->t", prob, occ)))
    return trace, mean_a, mean_b


def _dispersive_photon_estimates(eff: TwoModeDickeParams, times: np.ndarray):
    """<a†a> and <b†b> predicted by a = -l1 Jx/wA, b = -l2 Jy/wB on the
    effective trajectory (photons slaved to the spin)."""
    two_axis = map_to_two_axis(eff, warn_ratio=0.0)
    ops = build_spin_ops(eff.atom_count)
    h = build_two_axis(two_axis, ops)
    prop = SpectralPropagator(h)
    states = prop.states(coherent_state_down(eff.atom_count).amplitudes, times)
    jx2 = np.real(np.sum(np.abs(ops.jx @ states) ** 2, axis=0))
    jy2 = np.real(np.sum(np.abs(ops.jy @ states) ** 2, axis=0))
    est_a = float(np.mean(jx2)) * (eff.lambda_1 / eff.omega_a_eff) ** 2
    est_b = float(np.mean(jy2)) * (eff.lambda_2 / eff.omega_b_eff) ** 2
    return est_a, est_b


def cutoff_ladder(
    eff: TwoModeDickeParams,
    times: np.ndarray,
    start_cutoff: int = 1,
    tol: float = CUTOFF_CONVERGENCE_TOL,
    max_doublings: int = MAX_CUTOFF_DOUBLINGS,
):
    """Double the Fock cutoff until the trace stops moving.

    Returns (report, trace at the chosen cutoff).  Convergence is certified
    by the first consecutive pair of cutoffs whose traces differ by less
    than ``tol`` in sup norm; the larger member of the pair is kept.
    """
    cutoff = start_cutoff
    trace_prev, mean_a, mean_b = _full_model_trace(eff, cutoff, times)
    cutoffs = [cutoff]
    changes: list[float] = []
    converged = False
    for _ in range(max_doublings):
        cutoff *= 2
        trace_next, mean_a, mean_b = _full_model_trace(eff, cutoff, times)
        change = float(np.max(np.abs(trace_next.xi_squared - trace_prev.xi_squared)))
        cutoffs.append(cutoff)
        changes.append(change)
        trace_prev = trace_next
        if change < tol:
            converged = True
            break
    est_a, est_b = _dispersive_photon_estimates(eff, times)
    ratio = dispersive_ratio(eff)
    notes: list[str] = []
    if not converged:
        notes.append("cutoff_not_converged")
    if ratio < 10.0:
        notes.append("dispersive_regime_violated")
    report = CutoffReport(
        cutoffs=tuple(cutoffs),
        sup_changes=tuple(changes),
        converged=converged,
        chosen_cutoff=cutoff,
        mean_photons_a=mean_a,
        mean_photons_b=mean_b,
        dispersive_estimate_a=est_a,
        dispersive_estimate_b=est_b,
        dispersive_ratio=ratio,
        warnings=tuple(notes),
    )
    return report, trace_prev


def _first_local_minimum(times: np.ndarray, values: np.ndarray) -> float:
    diff = np.diff(values)
    candidates = np.where((diff[:-1] < 0) & (diff[1:] >= 0))[0] + 1
    if candidates.size:
        return float(times[candidates[0]])
    return float(times[-1])


def compare_full_vs_effective(
    eff: TwoModeDickeParams,
    window: float | None = None,
    points: int = 801,
    start_cutoff: int = 1,
    window_margin: float = COMPARISON_WINDOW_MARGIN,
) -> ComparisonResult:
    """Overlay xi^2(t) of the two-mode Dicke model and its two-axis reduction.

    The comparison window defaults to ``window_margin`` times the first
    squeezing minimum of the effective model, which is where the reduction
    is meant to be judged; the exact parametric resonances of the full model
    (e.g. wA + wB = 0) eventually dephase the two traces at much later times.
    """
    two_axis = map_to_two_axis(eff)
    ops = build_spin_ops(eff.atom_count)
    h_eff = build_two_axis(two_axis, ops)
    initial = coherent_state_down(eff.atom_count)

    if window is None:
        scout = find_max_squeezing(
            h_eff, initial, default_window(two_axis.q, eff.atom_count), ops
        )
        window = window_margin * _first_local_minimum(scout.times, scout.xi_squared)

    times = np.linspace(0.0, float(window), points)
    prop = SpectralPropagator(h_eff)
    eff_trace = trace_from_states(
        prop.states(initial.amplitudes, times), times, initial.basis, ops
    )
    report, full_trace = cutoff_ladder(eff, times, start_cutoff=start_cutoff)
    deviation = float(np.max(np.abs(full_trace.xi_squared - eff_trace.xi_squared)))
    flags = [] if report.converged else ["cutoff_not_converged"]
    metadata = {
        "version": __version__,
        "experiment": "full_vs_effective",
        "omega_a_eff": eff.omega_a_eff,
        "omega_b_eff": eff.omega_b_eff,
        "omega_0": eff.omega_0,
        "lambda_1": eff.lambda_1,
        "lambda_2": eff.lambda_2,
        "atom_count": eff.atom_count,
        "q": two_axis.q,
        "chi": two_axis.chi,
        "dispersive_ratio": dispersive_ratio(eff),
        "initial_state": "spin pole state, both cavities in vacuum (assumption)",
        "window": float(window),
        "window_margin": window_margin,
        "points": points,
        "cutoff_report": report.summary(),
        "unit_convention": "energies in units of omega_0, time in units of 1/omega_0",
    }
    return ComparisonResult(
        times=times,
        xi_full=full_trace.xi_squared,
        xi_effective=eff_trace.xi_squared,
        max_abs_deviation=deviation,
        effective_params=two_axis,
        cutoff_report=report,
        metadata=metadata,
        flags=tuple(flags),
    )


def convergence_audit(
    eff: TwoModeDickeParams,
    window: float | None = None,
    points: int = 801,
    start_cutoff: int = 1,
    tol: float = CUTOFF_CONVERGENCE_TOL,
) -> CutoffReport:
    """Stand-alone Fock-cutoff audit of the full model over a trace window."""
    two_axis = map_to_two_axis(eff, warn_ratio=0.0)
    if window is None:
        ops = build_spin_ops(eff.atom_count)
        scout = find_max_squeezing(
            build_two_axis(two_axis, ops),
            coherent_state_down(eff.atom_count),
            default_window(two_axis.q, eff.atom_count),
            ops,
        )
        window = COMPARISON_WINDOW_MARGIN * _first_local_minimum(
            scout.times, scout.xi_squared
        )
    times = np.linspace(0.0, float(window), points)
    report, _ = cutoff_ladder(eff, times, start_cutoff=start_cutoff, tol=tol)
    return report


def max_squeezing_point(
    atom_count: int,
    chi: float,
    omega_0: float,
    q: float = 1.0,
    points: int = DEFAULT_GRID_POINTS,
) -> SqueezingTrace:
    """find_max_squeezing for one (N, chi, omega_0) in internal units."""
    params = TwoAxisParams(q=q, chi=chi, omega_0=omega_0, atom_count=atom_count)
    ops = build_spin_ops(atom_count)
    h = build_two_axis(params, ops)
    return find_max_squeezing(
        h, coherent_state_down(atom_count), default_window(q, atom_count), ops,
        points=points,
    )


def sweep_scaling(
    n_values,
    chi: float,
    omega_0: float = 0.0,
    points: int = DEFAULT_GRID_POINTS,
    workers: int | None = None,
) -> ScalingFit:
    """xi_M^2 against atom number at fixed chi, with a log-log power-law fit."""
    n_values = [int(n) for n in n_values]
    if sorted(set(n_values)) != n_values:
        raise ValueError("n_values must be strictly ascending integers")
    notes: list[str] = []
    if len(n_values) < 10:
        notes.append(f"only {len(n_values)} atom numbers; fit will be noisy")

    traces = _run_ordered(
        lambda n: max_squeezing_point(n, chi, omega_0, points=points),
        n_values, workers,
    )
    flagged = [n for n, tr in zip(n_values, traces) if tr.flags]
    if flagged:
        notes.append(f"flagged squeezing searches at N = {flagged}; fit is suspect")
    xi = np.array([tr.xi_m_squared for tr in traces])
    tm = np.array([tr.t_m for tr in traces])
    slope, intercept = np.polyfit(np.log(n_values), np.log(xi), 1)
    predicted = slope * np.log(n_values) + intercept
    resid = np.log(xi) - predicted
    total = np.log(xi) - np.mean(np.log(xi))
    r_squared = 1.0 - float(np.sum(resid**2) / np.sum(total**2))
    metadata = {
        "version": __version__,
        "experiment": "scaling",
        "chi": chi,
        "omega_0": omega_0,
        "q": 1.0,
        "n_values": n_values,
        "points": points,
        "window_rule": "q*T*N = 4*pi, auto-extended once",
        "unit_convention": "q = 1; time in units of 1/q",
    }
    return ScalingFit(
        n_values=np.array(n_values),
        xi_m_squared=xi,
        t_m=tm,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        metadata=metadata,
        warnings=tuple(notes),
    )


def sweep_chi(
    chi_values,
    atom_count: int,
    points: int = DEFAULT_GRID_POINTS,
    workers: int | None = None,
) -> SweepResult:
    """xi_M^2 against chi at omega_0 = 0 for a fixed atom number."""
    chi_values = [float(c) for c in chi_values]
    traces = _run_ordered(
        lambda c: max_squeezing_point(atom_count, c, 0.0, points=points),
        chi_values, workers,
    )
    xi = np.array([tr.xi_m_squared for tr in traces])
    metadata = {
        "version": __version__,
        "experiment": "chi_scan",
        "atom_count": atom_count,
        "omega_0": 0.0,
        "q": 1.0,
        "points": points,
        "argmin_chi": float(chi_values[int(np.argmin(xi))]),
        "unit_convention": "q = 1; time in units of 1/q",
    }
    return SweepResult(
        axis_name="chi",
        axis_values=np.array(chi_values),
        xi_m_squared=xi,
        t_m=np.array([tr.t_m for tr in traces]),
        metadata=metadata,
        flags=tuple(tr.flags for tr in traces),
    )


def default_omega0_grid(atom_count: int, count: int = 41) -> np.ndarray:
    """Default omega_0 sweep: [0, 2 q N] where the field competes with the
    collective interaction energy."""
    return np.linspace(0.0, 2.0 * atom_count, count)


def sweep_omega0(
    omega0_values,
    chi: float,
    atom_count: int,
    points: int = DEFAULT_GRID_POINTS,
    workers: int | None = None,
) -> SweepResult:
    """xi_M^2 against omega_0 (units of |q|) at fixed chi and atom number."""
    omega0_values = [float(w) for w in omega0_values]
    if any(w < 0 for w in omega0_values):
        raise ValueError("omega0_values must be >= 0 (units of |q|)")
    traces = _run_ordered(
        lambda w: max_squeezing_point(atom_count, chi, w, points=points),
        omega0_values, workers,
    )
    metadata = {
        "version": __version__,
        "experiment": "omega0_scan",
        "atom_count": atom_count,
        "chi": chi,
        "q": 1.0,
        "points": points,
        "unit_convention": "omega_0 in units of |q|; time in units of 1/q",
    }
    return SweepResult(
        axis_name="omega_0",
        axis_values=np.array(omega0_values),
        xi_m_squared=np.array([tr.xi_m_squared for tr in traces]),
        t_m=np.array([tr.t_m for tr in traces]),
        metadata=metadata,
        flags=tuple(tr.flags for tr in traces),
    )
