"""Kitagawa–Ueda squeezing factor in the mean-spin frame.

The squeezing factor is xi^2(t) = (4/N) min over the transverse plane of
Var(J_perp), evaluated in the frame attached to the mean spin direction
n0 = <J>/|J|.  With theta = arccos(<Jz>/|J|) and the two-branch azimuth
(phi -> 2 pi - arccos(...) when <Jy> <= 0) the transverse basis is

    n1 = (-sin phi,            cos phi,           0)
    n2 = (cos theta cos phi,   cos theta sin phi, -sin theta)

and the minimum over the angle in the (n1, n2) plane has the closed form
(V11 + V22 - sqrt((V11 - V22)^2 + 4 V12^2)) / 2 in terms of the symmetrized
transverse covariance V.  xi^2 = 1 marks the coherent-state level; below 1
the state is squeezed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .propagator import SpectralPropagator
from .spin_algebra import BasisSpec, QuantumState, SpinOperatorSet, build_spin_ops

#: |<J>| below DEGENERATE_FRACTION * j marks the frame as degenerate
DEGENERATE_FRACTION = 1e-8

#: sin(theta) below this uses the pole convention phi = 0
POLE_SIN_ATOL = 1e-12

#: default number of coarse grid points for minima searches
DEFAULT_GRID_POINTS = 2001

#: relative (to the window) time tolerance of the refined minimum
REFINE_RTOL = 1e-6


class DegenerateFrameError(ValueError):
    """Mean spin length is too small to define the transverse frame."""


@dataclass(frozen=True)
class MeanSpinFrame:
    """Orthonormal triad attached to the mean spin direction."""

    n0: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    theta: float
    phi: float
    j_length: float


@dataclass(frozen=True)
class SqueezingTrace:
    """xi^2(t) on a time grid plus the refined global minimum.

    ``flags`` collects per-run anomalies ("no_squeezing", "degenerate_frame",
    "minimum_at_boundary"); an empty tuple means a clean run.
    """

    times: np.ndarray
    xi_squared: np.ndarray
    optimal_angle: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    j_length: np.ndarray
    xi_m_squared: float
    t_m: float
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if np.any(self.xi_squared <= 0):
            raise ValueError("xi_squared must stay positive")


def _moments(states: np.ndarray, basis: BasisSpec, ops: SpinOperatorSet):
    """First and symmetrized second spin moments for a batch of states.

    ``states`` is (dim, T); tensor factors beyond the spin are traced out by
    contracting over the reshaped rest index.  Returns means (3, T) and
    M (3, 3, T) with M[a, b] = Re <Ja Jb> (the symmetrized part is taken by
    averaging with the transpose downstream).
    """
    spin_dim = basis.spin_dim
    t_len = states.shape[1]
    psi = states.reshape(spin_dim, basis.rest_dim, t_len)
    j_ops = ops.as_vector()
    applied = [np.einsum("ij,jkt->ikt", op, psi) for op in j_ops]
    means = np.empty((3, t_len))
    second = np.empty((3, 3, t_len))
    for a in range(3):
        means[a] = np.real(np.sum(psi.conj() * applied[a], axis=(0, 1)))
        for b in range(3):
            second[a, b] = np.real(np.sum(applied[a].conj() * applied[b], axis=(0, 1)))
    return means, second


def _frame_angles(means: np.ndarray):
    """theta, phi and |<J>| for a batch of mean vectors (3, T)."""
    j_len = np.sqrt(np.sum(means**2, axis=0))
    safe_len = np.maximum(j_len, 1e-300)
    theta = np.arccos(np.clip(means[2] / safe_len, -1.0, 1.0))
    sin_theta = np.sin(theta)
    arg = np.clip(means[0] / np.maximum(safe_len * sin_theta, 1e-300), -1.0, 1.0)
    acos = np.arccos(arg)
    phi = np.where(means[1] > 0.0, acos, 2.0 * np.pi - acos)
    phi = np.where(sin_theta < POLE_SIN_ATOL, 0.0, phi)  # pole convention
    return theta, phi, j_len


def _transverse_minimum(theta, phi, means, second):
    """Closed-form minimal transverse variance and minimizing angle (batch)."""
    n1 = np.stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)])
    n2 = np.stack([np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)])
    sym = 0.5 * (second + np.swapaxes(second, 0, 1))

    def quad(u, v):
        return np.einsum("at,abt,bt->t", u, sym, v)

    m1 = np.sum(n1 * means, axis=0)
    m2 = np.sum(n2 * means, axis=0)
    v11 = quad(n1, n1) - m1**2
    v22 = quad(n2, n2) - m2**2
    v12 = quad(n1, n2) - m1 * m2
    root = np.sqrt((v11 - v22) ** 2 + 4.0 * v12**2)
    # the covariance is positive semidefinite; the floor only absorbs roundoff
    minvar = np.maximum(0.5 * (v11 + v22 - root), 1e-300)
    # Var(angle) = (v11+v22)/2 + ((v11-v22)/2) cos 2a + v12 sin 2a,
    # minimized where (cos 2a, sin 2a) points opposite the residual vector
    angle = 0.5 * np.arctan2(-2.0 * v12, v22 - v11)
    angle = np.mod(angle, np.pi)
    return minvar, angle


def _covariance_floor(means, second):
    """Smallest eigenvalue of the full 3x3 spin covariance (degenerate fallback)."""
    sym = 0.5 * (second + np.swapaxes(second, 0, 1))
    cov = sym - means[:, None, :] * means[None, :, :]
    vals = np.linalg.eigvalsh(np.moveaxis(cov, -1, 0))
    return vals[:, 0]


def mean_spin_frame(state: QuantumState, ops: SpinOperatorSet) -> MeanSpinFrame:
    """Frame (n0, n1, n2) of a single state; fails when |<J>| is degenerate."""
    means, _ = _moments(state.amplitudes[:, None], state.basis, ops)
    theta, phi, j_len = _frame_angles(means)
    theta_v, phi_v, j_v = float(theta[0]), float(phi[0]), float(j_len[0])
    if j_v <= DEGENERATE_FRACTION * ops.j:
        raise DegenerateFrameError(
            f"mean spin length {j_v} below degenerate threshold for j = {ops.j}"
        )
    n0 = np.array([math.sin(theta_v) * math.cos(phi_v),
                   math.sin(theta_v) * math.sin(phi_v),
                   math.cos(theta_v)])
    n1 = np.array([-math.sin(phi_v), math.cos(phi_v), 0.0])
    n2 = np.array([math.cos(theta_v) * math.cos(phi_v),
                   math.cos(theta_v) * math.sin(phi_v),
                   -math.sin(theta_v)])
    return MeanSpinFrame(n0=n0, n1=n1, n2=n2, theta=theta_v, phi=phi_v, j_length=j_v)


def min_transverse_variance(
    state: QuantumState, frame: MeanSpinFrame, ops: SpinOperatorSet
) -> tuple[float, float]:
    """Minimal variance of J·(n1 cos a + n2 sin a) and the minimizing angle."""
    means, second = _moments(state.amplitudes[:, None], state.basis, ops)
    theta = np.array([frame.theta])
    phi = np.array([frame.phi])
    minvar, angle = _transverse_minimum(theta, phi, means, second)
    return float(minvar[0]), float(angle[0])


def squeezing_factor(state: QuantumState, ops: SpinOperatorSet) -> float:
    """(4/N) times the minimal transverse variance in the mean-spin frame."""
    frame = mean_spin_frame(state, ops)
    variance, _ = min_transverse_variance(state, frame, ops)
    return 4.0 * variance / ops.atom_count


def trace_from_states(
    states: np.ndarray,
    times: np.ndarray,
    basis: BasisSpec,
    ops: SpinOperatorSet,
) -> SqueezingTrace:
    """Squeezing trace for precomputed states (dim, T); no minimum refinement."""
    means, second = _moments(states, basis, ops)
    theta, phi, j_len = _frame_angles(means)
    minvar, angle = _transverse_minimum(theta, phi, means, second)
    flags: list[str] = []
    degenerate = j_len <= DEGENERATE_FRACTION * ops.j
    if np.any(degenerate):
        # frame undefined there: fall back to the best variance over all axes
        floor = _covariance_floor(means[:, degenerate], second[:, :, degenerate])
        minvar[degenerate] = np.maximum(floor, 1e-300)
        angle[degenerate] = np.nan
        flags.append("degenerate_frame")
    xi2 = 4.0 * minvar / ops.atom_count
    i_min = int(np.argmin(xi2))
    return SqueezingTrace(
        times=np.asarray(times, dtype=float),
        xi_squared=xi2,
        optimal_angle=angle,
        theta=theta,
        phi=phi,
        j_length=j_len,
        xi_m_squared=float(xi2[i_min]),
        t_m=float(times[i_min]),
        flags=tuple(flags),
    )


def squeezing_trace(
    hamiltonian: np.ndarray,
    initial: QuantumState,
    times: np.ndarray,
    ops: SpinOperatorSet | None = None,
) -> SqueezingTrace:
    """Evolve and evaluate xi^2 on an explicit time grid."""
    ops = ops or build_spin_ops(initial.basis.spin_dim - 1)
    prop = SpectralPropagator(hamiltonian)
    states = prop.states(initial.amplitudes, np.asarray(times, dtype=float))
    return trace_from_states(states, times, initial.basis, ops)


def find_max_squeezing(
    hamiltonian: np.ndarray,
    initial: QuantumState,
    t_max: float,
    ops: SpinOperatorSet | None = None,
    points: int = DEFAULT_GRID_POINTS,
) -> SqueezingTrace:
    """Locate the maximal squeezing (global minimum of xi^2) on (0, t_max].

    Coarse uniform grid, then bracketed refinement of the earliest grid
    minimizer.  The window auto-extends once (doubling) when the minimum
    falls in its final 5%; if it still does, the result carries the
    "minimum_at_boundary" flag rather than failing silently.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    ops = ops or build_spin_ops(initial.basis.spin_dim - 1)
    prop = SpectralPropagator(hamiltonian)

    def coarse(window):
        times = np.linspace(0.0, window, points)
        states = prop.states(initial.amplitudes, times)
        return trace_from_states(states, times, initial.basis, ops)

    window = float(t_max)
    trace = coarse(window)
    extended = False
    if np.argmin(trace.xi_squared) >= 0.95 * (points - 1):
        window *= 2.0
        trace = coarse(window)
        extended = True

    flags = list(trace.flags)
    i_min = int(np.argmin(trace.xi_squared))
    if i_min >= 0.95 * (points - 1) and extended:
        flags.append("minimum_at_boundary")

    if trace.xi_squared[i_min] >= 1.0 - 1e-12:
        flags.append("no_squeezing")

    # bracketed refinement between the neighbors of the coarse minimizer
    t_m = float(trace.times[i_min])
    xi_m = float(trace.xi_squared[i_min])
    if 0 < i_min < points - 1 and "no_squeezing" not in flags:
        lo, hi = trace.times[i_min - 1], trace.times[i_min + 1]

        def objective(t):
            state = prop.state_at(initial.amplitudes, t)
            local = trace_from_states(state[:, None], np.array([t]), initial.basis, ops)
            return float(local.xi_squared[0])

        result = minimize_scalar(
            objective, bounds=(lo, hi), method="bounded",
            options={"xatol": REFINE_RTOL * window},
        )
        if result.fun < xi_m:
            xi_m = float(result.fun)
            t_m = float(result.x)

    return SqueezingTrace(
        times=trace.times,
        xi_squared=trace.xi_squared,
        optimal_angle=trace.optimal_angle,
        theta=trace.theta,
        phi=trace.phi,
        j_length=trace.j_length,
        xi_m_squared=xi_m,
        t_m=t_m,
        flags=tuple(flags),
    )


def default_window(q: float, atom_count: int) -> float:
    """Search window covering the first squeezing minimum: |q| T N = 4 pi."""
    if q == 0.0:
        return 4.0 * np.pi / atom_count
    return 4.0 * np.pi / (abs(q) * atom_count)
