"""Exact unitary evolution under a time-independent Hermitian Hamiltonian.

Two interchangeable backends:

* spectral — one Hermitian eigendecomposition, then pure phase evolution.
  Cost amortizes over dense time grids; the default below the dimension
  crossover.
* krylov — Lanczos approximation of exp(-iHt)|psi> with adaptive subspace
  size and step splitting.  Used above the crossover, where a full
  eigendecomposition stops being worth it.

Both conserve the norm to the plan tolerance; a violation aborts, since it
can only mean a solver bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: dimension at which evolve() switches from spectral to krylov
SPECTRAL_DIM_LIMIT = 4096

#: Hermiticity residual accepted at plan creation (relative to max |H|)
PLAN_HERMITICITY_RTOL = 1e-10


class NormDriftError(RuntimeError):
    """Evolved state lost normalization beyond tolerance."""


@dataclass(frozen=True)
class EvolutionPlan:
    """Immutable description of one evolution job."""

    hamiltonian: np.ndarray
    times: np.ndarray
    method: str = "auto"  # auto | spectral | krylov
    norm_tolerance: float = 1e-10
    krylov_tolerance: float = 1e-10

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"hamiltonian must be square, got shape {h.shape}")
        scale = max(1.0, float(np.max(np.abs(h))))
        residual = float(np.max(np.abs(h - h.conj().T)))
        if residual > PLAN_HERMITICITY_RTOL * scale:
            raise ValueError(f"hamiltonian is not Hermitian (residual {residual})")
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a nonempty 1-D array")
        if times[0] < 0 or np.any(np.diff(times) < 0):
            raise ValueError("times must be ascending and start at t >= 0")
        if self.method not in ("auto", "spectral", "krylov"):
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "times", times)

    def resolved_method(self) -> str:
        if self.method != "auto":
            return self.method
        return "spectral" if self.hamiltonian.shape[0] <= SPECTRAL_DIM_LIMIT else "krylov"


class SpectralPropagator:
    """Cached eigendecomposition of H, reusable across states and time grids."""

    def __init__(self, hamiltonian: np.ndarray):
        self.eigvals, self.eigvecs = np.linalg.eigh(hamiltonian)

    def states(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """All exp(-iHt)|psi0> at once; returns a (dim, n_times) array."""
        coeff = self.eigvecs.conj().T @ psi0
        phases = np.exp(-1j * np.outer(self.eigvals, np.asarray(times, dtype=float)))
        return self.eigvecs @ (phases * coeff[:, None])

    def state_at(self, psi0: np.ndarray, t: float) -> np.ndarray:
        coeff = self.eigvecs.conj().T @ psi0
        return self.eigvecs @ (np.exp(-1j * self.eigvals * t) * coeff)


def _lanczos_step(h, psi, dt, tol, max_krylov=40):
    """One exp(-iH dt)|psi> via Lanczos with full reorthogonalization.

    Splits the step in half when the subspace residual estimate stays above
    ``tol``; happy breakdown returns the exact subspace result.
    """
    norm0 = np.linalg.norm(psi)
    if norm0 == 0.0 or dt == 0.0:
        return psi.copy()
    v = psi / norm0
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    for k in range(max_krylov):
        w = h @ basis[-1]
        alpha = float(np.real(np.vdot(basis[-1], w)))
        alphas.append(alpha)
        w = w - alpha * basis[-1]
        if betas:
            w = w - betas[-1] * basis[-2]
        # full reorthogonalization: dimensions here are modest, robustness wins
        for b in basis:
            w = w - np.vdot(b, w) * b
        beta = float(np.linalg.norm(w))
        t_mat = np.diag(alphas).astype(complex)
        if betas:
            off = np.array(betas)
            t_mat += np.diag(off, 1) + np.diag(off, -1)
        small = _expm_tridiag(t_mat, dt)
        if beta < 1e-14:  # happy breakdown: subspace is invariant
            return norm0 * (np.column_stack(basis) @ small)
        err = abs(beta * small[-1]) * min(1.0, abs(dt) * beta)
        if err < tol and k >= 1:
            return norm0 * (np.column_stack(basis) @ small)
        betas.append(beta)
        basis.append(w / beta)
    half = _lanczos_step(h, psi, dt / 2.0, tol / 2.0, max_krylov)
    return _lanczos_step(h, half, dt / 2.0, tol / 2.0, max_krylov)


def _expm_tridiag(t_mat: np.ndarray, dt: float) -> np.ndarray:
    """First column of exp(-i dt T) for the (small, Hermitian) Lanczos matrix."""
    vals, vecs = np.linalg.eigh(t_mat)
    return vecs @ (np.exp(-1j * dt * vals) * vecs.conj().T[:, 0])


def krylov_states(h, psi0, times, tol=1e-10) -> np.ndarray:
    """exp(-iHt)|psi0> on an ascending grid by Lanczos stepping."""
    times = np.asarray(times, dtype=float)
    out = np.empty((psi0.size, times.size), dtype=complex)
    psi = psi0.astype(complex)
    t_now = 0.0
    # error budget split across steps so the endpoint stays inside tol
    step_tol = tol / max(1, times.size)
    for k, t in enumerate(times):
        dt = t - t_now
        if dt > 0:
            psi = _lanczos_step(h, psi, dt, step_tol)
            t_now = t
        out[:, k] = psi
    return out


def evolve_amplitudes(plan: EvolutionPlan, psi0: np.ndarray) -> np.ndarray:
    """Raw (dim, n_times) evolution used by the trace machinery."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.size != plan.hamiltonian.shape[0]:
        raise ValueError("initial state dimension does not match the Hamiltonian")
    if plan.resolved_method() == "spectral":
        states = SpectralPropagator(plan.hamiltonian).states(psi0, plan.times)
    else:
        states = krylov_states(plan.hamiltonian, psi0, plan.times, tol=plan.krylov_tolerance)
    norms = np.linalg.norm(states, axis=0)
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > plan.norm_tolerance:
        raise NormDriftError(f"norm drifted by {worst} (tolerance {plan.norm_tolerance})")
    return states


def evolve(plan: EvolutionPlan, initial) -> list:
    """Evolve a QuantumState through every plan time; returns one state per time."""
    from .spin_algebra import QuantumState

    if not isinstance(initial, QuantumState):
        raise TypeError("initial must be a QuantumState")
    states = evolve_amplitudes(plan, initial.amplitudes)
    return [QuantumState(states[:, k].copy(), initial.basis) for k in range(states.shape[1])]
