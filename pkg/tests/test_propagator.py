import numpy as np
import pytest
from scipy.integrate import solve_ivp

from spintwist import (
    EvolutionPlan,
    TwoAxisParams,
    build_spin_ops,
    build_two_axis,
    coherent_state_down,
    evolve,
    parity_operator,
)
from spintwist.propagator import NormDriftError, evolve_amplitudes, krylov_states


def two_axis_h(n, q=1.0, chi=-1.0, omega_0=0.0):
    return build_two_axis(TwoAxisParams(q=q, chi=chi, omega_0=omega_0, atom_count=n))


def test_eigenstate_acquires_global_phase():
    n, omega_0 = 6, 1.7
    ops = build_spin_ops(n)
    h = omega_0 * ops.jz
    psi0 = coherent_state_down(n)
    times = np.linspace(0.0, 8.0, 21)
    states = evolve(EvolutionPlan(hamiltonian=h, times=times), psi0)
    for t, state in zip(times, states):
        phase = np.exp(1j * omega_0 * ops.j * t)  # energy of |Jz=-j> is -omega_0 j
        assert np.allclose(state.amplitudes, phase * psi0.amplitudes, atol=1e-12)


def test_eigenstate_keeps_unit_squeezing():
    from spintwist import squeezing_trace

    n = 10
    ops = build_spin_ops(n)
    trace = squeezing_trace(2.0 * ops.jz, coherent_state_down(n), np.linspace(0, 5, 50), ops)
    assert np.allclose(trace.xi_squared, 1.0, atol=1e-9)


def high_order_integrator(h, psi0, t_end):
    """Independent oracle: stiff-accurate RK integration of the Schroedinger
    equation, nothing shared with the spectral path."""

    def rhs(_, y):
        return -1j * (h @ y)

    sol = solve_ivp(rhs, (0.0, t_end), psi0.astype(complex),
                    method="DOP853", rtol=1e-12, atol=1e-14, max_step=t_end / 50)
    return sol.y[:, -1]


def test_spectral_matches_independent_integrator():
    n, q = 4, 1.0
    h = two_axis_h(n, q=q, chi=0.0)
    psi0 = coherent_state_down(n).amplitudes
    t_end = np.pi / 2 / q
    plan = EvolutionPlan(hamiltonian=h, times=np.array([t_end]))
    spectral = evolve_amplitudes(plan, psi0)[:, 0]
    oracle = high_order_integrator(h, psi0, t_end)
    assert np.linalg.norm(spectral - oracle) < 1e-10
    assert abs(np.vdot(psi0, spectral)) == pytest.approx(abs(np.vdot(psi0, oracle)), abs=1e-10)


def test_norm_conservation_along_trace():
    h = two_axis_h(12, chi=-0.7, omega_0=2.0)
    times = np.linspace(0.0, 30.0, 400)
    states = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=times),
                               coherent_state_down(12).amplitudes)
    assert np.max(np.abs(np.linalg.norm(states, axis=0) - 1.0)) < 1e-10


def test_energy_conservation():
    h = two_axis_h(14, chi=-1.0, omega_0=1.0)
    psi0 = coherent_state_down(14).amplitudes
    times = np.linspace(0.0, 10.0, 100)
    states = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=times), psi0)
    energies = np.real(np.sum(states.conj() * (h @ states), axis=0))
    assert np.max(np.abs(energies - energies[0])) < 1e-8 * np.max(np.abs(h))


def test_composition_of_evolutions():
    h = two_axis_h(9, chi=0.3, omega_0=0.5)
    psi0 = coherent_state_down(9).amplitudes
    t1, t2 = 0.8, 2.1
    direct = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=np.array([t2])), psi0)[:, 0]
    stage1 = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=np.array([t1])), psi0)[:, 0]
    stage2 = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=np.array([t2 - t1])), stage1)[:, 0]
    assert np.linalg.norm(direct - stage2) < 1e-9


def test_parity_expectation_constant():
    n = 16
    ops = build_spin_ops(n)
    h = two_axis_h(n, chi=-1.0, omega_0=3.0)
    p = parity_operator(ops)
    psi0 = coherent_state_down(n).amplitudes
    times = np.linspace(0.0, 5.0, 80)
    states = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=times), psi0)
    parity = np.real(np.sum(states.conj() * (p @ states), axis=0))
    assert np.max(np.abs(parity - parity[0])) < 1e-9


@pytest.mark.parametrize("dim", [60, 300])
def test_krylov_matches_spectral(dim):
    rng = np.random.default_rng(7)
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (mat + mat.conj().T) / 2.0
    psi0 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi0 /= np.linalg.norm(psi0)
    times = np.linspace(0.0, 2.0, 9)
    spectral = evolve_amplitudes(
        EvolutionPlan(hamiltonian=h, times=times, method="spectral"), psi0)
    krylov = evolve_amplitudes(
        EvolutionPlan(hamiltonian=h, times=times, method="krylov"), psi0)
    err = np.max(np.linalg.norm(spectral - krylov, axis=0))
    assert err < 1e-8


def test_krylov_matches_spectral_physical_model():
    from spintwist import TwoModeDickeParams, build_two_mode_dicke, vacuum_product_state

    eff = TwoModeDickeParams(omega_a_eff=200.0, omega_b_eff=-200.0, omega_0=1.0,
                             lambda_1=2.0, lambda_2=1.0, atom_count=6)
    h, _ = build_two_mode_dicke(eff, 3, 3)  # dim 112
    psi0 = vacuum_product_state(eff, 3, 3).amplitudes
    times = np.linspace(0.0, 1.5, 7)
    spectral = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=times, method="spectral"), psi0)
    krylov = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=times, method="krylov"), psi0)
    assert np.max(np.linalg.norm(spectral - krylov, axis=0)) < 1e-8


def test_auto_method_selection():
    h = np.diag(np.arange(5.0))
    plan = EvolutionPlan(hamiltonian=h, times=np.array([1.0]))
    assert plan.resolved_method() == "spectral"
    assert EvolutionPlan(hamiltonian=h, times=np.array([1.0]),
                         method="krylov").resolved_method() == "krylov"


def test_rejects_non_hermitian():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        EvolutionPlan(hamiltonian=bad, times=np.array([1.0]))


def test_rejects_bad_time_grid():
    h = np.eye(2)
    with pytest.raises(ValueError):
        EvolutionPlan(hamiltonian=h, times=np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        EvolutionPlan(hamiltonian=h, times=np.array([-1.0, 0.5]))
    with pytest.raises(ValueError):
        EvolutionPlan(hamiltonian=h, times=np.array([]))


def test_evolve_preserves_basis_and_checks_dims():
    n = 3
    psi0 = coherent_state_down(n)
    plan = EvolutionPlan(hamiltonian=two_axis_h(n), times=np.array([0.0, 1.0]))
    out = evolve(plan, psi0)
    assert len(out) == 2
    assert out[0].basis == psi0.basis
    with pytest.raises(ValueError):
        evolve_amplitudes(plan, np.zeros(7, dtype=complex))


def test_krylov_periodic_revival_overlap():
    # one-axis twisting at qt = pi/2 for even N has a structured revival;
    # both backends must agree on the overlap with the initial state
    n, q = 4, 1.0
    h = two_axis_h(n, q=q, chi=0.0)
    psi0 = coherent_state_down(n).amplitudes
    t = np.pi / 2 / q
    s = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=np.array([t]), method="spectral"), psi0)
    k = evolve_amplitudes(EvolutionPlan(hamiltonian=h, times=np.array([t]), method="krylov"), psi0)
    assert abs(np.vdot(psi0, s[:, 0])) == pytest.approx(abs(np.vdot(psi0, k[:, 0])), abs=1e-10)
