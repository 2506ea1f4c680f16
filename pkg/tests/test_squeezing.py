import numpy as np
import pytest
from scipy.linalg import expm

from spintwist import (
    BasisSpec,
    DegenerateFrameError,
    QuantumState,
    TwoAxisParams,
    build_spin_ops,
    build_two_axis,
    coherent_state_down,
    default_window,
    find_max_squeezing,
    mean_spin_frame,
    min_transverse_variance,
    squeezing_factor,
    squeezing_trace,
)
from spintwist.propagator import SpectralPropagator


def spin_state(n, amplitudes):
    amp = np.asarray(amplitudes, dtype=complex)
    return QuantumState(amp / np.linalg.norm(amp), BasisSpec(spin_dim=n + 1))


def rotated_pole(n, axis, angle):
    """Pole state rotated by `angle` about `axis` (unit 3-vector)."""
    ops = build_spin_ops(n)
    gen = axis[0] * ops.jx + axis[1] * ops.jy + axis[2] * ops.jz
    return spin_state(n, expm(-1j * angle * gen) @ coherent_state_down(n).amplitudes)


def evolved_pole(n, q, chi, omega_0, t):
    h = build_two_axis(TwoAxisParams(q=q, chi=chi, omega_0=omega_0, atom_count=n))
    psi = SpectralPropagator(h).state_at(coherent_state_down(n).amplitudes, t)
    return QuantumState(psi, BasisSpec(spin_dim=n + 1))


# ------------------------------------------------------------- frame


def test_pole_state_frame():
    n = 8
    frame = mean_spin_frame(coherent_state_down(n), build_spin_ops(n))
    assert frame.theta == pytest.approx(np.pi)
    assert frame.phi == 0.0  # azimuth is gauge at the pole; fixed to zero
    assert np.allclose(frame.n0, [0.0, 0.0, -1.0], atol=1e-12)
    assert frame.j_length == pytest.approx(n / 2)


def test_equatorial_frame_angles():
    n = 12
    # rotate the pole to the (1, 1, 0)/sqrt(2) direction:
    # first tip -z to +x (rotate by -pi/2 about y), then swing x to the diagonal
    state = rotated_pole(n, (0.0, 1.0, 0.0), -np.pi / 2)
    ops = build_spin_ops(n)
    state2 = spin_state(n, expm(-1j * (np.pi / 4) * ops.jz.astype(complex)) @ state.amplitudes)
    frame = mean_spin_frame(state2, ops)
    assert frame.theta == pytest.approx(np.pi / 2, abs=1e-9)
    assert frame.phi == pytest.approx(np.pi / 4, abs=1e-9)


def test_negative_jy_branch():
    n = 12
    state = rotated_pole(n, (0.0, 1.0, 0.0), -np.pi / 2)
    ops = build_spin_ops(n)
    state2 = spin_state(n, expm(1j * (np.pi / 4) * ops.jz.astype(complex)) @ state.amplitudes)
    frame = mean_spin_frame(state2, ops)  # mean spin along (1, -1, 0)
    assert frame.phi == pytest.approx(7 * np.pi / 4, abs=1e-9)


def test_frame_triad_orthonormal():
    for n, axis, angle in [(6, (0, 1, 0), 0.4), (9, (1, 0, 0), 2.0), (5, (0, 1, 0), -1.1)]:
        frame = mean_spin_frame(rotated_pole(n, axis, angle), build_spin_ops(n))
        triad = np.stack([frame.n0, frame.n1, frame.n2])
        assert np.allclose(triad @ triad.T, np.eye(3), atol=1e-10)


def test_degenerate_frame_raises():
    n = 4
    amp = np.zeros(n + 1)
    amp[0] = amp[-1] = 1.0  # equal |m=-j> + |m=+j>: zero mean spin
    with pytest.raises(DegenerateFrameError):
        mean_spin_frame(spin_state(n, amp), build_spin_ops(n))


# ------------------------------------------------------------- variance


def test_pole_state_isotropic_variance():
    n = 10
    ops = build_spin_ops(n)
    state = coherent_state_down(n)
    variance, _ = min_transverse_variance(state, mean_spin_frame(state, ops), ops)
    assert variance == pytest.approx(n / 4, abs=1e-12)


def brute_force_min(state, frame, ops, samples=3600):
    """Oracle: scan the transverse angle over [0, 2 pi), then polish the
    bracketed minimum.  Uses only pointwise variance evaluations."""
    from scipy.optimize import minimize_scalar

    amp = state.amplitudes

    def variance_at(angle):
        direction = np.cos(angle) * frame.n1 + np.sin(angle) * frame.n2
        j_op = direction[0] * ops.jx + direction[1] * ops.jy + direction[2] * ops.jz
        mean = np.real(amp.conj() @ (j_op @ amp))
        mean_sq = np.real(amp.conj() @ (j_op @ (j_op @ amp)))
        return mean_sq - mean**2

    grid = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    values = np.array([variance_at(a) for a in grid])
    k = int(np.argmin(values))
    step = grid[1] - grid[0]
    result = minimize_scalar(variance_at, bounds=(grid[k] - step, grid[k] + step),
                             method="bounded", options={"xatol": 1e-12})
    return min(float(values[k]), float(result.fun))


def test_closed_form_matches_scan_oat():
    n = 4
    state = evolved_pole(n, 1.0, 0.0, 0.0, 0.05)
    ops = build_spin_ops(n)
    frame = mean_spin_frame(state, ops)
    variance, _ = min_transverse_variance(state, frame, ops)
    assert variance == pytest.approx(brute_force_min(state, frame, ops), abs=1e-10)


def test_closed_form_never_above_scan_random_states():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, 14))
        q = float(rng.uniform(-2, 2)) or 1.0
        chi = float(rng.uniform(-1.5, 1.5))
        omega_0 = float(rng.uniform(-3, 3))
        t = float(rng.uniform(0.0, 2.0))
        state = evolved_pole(n, q, chi, omega_0, t)
        ops = build_spin_ops(n)
        try:
            frame = mean_spin_frame(state, ops)
        except DegenerateFrameError:
            continue
        variance, angle = min_transverse_variance(state, frame, ops)
        # closed form is the scan's infimum: not above any sampled angle
        for probe in np.linspace(0, 2 * np.pi, 24, endpoint=False):
            direction = np.cos(probe) * frame.n1 + np.sin(probe) * frame.n2
            j_op = direction[0] * ops.jx + direction[1] * ops.jy + direction[2] * ops.jz
            amp = state.amplitudes
            var_probe = np.real(amp.conj() @ (j_op @ (j_op @ amp))) - \
                np.real(amp.conj() @ (j_op @ amp)) ** 2
            assert variance <= var_probe + 1e-10
        # and the reported angle attains it
        direction = np.cos(angle) * frame.n1 + np.sin(angle) * frame.n2
        j_op = direction[0] * ops.jx + direction[1] * ops.jy + direction[2] * ops.jz
        amp = state.amplitudes
        attained = np.real(amp.conj() @ (j_op @ (j_op @ amp))) - \
            np.real(amp.conj() @ (j_op @ amp)) ** 2
        assert attained == pytest.approx(variance, abs=1e-10)


def test_diagonal_covariance_returns_first_axis():
    # real-amplitude even-parity state: <{Jy, Jx}> = 0, so V12 = 0 in the
    # pole frame, and the smaller variance sits on n1
    n = 4
    state = spin_state(n, [np.cos(0.2), 0.0, np.sin(0.2), 0.0, 0.0])
    ops = build_spin_ops(n)
    frame = mean_spin_frame(state, ops)
    amp = state.amplitudes
    var = {}
    for name, j_op in (("n1", ops.jy), ("n2", ops.jx)):
        mean = np.real(amp.conj() @ (j_op @ amp))
        var[name] = np.real(amp.conj() @ (j_op @ (j_op @ amp))) - mean**2
    assert var["n1"] < var["n2"]
    variance, angle = min_transverse_variance(state, frame, ops)
    assert variance == pytest.approx(var["n1"], abs=1e-12)
    assert angle == pytest.approx(0.0, abs=1e-9)


# ------------------------------------------------------------- factor


@pytest.mark.parametrize("n", [1, 2, 7, 33, 100])
def test_unit_factor_at_pole(n):
    assert squeezing_factor(coherent_state_down(n), build_spin_ops(n)) == \
        pytest.approx(1.0, abs=1e-9)


def test_two_atom_twisting_against_independent_oracle():
    from tests_oracles import independent_two_atom_twisting_trace

    q = 1.0
    times = np.linspace(0.0, 1.2, 25)
    h = build_two_axis(TwoAxisParams(q=q, chi=-1.0, omega_0=0.0, atom_count=2))
    trace = squeezing_trace(h, coherent_state_down(2), times)
    oracle = independent_two_atom_twisting_trace(q, times)
    assert np.max(np.abs(trace.xi_squared - oracle)) < 1e-9


def test_factor_starts_at_unity_for_all_sizes():
    for n in (2, 3, 10, 57):
        h = build_two_axis(TwoAxisParams(q=1.0, chi=-1.0, omega_0=0.7, atom_count=n))
        trace = squeezing_trace(h, coherent_state_down(n), np.linspace(0, 0.5, 8))
        assert trace.xi_squared[0] == pytest.approx(1.0, abs=1e-9)


def test_frame_invariance_under_rotation_about_mean_spin():
    n = 10
    state = evolved_pole(n, 1.0, -0.4, 0.0, 0.08)
    ops = build_spin_ops(n)
    frame = mean_spin_frame(state, ops)
    xi_before = squeezing_factor(state, ops)
    gen = frame.n0[0] * ops.jx + frame.n0[1] * ops.jy + frame.n0[2] * ops.jz
    rotated = spin_state(n, expm(-1j * 0.93 * gen) @ state.amplitudes)
    assert squeezing_factor(rotated, ops) == pytest.approx(xi_before, abs=1e-9)


@pytest.mark.parametrize("chi", [0.5, 2.0])
def test_twisting_duality_traces(chi):
    # at omega_0 = 0 a z-rotation by pi/2 maps (q, chi) to (q chi, 1/chi)
    # while fixing the pole state, so the squeezing traces coincide
    n, q = 12, 1.0
    times = np.linspace(0.0, 0.8, 40)
    h1 = build_two_axis(TwoAxisParams(q=q, chi=chi, omega_0=0.0, atom_count=n))
    h2 = build_two_axis(TwoAxisParams(q=q * chi, chi=1.0 / chi, omega_0=0.0, atom_count=n))
    tr1 = squeezing_trace(h1, coherent_state_down(n), times)
    tr2 = squeezing_trace(h2, coherent_state_down(n), times)
    assert np.max(np.abs(tr1.xi_squared - tr2.xi_squared)) < 1e-9


# ------------------------------------------------------------- search


def test_pure_rotation_flags_no_squeezing():
    n = 20
    h = build_two_axis(TwoAxisParams(q=0.0, chi=0.0, omega_0=2.0, atom_count=n))
    trace = find_max_squeezing(h, coherent_state_down(n), 5.0)
    assert "no_squeezing" in trace.flags
    assert np.allclose(trace.xi_squared, 1.0, atol=1e-9)


def test_search_refines_minimum():
    n = 40
    h = build_two_axis(TwoAxisParams(q=1.0, chi=-1.0, omega_0=0.0, atom_count=n))
    coarse = squeezing_trace(h, coherent_state_down(n), np.linspace(0, default_window(1.0, n), 101))
    refined = find_max_squeezing(h, coherent_state_down(n), default_window(1.0, n))
    assert refined.xi_m_squared <= np.min(coarse.xi_squared) + 1e-12
    assert refined.t_m > 0
    assert not refined.flags


def test_window_auto_extension():
    # a window ending right before the first minimum must auto-extend once
    n = 30
    h = build_two_axis(TwoAxisParams(q=1.0, chi=-1.0, omega_0=0.0, atom_count=n))
    full = find_max_squeezing(h, coherent_state_down(n), default_window(1.0, n))
    short = find_max_squeezing(h, coherent_state_down(n), full.t_m * 1.01)
    assert short.xi_m_squared == pytest.approx(full.xi_m_squared, rel=1e-6)


def test_degenerate_samples_fall_back_and_flag():
    # long two-axis evolution passes near zero mean spin length
    n = 6
    h = build_two_axis(TwoAxisParams(q=1.0, chi=-1.0, omega_0=0.0, atom_count=n))
    times = np.linspace(0.0, 12.0, 600)
    trace = squeezing_trace(h, coherent_state_down(n), times)
    if np.min(trace.j_length) <= 1e-8 * (n / 2):
        assert "degenerate_frame" in trace.flags
        assert np.all(trace.xi_squared > 0)
    else:  # no degenerate sample on this grid; nothing to flag
        assert "degenerate_frame" not in trace.flags


def test_search_rejects_bad_window():
    h = build_two_axis(TwoAxisParams(q=1.0, chi=0.0, omega_0=0.0, atom_count=4))
    with pytest.raises(ValueError):
        find_max_squeezing(h, coherent_state_down(4), 0.0)
