import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spintwist import (
    BasisSpec,
    QuantumState,
    build_spin_ops,
    coherent_state_down,
    parity_operator,
)

CHECKED_N = [1, 2, 3, 10, 57, 100]


def test_single_spin_is_half_pauli():
    ops = build_spin_ops(1)
    assert np.allclose(ops.jz, np.diag([-0.5, 0.5]))
    assert np.allclose(ops.jx, 0.5 * np.array([[0, 1], [1, 0]]))
    assert np.allclose(ops.jy, 0.5 * np.array([[0, 1j], [-1j, 0]]))


def test_two_spin_casimir():
    ops = build_spin_ops(2)
    total = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.allclose(total, 2.0 * np.eye(3), atol=1e-12)


@pytest.mark.parametrize("n", CHECKED_N)
def test_commutators_and_casimir(n):
    ops = build_spin_ops(n)
    jx, jy, jz = ops.jx, ops.jy, ops.jz
    assert np.max(np.abs(jx @ jy - jy @ jx - 1j * jz)) < 1e-12
    assert np.max(np.abs(jy @ jz - jz @ jy - 1j * jx)) < 1e-12
    assert np.max(np.abs(jz @ jx - jx @ jz - 1j * jy)) < 1e-12
    casimir = jx @ jx + jy @ jy + jz @ jz
    assert np.max(np.abs(casimir - ops.j * (ops.j + 1) * np.eye(n + 1))) < 1e-12


@pytest.mark.parametrize("n", CHECKED_N)
def test_hermiticity_and_ladder_adjoint(n):
    ops = build_spin_ops(n)
    for mat in (ops.jx, ops.jy, ops.jz):
        assert np.max(np.abs(mat - mat.conj().T)) < 1e-15
    assert np.array_equal(ops.jplus, ops.jminus.conj().T)


@pytest.mark.parametrize("n", CHECKED_N)
def test_jz_diagonal_ascending(n):
    ops = build_spin_ops(n)
    expected = np.arange(-ops.j, ops.j + 1)
    assert np.allclose(np.diag(ops.jz), expected)
    assert np.max(np.abs(ops.jz - np.diag(np.diag(ops.jz)))) == 0.0
    assert np.allclose(ops.basis_order, expected)


@given(n=st.integers(min_value=1, max_value=60))
@settings(max_examples=25, deadline=None)
def test_ladder_matrix_elements(n):
    ops = build_spin_ops(n)
    j = n / 2
    for k in range(n):  # row k+1, column k holds <m+1|J+|m> with m = k - j
        m = k - j
        assert ops.jplus[k + 1, k] == pytest.approx(np.sqrt(j * (j + 1) - m * (m + 1)))
    assert np.count_nonzero(ops.jplus) == n


@pytest.mark.parametrize("n", CHECKED_N)
def test_jx_spectrum_matches_jz(n):
    ops = build_spin_ops(n)
    jx_eigs = np.sort(np.linalg.eigvalsh(ops.jx))
    assert np.allclose(jx_eigs, np.arange(-ops.j, ops.j + 1), atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_parity_diagonal_and_involutive(n):
    p = parity_operator(build_spin_ops(n))
    diag = np.diag(p)
    assert np.max(np.abs(p - np.diag(diag))) == 0.0
    assert np.all(np.isin(np.real(diag), (-1.0, 1.0)))
    assert np.allclose(p @ p, np.eye(n + 1))


def test_rejects_bad_atom_count():
    with pytest.raises(ValueError):
        build_spin_ops(0)
    with pytest.raises(TypeError):
        build_spin_ops(2.5)
    with pytest.raises(TypeError):
        build_spin_ops(True)
    with pytest.raises(ValueError):
        coherent_state_down(0)


def test_operators_are_write_protected():
    ops = build_spin_ops(3)
    with pytest.raises(ValueError):
        ops.jx[0, 0] = 1.0


def test_pole_state_amplitudes():
    state = coherent_state_down(2)
    assert np.allclose(state.amplitudes, [1.0, 0.0, 0.0])


def test_pole_state_jz_expectation():
    state = coherent_state_down(15)
    ops = build_spin_ops(15)
    jz_mean = np.real(state.amplitudes.conj() @ ops.jz @ state.amplitudes)
    assert jz_mean == pytest.approx(-7.5, abs=1e-12)


def test_pole_state_unit_squeezing():
    from spintwist import squeezing_factor

    state = coherent_state_down(100)
    assert squeezing_factor(state, build_spin_ops(100)) == pytest.approx(1.0, abs=1e-9)


def test_state_norm_validation():
    with pytest.raises(ValueError):
        QuantumState(np.array([1.0, 1.0]), BasisSpec(spin_dim=2))
    with pytest.raises(ValueError):
        QuantumState(np.array([1.0, 0.0, 0.0]), BasisSpec(spin_dim=2))


def test_basis_spec_dimensions():
    basis = BasisSpec(spin_dim=3, fock_dims=(2, 4))
    assert basis.dim == 24
    assert basis.rest_dim == 8
