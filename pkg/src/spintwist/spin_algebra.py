"""Collective angular-momentum operators on the symmetric Dicke subspace.

N two-level atoms restricted to the maximal-spin sector j = N/2 live in an
(N+1)-dimensional space spanned by |j, m>, m = -j..j.  Basis order is
ascending m, so the all-spins-down state |Jz = -j> is the first basis vector
and the raising operator is a single lower subdiagonal.  hbar = 1 throughout;
every frequency in this package is an angular frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: elementwise tolerance for the operator-algebra identities (commutators, Casimir)
ALGEBRA_ATOL = 1e-12

#: tolerance on the Euclidean norm of state vectors
STATE_NORM_ATOL = 1e-10


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_atom_count(atom_count) -> int:
    if isinstance(atom_count, bool) or not isinstance(atom_count, (int, np.integer)):
        raise TypeError(f"atom_count must be an integer, got {atom_count!r}")
    if atom_count < 1:
        raise ValueError(f"atom_count must be >= 1, got {atom_count}")
    return int(atom_count)


@dataclass(frozen=True)
class BasisSpec:
    """Declared tensor factorization of a state vector.

    The spin factor always comes first, followed by any Fock-mode factors
    (mode a, then mode b).  Dimensions are full factor dimensions, i.e. a
    Fock mode with cutoff n_max contributes n_max + 1.
    """

    spin_dim: int
    fock_dims: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.spin_dim * math.prod(self.fock_dims)

    @property
    def rest_dim(self) -> int:
        """Combined dimension of all non-spin factors."""
        return math.prod(self.fock_dims)


@dataclass(frozen=True)
class QuantumState:
    """Normalized complex amplitude vector over a declared tensor basis."""

    amplitudes: np.ndarray
    basis: BasisSpec

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size != self.basis.dim:
            raise ValueError(
                f"amplitude vector of length {amp.size} does not match "
                f"declared basis dimension {self.basis.dim}"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > STATE_NORM_ATOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {STATE_NORM_ATOL}")
        object.__setattr__(self, "amplitudes", _readonly(amp))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def spin_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (spin_dim, rest_dim) for partial expectations."""
        return self.amplitudes.reshape(self.basis.spin_dim, -1)


@dataclass(frozen=True)
class SpinOperatorSet:
    """Dense matrices of Jx, Jy, Jz, J+, J- for N atoms at j = N/2.

    All matrices are (N+1) x (N+1) complex, in ascending-m order, and are
    write-protected after construction.
    """

    atom_count: int
    j: float
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    #: m eigenvalue of jz for each basis index (ascending)
    basis_order: np.ndarray

    @property
    def dim(self) -> int:
        return self.atom_count + 1

    def as_vector(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.jx, self.jy, self.jz)


def build_spin_ops(atom_count) -> SpinOperatorSet:
    """Construct collective spin operators for N two-level atoms.

    Ladder convention: <j, m+1| J+ |j, m> = sqrt(j(j+1) - m(m+1)).
    """
    n = _check_atom_count(atom_count)
    j = n / 2.0
    m = np.arange(-j, j + 1)  # ascending
    # J+ raises m by one: nonzero on the first lower subdiagonal in ascending order
    off = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.diag(off, -1).astype(complex)
    jminus = jplus.conj().T.copy()
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    jz = np.diag(m).astype(complex)
    return SpinOperatorSet(
        atom_count=n,
        j=j,
        jx=_readonly(jx),
        jy=_readonly(jy),
        jz=_readonly(jz),
        jplus=_readonly(jplus),
        jminus=_readonly(jminus),
        basis_order=_readonly(m),
    )


def coherent_state_down(atom_count) -> QuantumState:
    """The coherent spin state at the south pole, |j, m = -j>.

    This is the first basis vector in ascending-m order; it has isotropic
    transverse variance N/4 and therefore unit squeezing factor.
    """
    n = _check_atom_count(atom_count)
    amp = np.zeros(n + 1, dtype=complex)
    amp[0] = 1.0
    return QuantumState(amp, BasisSpec(spin_dim=n + 1))


def parity_operator(ops: SpinOperatorSet) -> np.ndarray:
    """Spin parity P = exp(i pi (Jz + j)): diagonal with entries (-1)^(m+j)."""
    exponent = np.rint(ops.basis_order + ops.j).astype(int)
    return _readonly(np.diag((-1.0 + 0j) ** exponent))
