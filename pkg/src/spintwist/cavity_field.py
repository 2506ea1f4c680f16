"""Truncated Fock-space ladder operators and tensor-product assembly.

Photon modes are truncated at a finite occupation n_max (dimension n_max + 1).
Truncation is visible, not hidden: [a, a†] equals the identity only on the
first n_max diagonal entries, while the (n_max, n_max) entry is -n_max.
Composite operators always use the factor order spin ⊗ mode a ⊗ mode b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .spin_algebra import _readonly


@dataclass(frozen=True)
class FockOperatorSet:
    """Annihilation/creation/number matrices for one mode, dim = cutoff + 1."""

    cutoff: int
    annihilate: np.ndarray
    create: np.ndarray
    number: np.ndarray
    vacuum: np.ndarray

    @property
    def dim(self) -> int:
        return self.cutoff + 1


def build_fock_ops(cutoff) -> FockOperatorSet:
    """Standard ladder matrices, <n-1| a |n> = sqrt(n), vacuum = (1, 0, ..., 0)."""
    if isinstance(cutoff, bool) or not isinstance(cutoff, (int, np.integer)):
        raise TypeError(f"cutoff must be an integer, got {cutoff!r}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    d = int(cutoff) + 1
    annihilate = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
    create = annihilate.conj().T.copy()
    number = create @ annihilate
    vacuum = np.zeros(d, dtype=complex)
    vacuum[0] = 1.0
    return FockOperatorSet(
        cutoff=int(cutoff),
        annihilate=_readonly(annihilate),
        create=_readonly(create),
        number=_readonly(number),
        vacuum=_readonly(vacuum),
    )


def kron_chain(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def tensor_assemble(
    dims: Sequence[int],
    terms: Sequence[tuple[complex, Mapping[int, np.ndarray]]],
) -> np.ndarray:
    """Sum of Kronecker-product terms on a declared factor list.

    ``dims`` are the factor dimensions in order (spin first, then modes).
    Each term is ``(coefficient, placements)`` where ``placements`` maps a
    factor index to the operator acting there; omitted factors get the
    identity.  Raises on any dimension mismatch.
    """
    dims = [int(d) for d in dims]
    total = 1
    for d in dims:
        total *= d
    out = np.zeros((total, total), dtype=complex)
    eyes = [np.eye(d, dtype=complex) for d in dims]
    for coeff, placements in terms:
        factors = list(eyes)
        for idx, op in placements.items():
            if idx < 0 or idx >= len(dims):
                raise ValueError(f"placement index {idx} outside factor list of length {len(dims)}")
            op = np.asarray(op)
            if op.shape != (dims[idx], dims[idx]):
                raise ValueError(
                    f"operator of shape {op.shape} placed on factor {idx} "
                    f"of dimension {dims[idx]}"
                )
            factors[idx] = op
        out += coeff * kron_chain(factors)
    return out
