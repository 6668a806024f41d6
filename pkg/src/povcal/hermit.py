"""Dense Hermitian matrix core.

Eigendecomposition, Loewner order, commutation tests and simultaneous
diagonalization of commuting Hermitian matrices. Matrices are plain
``numpy`` arrays; nothing here mutates its inputs.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from ._config import TOL
from .errors import (
    DegeneracyResolutionFailed,
    DimMismatch,
    InputError,
    NonHermitian,
    NotCommuting,
)


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.vectors
        return (u * self.eigenvalues) @ u.conj().T


def sup_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite square complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimMismatch(f"expected a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def hermiticity_defect(a) -> float:
    a = np.asarray(a)
    return sup_norm(a - a.conj().T)


def is_hermitian(a, tol: float | None = None) -> bool:
    tol = TOL.herm if tol is None else tol
    return hermiticity_defect(a) <= tol


def check_hermitian(a) -> np.ndarray:
    """Validate and symmetrize; exactly Hermitian input comes back bit-identical."""
    m = as_matrix(a)
    defect = hermiticity_defect(m)
    if defect > TOL.herm:
        raise NonHermitian(f"hermiticity defect {defect:.3e} exceeds {TOL.herm:.1e}")
    return (m + m.conj().T) / 2


def _same_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")


def eig_h(a) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = check_hermitian(a)
    w, u = np.linalg.eigh(m)
    return EigenDecomposition(w, u)


def eigvals_h(a) -> np.ndarray:
    return np.linalg.eigvalsh(check_hermitian(a))


def loewner_leq(a, b) -> bool:
    """``a <= b`` in the Loewner order, i.e. ``b - a`` is positive semidefinite."""
    a, b = as_matrix(a), as_matrix(b)
    _same_dims(a, b)
    return bool(eigvals_h(b - a)[0] >= -TOL.psd)


def commutator(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    return a @ b - b @ a


def commutes(a, b) -> bool:
    a, b = as_matrix(a), as_matrix(b)
    _same_dims(a, b)
    return sup_norm(commutator(a, b)) <= TOL.comm


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split sorted ``values`` wherever consecutive entries differ by more than ``gap``."""
    breaks = np.flatnonzero(np.diff(values) > gap) + 1
    return np.split(np.arange(len(values)), breaks)


def _refine(basis: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    if not ops or basis.shape[1] == 1:
        return basis
    head, rest = ops[0], ops[1:]
    compressed = basis.conj().T @ head @ basis
    w, v = np.linalg.eigh((compressed + compressed.conj().T) / 2)
    rotated = basis @ v
    blocks = [_refine(rotated[:, idx], rest) for idx in _clusters(w, TOL.cluster)]
    return np.hstack(blocks)


def _canonical_columns(u: np.ndarray) -> np.ndarray:
    """Order columns by their dominant coordinate and make that coordinate real positive."""
    weight = np.abs(u) ** 2
    lead = np.argmax(weight > 0.5 / u.shape[0], axis=0)
    order = np.argsort(lead, kind="stable")
    u = u[:, order]
    top = u[np.argmax(np.abs(u), axis=0), np.arange(u.shape[1])]
    return u * (np.abs(top) / top)


def simultaneous_eigenbasis(effects: Sequence) -> tuple[np.ndarray, list[np.ndarray]]:
    """Common eigenbasis of pairwise commuting Hermitian matrices.

    The first matrix is diagonalized, its spectrum is grouped into eigenspaces
    and every later matrix is compressed to each eigenspace and diagonalized
    there, recursively. No random linear combinations are used, so the result
    is reproducible bit for bit. Columns are ordered by their dominant
    coordinate, so diagonal input yields the identity.

    Returns the unitary ``U`` (columns are the joint eigenvectors) and, for
    each input, the vector of its eigenvalues along those columns.
    """
    if len(effects) == 0:
        raise InputError("need at least one matrix")
    mats = [check_hermitian(e) for e in effects]
    for m in mats[1:]:
        _same_dims(mats[0], m)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not commutes(mats[i], mats[j]):
                raise NotCommuting(f"matrices {i} and {j} do not commute")

    d = mats[0].shape[0]
    u = _canonical_columns(_refine(np.eye(d, dtype=complex), mats))
    values = []
    for m in mats:
        rotated = u.conj().T @ m @ u
        diag = np.real(np.diag(rotated))
        if sup_norm(rotated - np.diag(diag)) > TOL.simdiag:
            raise DegeneracyResolutionFailed(
                f"off-diagonal residue {sup_norm(rotated - np.diag(diag)):.3e}"
            )
        values.append(diag)
    return u, values
