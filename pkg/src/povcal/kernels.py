"""Markov kernels between finite outcome spaces.

A kernel from ``k`` to ``l`` outcomes is a ``k x l`` row-stochastic matrix.
Row ``i`` is the distribution over targets given source outcome ``i``; rows
follow the canonical (sorted-label) atom order of the source observable.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ._config import TOL
from .errors import DimMismatch, InputError, InvalidKernel, MaskViolation, PartialFunction
from .observables import Observable, make_observable

_ENTRY_SLACK = 1e-12


def _rows(matrix, mask=None) -> np.ndarray:
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise InvalidKernel(f"kernel must be a nonempty matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidKernel("kernel has non-finite entries")
    rows = np.arange(m.shape[0]) if mask is None else np.flatnonzero(mask)
    sub = m[rows]
    if sub.size and sub.min() < -_ENTRY_SLACK:
        raise InvalidKernel(f"negative kernel entry {sub.min():.3e}")
    sums = sub.sum(axis=1)
    bad = np.abs(sums - 1) > TOL.row_sum
    if np.any(bad):
        i = rows[np.argmax(bad)]
        raise InvalidKernel(f"row {i} sums to {m[i].sum()!r}")
    sub = np.clip(sub, 0.0, 1.0)
    m[rows] = sub / sub.sum(axis=1, keepdims=True)
    return m


class MarkovKernel:
    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = _rows(matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("MarkovKernel is immutable")

    @property
    def source_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def target_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def is_deterministic(self, tol: float | None = None) -> bool:
        tol = TOL.eq if tol is None else tol
        m = self.matrix
        return bool(np.all(np.minimum(m, 1 - m) <= tol))

    def __repr__(self) -> str:
        return f"MarkovKernel({self.matrix.tolist()})"

    @classmethod
    def identity(cls, k: int) -> "MarkovKernel":
        return cls(np.eye(k))

    @classmethod
    def constant(cls, k: int) -> "MarkovKernel":
        """Every source outcome goes to a single target outcome."""
        return cls(np.ones((k, 1)))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "MarkovKernel":
        """Source ``i`` goes to target ``perm[i]``."""
        k = len(perm)
        m = np.zeros((k, k))
        m[np.arange(k), list(perm)] = 1.0
        return cls(m)


class WeakMarkovKernel:
    """A kernel whose rows are only required to be distributions on ``support_mask``."""

    __slots__ = ("matrix", "support_mask")

    def __init__(self, matrix, support_mask):
        mask = np.array(support_mask, dtype=bool)
        m = np.array(matrix, dtype=float)
        if mask.shape != (m.shape[0],):
            raise DimMismatch(f"mask of shape {mask.shape} for {m.shape[0]} rows")
        m = _rows(m, mask)
        m.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "support_mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("WeakMarkovKernel is immutable")

    @property
    def source_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def target_size(self) -> int:
        return self.matrix.shape[1]

    def __repr__(self) -> str:
        return f"WeakMarkovKernel({self.matrix.tolist()}, mask={self.support_mask.tolist()})"


class ProductMeasure:
    """Joint law ``P x nu`` of a source draw and its kernel image."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("ProductMeasure is immutable")

    @property
    def source_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def target_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def _as_kernel(nu) -> MarkovKernel | WeakMarkovKernel:
    if isinstance(nu, (MarkovKernel, WeakMarkovKernel)):
        return nu
    return MarkovKernel(nu)


def _as_probability(p, size: int | None = None) -> np.ndarray:
    v = np.asarray(p, dtype=float)
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise InputError("probability vector must be a finite 1-d array")
    if size is not None and v.size != size:
        raise DimMismatch(f"vector of length {v.size}, expected {size}")
    if v.size and v.min() < -1e-12:
        raise InputError("probability vector has negative entries")
    if abs(v.sum() - 1) > 1e-9:
        raise InputError(f"probability vector sums to {v.sum()!r}")
    return np.clip(v, 0.0, None)


def compose(nu1, nu2) -> MarkovKernel:
    """``nu1`` followed by ``nu2`` (the matrix product)."""
    a, b = _as_kernel(nu1), _as_kernel(nu2)
    if a.target_size != b.source_size:
        raise DimMismatch(f"cannot compose {a.matrix.shape} with {b.matrix.shape}")
    return MarkovKernel(a.matrix @ b.matrix)


def deterministic_kernel(f, source: Sequence, target: Sequence | None = None) -> MarkovKernel:
    """0-1 kernel of a function between label sets.

    ``f`` is a mapping or callable on source labels. ``target`` defaults to
    the sorted image of ``f``.
    """
    if isinstance(f, Mapping):
        table = dict(f)

        def g(x):
            if x not in table:
                raise PartialFunction(f"map is undefined at {x!r}")
            return table[x]
    else:
        g = f
    images = [g(x) for x in source]
    if target is None:
        target = sorted(set(images))
    column = {y: j for j, y in enumerate(target)}
    m = np.zeros((len(source), len(target)))
    for i, y in enumerate(images):
        if y not in column:
            raise PartialFunction(f"image {y!r} of {source[i]!r} is not a target label")
        m[i, column[y]] = 1.0
    return MarkovKernel(m)


def smear(xi: Observable, nu, labels: Sequence[float] | None = None) -> Observable:
    """The smeared observable ``eta(y_j) = sum_i nu_ij xi(x_i)``."""
    k = _as_kernel(nu)
    if k.source_size != len(xi):
        raise DimMismatch(f"kernel has {k.source_size} rows, observable has {len(xi)} atoms")
    if labels is None:
        labels = range(k.target_size)
    labels = [float(y) for y in labels]
    if len(labels) != k.target_size:
        raise DimMismatch(f"{len(labels)} labels for {k.target_size} kernel columns")
    atoms = np.tensordot(k.matrix.T, xi.atoms, axes=1)
    return make_observable(labels, list(atoms), backend=xi.backend)


def apply_to_measure(nu, p) -> np.ndarray:
    """Image measure ``p nu``."""
    k = _as_kernel(nu)
    v = _as_probability(p, k.source_size)
    if isinstance(k, WeakMarkovKernel) and np.any(v[~k.support_mask] > 0):
        raise MaskViolation("measure charges rows outside the kernel's support mask")
    if isinstance(k, WeakMarkovKernel):
        return v[k.support_mask] @ k.matrix[k.support_mask]
    return v @ k.matrix


def reverse_kernel(nu, p) -> WeakMarkovKernel:
    """Bayes posterior kernel from targets back to sources.

    On the support of ``p nu`` row ``j`` is ``p_i nu_ij / (p nu)_j``; rows off
    the support are left as zeros and excluded by the mask.
    """
    k = _as_kernel(nu)
    v = _as_probability(p, k.source_size)
    joint = v[:, None] * k.matrix
    image = joint.sum(axis=0)
    mask = image > 0
    rev = np.zeros((k.target_size, k.source_size))
    rev[mask] = joint[:, mask].T / image[mask][:, None]
    return WeakMarkovKernel(rev, mask)


def product_measure(p, nu) -> ProductMeasure:
    k = _as_kernel(nu)
    v = _as_probability(p, k.source_size)
    return ProductMeasure(v[:, None] * k.matrix)
