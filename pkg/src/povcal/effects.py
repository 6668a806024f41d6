"""Effect algebras with two concrete backends.

``hilbert``
    Effects on a finite-dimensional Hilbert space: Hermitian matrices ``A``
    with ``0 <= A <= I``. The partial sum is the matrix sum, defined when it
    stays below the identity.
``tribe``
    Fuzzy sets on a finite base set: vectors in ``[0, 1]^n`` with the
    pointwise sum, defined when no coordinate exceeds 1. With ``n = 1`` this
    is the unit interval.

States are density matrices (``hilbert``) or probability vectors on the
base set (``tribe``).
"""

from __future__ import annotations

import math

import numpy as np

from . import hermit
from ._config import TOL
from .errors import (
    BackendMismatch,
    DimMismatch,
    InputError,
    InvalidEffect,
    InvalidState,
    NotComparable,
)

HILBERT = "hilbert"
TRIBE = "tribe"
BACKENDS = (HILBERT, TRIBE)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _clamp_spectrum(m: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Clamp eigenvalues of Hermitian ``m`` into ``[lo, hi]``; leave ``m`` untouched when already inside."""
    w, u = np.linalg.eigh(m)
    if w[0] >= lo and w[-1] <= hi:
        return m
    w = np.clip(w, lo, hi)
    out = (u * w) @ u.conj().T
    return (out + out.conj().T) / 2


class Effect:
    """An element of one of the two effect algebras. Immutable."""

    __slots__ = ("backend", "data")

    def __init__(self, backend: str, data, *, _trusted: bool = False):
        if backend not in BACKENDS:
            raise InputError(f"unknown backend {backend!r}")
        if not _trusted:
            data = _validate_effect(backend, data)
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "data", _frozen(data))

    def __setattr__(self, name, value):
        raise AttributeError("Effect is immutable")

    @classmethod
    def hilbert(cls, matrix) -> "Effect":
        return cls(HILBERT, matrix)

    @classmethod
    def tribe(cls, values) -> "Effect":
        return cls(TRIBE, values)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def zero(self) -> "Effect":
        return zero_like(self)

    def one(self) -> "Effect":
        return one_like(self)

    def __repr__(self) -> str:
        return f"Effect({self.backend!r}, {np.array2string(self.data, precision=4)})"


def _validate_effect(backend: str, data) -> np.ndarray:
    if backend == HILBERT:
        try:
            m = hermit.check_hermitian(data)
        except InputError as exc:
            raise InvalidEffect(str(exc)) from exc
        w = np.linalg.eigvalsh(m)
        if w[0] < -TOL.psd or w[-1] > 1 + TOL.psd:
            raise InvalidEffect(
                f"spectrum [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]"
            )
        return _clamp_spectrum(m, 0.0, 1.0)
    v = np.asarray(data, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidEffect(f"tribe element must be a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidEffect("tribe element has non-finite entries")
    if v.min() < -TOL.psd or v.max() > 1 + TOL.psd:
        raise InvalidEffect("tribe element has coordinates outside [0, 1]")
    return np.clip(v, 0.0, 1.0)


def zero_like(a: Effect) -> Effect:
    return Effect(a.backend, np.zeros_like(a.data), _trusted=True)


def one_like(a: Effect) -> Effect:
    if a.backend == HILBERT:
        return Effect(HILBERT, np.eye(a.dim, dtype=complex), _trusted=True)
    return Effect(TRIBE, np.ones_like(a.data), _trusted=True)


def zero(backend: str, dim: int) -> Effect:
    if backend == HILBERT:
        return Effect(HILBERT, np.zeros((dim, dim), dtype=complex), _trusted=True)
    return Effect(TRIBE, np.zeros(dim), _trusted=True)


def one(backend: str, dim: int) -> Effect:
    return one_like(zero(backend, dim))


def _compatible(a: Effect, b: Effect) -> None:
    if a.backend != b.backend:
        raise BackendMismatch(f"{a.backend} vs {b.backend}")
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")


def _below_one(backend: str, data: np.ndarray) -> bool:
    if backend == HILBERT:
        return bool(np.linalg.eigvalsh(np.eye(len(data)) - data)[0] >= -TOL.psd)
    return bool(np.all(data <= 1 + TOL.psd))


def oplus(a: Effect, b: Effect) -> Effect | None:
    """Partial sum ``a + b``; ``None`` when the sum leaves the algebra."""
    _compatible(a, b)
    s = a.data + b.data
    if not _below_one(a.backend, s):
        return None
    return Effect(a.backend, s)


def orthosupplement(a: Effect) -> Effect:
    """The unique ``a'`` with ``a + a' = 1``."""
    return Effect(a.backend, one_like(a).data - a.data, _trusted=True)


def partial_order_leq(a: Effect, b: Effect) -> bool:
    _compatible(a, b)
    if a.backend == HILBERT:
        return hermit.loewner_leq(a.data, b.data)
    return bool(np.all(a.data <= b.data + TOL.psd))


def ominus(b: Effect, a: Effect) -> Effect:
    """``b - a`` for ``a <= b``."""
    if not partial_order_leq(a, b):
        raise NotComparable("ominus needs a <= b")
    return Effect(a.backend, b.data - a.data)


def equal(a: Effect, b: Effect, tol: float | None = None) -> bool:
    _compatible(a, b)
    tol = TOL.eq if tol is None else tol
    return hermit.sup_norm(a.data - b.data) <= tol


def is_sharp(a: Effect) -> bool:
    """Projections (``hilbert``) or characteristic functions (``tribe``)."""
    if a.backend == HILBERT:
        return hermit.sup_norm(a.data @ a.data - a.data) <= TOL.eq
    v = a.data
    return bool(np.all(np.minimum(np.abs(v), np.abs(v - 1)) <= TOL.eq))


def norm(a: Effect) -> float:
    """Operator norm (``hilbert``) or sup norm (``tribe``)."""
    if a.backend == HILBERT:
        return float(max(np.linalg.eigvalsh(a.data)[-1], 0.0))
    return float(a.data.max())


def isotropic_index(a: Effect) -> int | float:
    """Largest ``n`` such that the ``n``-fold sum ``a + ... + a`` exists.

    Returns ``math.inf`` for the zero element.
    """
    r = norm(a)
    if r <= 0.0:
        return math.inf
    n = max(int(math.floor(1.0 / r)), 1)
    while (n + 1) * r <= 1 + TOL.psd:
        n += 1
    while n > 1 and n * r > 1 + TOL.psd:
        n -= 1
    return n


class State:
    """A density matrix (``hilbert``) or probability vector (``tribe``). Immutable."""

    __slots__ = ("backend", "data", "faithful")

    def __init__(self, backend: str, data):
        if backend not in BACKENDS:
            raise InputError(f"unknown backend {backend!r}")
        data, faithful = _validate_state(backend, data)
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "faithful", faithful)

    def __setattr__(self, name, value):
        raise AttributeError("State is immutable")

    @classmethod
    def density(cls, rho) -> "State":
        return cls(HILBERT, rho)

    @classmethod
    def probability(cls, p) -> "State":
        return cls(TRIBE, p)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "State":
        return cls(HILBERT, np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, vector) -> "State":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(HILBERT, np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __repr__(self) -> str:
        return f"State({self.backend!r}, faithful={self.faithful})"


def _validate_state(backend: str, data) -> tuple[np.ndarray, bool]:
    if backend == HILBERT:
        try:
            rho = hermit.check_hermitian(data)
        except InputError as exc:
            raise InvalidState(str(exc)) from exc
        w = np.linalg.eigvalsh(rho)
        if w[0] < -TOL.psd:
            raise InvalidState(f"density matrix has eigenvalue {w[0]:.3e} < 0")
        tr = float(np.trace(rho).real)
        if abs(tr - 1) > TOL.trace:
            raise InvalidState(f"trace {tr!r} is not 1")
        rho = _clamp_spectrum(rho, 0.0, np.inf)
        return rho, bool(w[0] > 1e-9)
    p = np.asarray(data, dtype=float)
    if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)):
        raise InvalidState("probability vector must be a finite nonempty vector")
    if p.min() < -TOL.psd:
        raise InvalidState("probability vector has negative weights")
    if abs(p.sum() - 1) > TOL.trace:
        raise InvalidState(f"weights sum to {p.sum()!r}, not 1")
    p = np.clip(p, 0.0, None)
    return p, bool(p.min() > 1e-9)


def _state_matches(m: State, a: Effect) -> None:
    if m.backend != a.backend:
        raise BackendMismatch(f"state is {m.backend}, effect is {a.backend}")
    if m.data.shape != a.data.shape:
        raise DimMismatch(f"state shape {m.data.shape} vs effect shape {a.data.shape}")


def tribe_integral(values, weights) -> float:
    """``sum_x f(x) P(x)`` accumulated left to right in index order."""
    total = 0.0
    for f, p in zip(values, weights):
        total += float(f) * float(p)
    return total


def evaluate(m: State, data: np.ndarray) -> float:
    """Unclamped ``m(a)`` for a raw effect payload; no validation."""
    if m.backend == HILBERT:
        return float(np.real(np.sum(m.data.T * data)))
    return tribe_integral(data, m.data)


def state_eval(m: State, a: Effect) -> float:
    """Probability ``m(a)``.

    For density matrices this is ``tr(rho A)`` clamped to ``[0, 1]``; for the
    tribe backend it is the finite integral of the fuzzy set, returned as is.
    """
    _state_matches(m, a)
    value = evaluate(m, a.data)
    if m.backend == HILBERT:
        return min(max(value, 0.0), 1.0)
    return value
