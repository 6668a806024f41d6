"""Finite-outcome observables (normalized effect-valued measures).

An observable with outcomes ``x_1 < ... < x_k`` is stored as one effect per
outcome; the effect of a subset ``E`` of outcomes is the sum of the atoms
whose label lies in ``E``.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import effects
from ._config import TOL
from .effects import HILBERT, Effect, State
from .errors import (
    BackendMismatch,
    DimMismatch,
    DuplicateLabel,
    InputError,
    InvalidEffect,
    NotNormalized,
    PartialFunction,
)


class Observable:
    """Labels in strictly increasing order and one atom per label.

    ``atoms`` is a read-only stacked array: ``(k, d, d)`` for the Hilbert
    backend, ``(k, n)`` for tribes.
    """

    __slots__ = ("labels", "atoms", "backend")

    def __init__(self, labels: tuple[float, ...], atoms: np.ndarray, backend: str):
        atoms = np.array(atoms, copy=True)
        atoms.setflags(write=False)
        object.__setattr__(self, "labels", tuple(float(x) for x in labels))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("Observable is immutable")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def effect_shape(self) -> tuple[int, ...]:
        return self.atoms.shape[1:]

    def atom(self, i: int) -> Effect:
        return Effect(self.backend, self.atoms[i], _trusted=True)

    def effects(self) -> list[Effect]:
        return [self.atom(i) for i in range(len(self))]

    def __call__(self, outcomes: Iterable[float]) -> Effect:
        """Effect of a set of outcome labels."""
        wanted = {float(x) for x in outcomes}
        idx = [i for i, x in enumerate(self.labels) if x in wanted]
        data = self.atoms[idx].sum(axis=0) if idx else np.zeros(self.effect_shape, self.atoms.dtype)
        return Effect(self.backend, data, _trusted=True)

    def __repr__(self) -> str:
        return f"Observable({self.backend}, labels={list(self.labels)})"


def _identity_payload(backend: str, shape: tuple[int, ...]) -> np.ndarray:
    return np.eye(shape[0], dtype=complex) if backend == HILBERT else np.ones(shape)


def make_observable(labels: Sequence[float], atoms: Sequence, backend: str | None = None) -> Observable:
    """Validate and canonicalize an observable.

    ``atoms`` may be :class:`Effect` instances or raw arrays; for raw arrays
    the backend defaults to ``hilbert`` for matrices and ``tribe`` for vectors.
    Atoms are reordered so that labels increase.
    """
    if len(labels) != len(atoms) or len(labels) == 0:
        raise DimMismatch("need one atom per label and at least one label")
    labels = [float(x) for x in labels]
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"labels must be distinct: {labels}")

    payloads = []
    for a in atoms:
        if isinstance(a, Effect):
            if backend is not None and a.backend != backend:
                raise BackendMismatch(f"atom backend {a.backend} differs from {backend}")
            backend = a.backend
            payloads.append(a.data)
        else:
            arr = np.asarray(a)
            kind = backend or (HILBERT if arr.ndim == 2 else effects.TRIBE)
            backend = kind
            try:
                payloads.append(Effect(kind, arr).data)
            except InputError as exc:
                raise InvalidEffect(f"atom for label {labels[len(payloads)]}: {exc}") from exc
    shapes = {p.shape for p in payloads}
    if len(shapes) != 1:
        raise DimMismatch(f"atoms have different shapes: {sorted(shapes)}")

    order = sorted(range(len(labels)), key=labels.__getitem__)
    stack = np.stack([payloads[i] for i in order])
    total = stack.sum(axis=0)
    defect = float(np.max(np.abs(total - _identity_payload(backend, stack.shape[1:]))))
    if defect > TOL.eq:
        raise NotNormalized(f"atoms sum to the unit only up to {defect:.3e}")
    return Observable(tuple(labels[i] for i in order), stack, backend)


def two_valued(a: Effect) -> Observable:
    """The 1-0 observable of ``a``: outcome 1 has effect ``a``, outcome 0 has ``a'``."""
    comp = effects.orthosupplement(a)
    return Observable((0.0, 1.0), np.stack([comp.data, a.data]), a.backend)


def trivial(backend: str, dim: int, label: float = 0.0) -> Observable:
    unit = effects.one(backend, dim)
    return Observable((float(label),), unit.data[None], backend)


def _as_callable(f) -> Callable[[float], float]:
    if isinstance(f, Mapping):
        table = {float(k): v for k, v in f.items()}

        def lookup(x):
            try:
                return table[x]
            except KeyError:
                raise PartialFunction(f"map is undefined at label {x}") from None

        return lookup
    return f


def pushforward(xi: Observable, f, codomain: Sequence[float] | None = None) -> Observable:
    """Image observable ``f(xi)``: outcome ``y`` gets the sum of atoms with ``f(x) = y``.

    ``f`` is a mapping or a callable on labels. When ``codomain`` is given the
    result carries exactly those labels, with zero atoms where nothing maps.
    """
    g = _as_callable(f)
    images = []
    for x in xi.labels:
        try:
            y = g(x)
        except (KeyError, IndexError) as exc:
            raise PartialFunction(f"map is undefined at label {x}") from exc
        if y is None:
            raise PartialFunction(f"map is undefined at label {x}")
        images.append(float(y))
    targets = sorted(set(images)) if codomain is None else sorted({float(y) for y in codomain})
    index = {y: j for j, y in enumerate(targets)}
    if len(index) != len(targets):
        raise DuplicateLabel("codomain labels must be distinct")
    out = np.zeros((len(targets),) + xi.effect_shape, dtype=xi.atoms.dtype)
    for i, y in enumerate(images):
        if y not in index:
            raise PartialFunction(f"image {y} of label {xi.labels[i]} is not in the codomain")
        out[index[y]] += xi.atoms[i]
    return Observable(tuple(targets), out, xi.backend)


def _check_state(m: State, xi: Observable) -> None:
    if m.backend != xi.backend:
        raise BackendMismatch(f"state is {m.backend}, observable is {xi.backend}")
    if m.data.shape != xi.effect_shape:
        raise DimMismatch(f"state shape {m.data.shape} vs atom shape {xi.effect_shape}")


def distribution(xi: Observable, m: State) -> np.ndarray:
    """Outcome probabilities ``(m(xi(x_1)), ..., m(xi(x_k)))``."""
    _check_state(m, xi)
    if xi.backend == HILBERT:
        p = np.real(np.einsum("ij,kji->k", m.data, xi.atoms))
    else:
        p = np.array([effects.tribe_integral(a, m.data) for a in xi.atoms])
    return np.clip(p, 0.0, 1.0)


class DistributionMap:
    """The map sending a state to the outcome distribution of ``xi``."""

    def __init__(self, xi: Observable):
        self.xi = xi

    def __call__(self, m: State) -> np.ndarray:
        return distribution(self.xi, m)


def mean_value(m: State, xi: Observable) -> float:
    p = distribution(xi, m)
    return float(np.dot(np.asarray(xi.labels), p))


def spectrum(xi: Observable) -> list[float]:
    """Labels whose atom is not the zero element."""
    return [x for x, a in zip(xi.labels, xi.atoms) if np.max(np.abs(a)) > TOL.eq]


def is_sharp_observable(xi: Observable) -> bool:
    return all(effects.is_sharp(a) for a in xi.effects())


def equal(xi: Observable, eta: Observable, tol: float | None = None) -> bool:
    """Same labels and atoms agreeing within ``tol`` in sup norm."""
    tol = TOL.eq if tol is None else tol
    if xi.backend != eta.backend or xi.atoms.shape != eta.atoms.shape:
        return False
    if not np.allclose(xi.labels, eta.labels, rtol=0, atol=0):
        return False
    return float(np.max(np.abs(xi.atoms - eta.atoms))) <= tol
