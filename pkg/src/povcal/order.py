"""The smearing preorder on observables and what can be decided about it.

``xi <= eta`` (``eta`` is a noisy version of ``xi``) when some Markov kernel
``nu`` gives ``eta(y_j) = sum_i nu_ij xi(x_i)`` as operator identities. For
finite observables this is a linear feasibility question in the entries of
``nu``, decided here with :mod:`povcal.lp`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import effects, hermit
from ._config import TOL
from .effects import HILBERT, Effect
from .errors import BackendMismatch, DimMismatch, NotASmearing, NotDeterministicKernel
from .kernels import MarkovKernel
from .lp import FeasibilityProblem, solve_feasibility
from .observables import Observable, make_observable, pushforward


def real_coordinates(payload: np.ndarray) -> np.ndarray:
    """Minimal real encoding of Hermitian matrices (or tribe vectors).

    A ``d x d`` Hermitian matrix becomes ``d`` diagonal entries, then the real
    and imaginary parts of the strict upper triangle: ``d**2`` numbers. Works
    on stacks along the leading axis.
    """
    payload = np.asarray(payload)
    if payload.ndim >= 2 and payload.shape[-1] == payload.shape[-2] and np.iscomplexobj(payload):
        d = payload.shape[-1]
        iu = np.triu_indices(d, 1)
        diag = np.real(np.diagonal(payload, axis1=-2, axis2=-1))
        upper = payload[..., iu[0], iu[1]]
        return np.concatenate([diag, upper.real, upper.imag], axis=-1)
    return np.asarray(payload, dtype=float)


@dataclass(frozen=True)
class PreorderWitness:
    holds: bool
    witness: MarkovKernel | None
    residual: float | None

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def __bool__(self) -> bool:
        return self.holds


def _same_space(xi: Observable, eta: Observable) -> None:
    if xi.backend != eta.backend:
        raise BackendMismatch(f"{xi.backend} vs {eta.backend}")
    if xi.effect_shape != eta.effect_shape:
        raise DimMismatch(f"atom shapes {xi.effect_shape} and {eta.effect_shape}")


def smearing_residual(xi: Observable, nu, eta: Observable) -> float:
    """Sup-norm defect of ``sum_i nu_ij xi(x_i)`` against ``eta(y_j)``."""
    m = nu.matrix if isinstance(nu, MarkovKernel) else np.asarray(nu, dtype=float)
    if m.shape != (len(xi), len(eta)):
        raise DimMismatch(f"kernel shape {m.shape} for {len(xi)} -> {len(eta)} outcomes")
    rebuilt = np.tensordot(m.T, xi.atoms, axes=1)
    return hermit.sup_norm(rebuilt - eta.atoms)


def preorder_problem(xi: Observable, eta: Observable) -> FeasibilityProblem:
    """Feasibility problem whose solutions are the kernels smearing ``xi`` into ``eta``.

    Variable ``i * l + j`` is ``nu[i, j]``.
    """
    _same_space(xi, eta)
    k, l = len(xi), len(eta)
    src = real_coordinates(xi.atoms)
    dst = real_coordinates(eta.atoms)
    r = src.shape[1]
    a = np.zeros((l * r, k * l))
    for j in range(l):
        a[j * r : (j + 1) * r, j::l] = src.T
    groups = [list(range(i * l, (i + 1) * l)) for i in range(k)]
    return FeasibilityProblem(a, dst.reshape(-1), groups)


def preorder_leq(xi: Observable, eta: Observable) -> PreorderWitness:
    """Decide ``xi <= eta`` and return a witness kernel when it holds."""
    x = solve_feasibility(preorder_problem(xi, eta))
    if x is None:
        return PreorderWitness(False, None, None)
    rows = x.reshape(len(xi), len(eta))
    rows = rows / rows.sum(axis=1, keepdims=True)
    nu = MarkovKernel(rows)
    residual = smearing_residual(xi, nu, eta)
    return PreorderWitness(residual <= TOL.feas, nu, residual)


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    forward: PreorderWitness
    backward: PreorderWitness

    def __bool__(self) -> bool:
        return self.equivalent


def fuzzy_equivalent(xi: Observable, eta: Observable) -> Equivalence:
    """``xi <= eta`` and ``eta <= xi``, with both witnesses."""
    fwd = preorder_leq(xi, eta)
    bwd = preorder_leq(eta, xi)
    return Equivalence(fwd.holds and bwd.holds, fwd, bwd)


def _require_hilbert(xi: Observable) -> None:
    if xi.backend != HILBERT:
        raise BackendMismatch("operation is defined for Hilbert-space observables only")


def rank_one_refinement(eta: Observable) -> tuple[Observable, dict[float, float]]:
    """Split every atom spectrally into rank-one effects.

    Atom ``A_i = sum_j a_ij P_ij`` contributes the effects ``a_ij P_ij`` for
    its nonzero eigenvalues. The refinement gets labels ``0, 1, 2, ...`` in
    that order and the returned map sends each new label to the label of the
    atom it came from, so ``pushforward(refinement, map)`` recovers ``eta``.
    """
    _require_hilbert(eta)
    pieces = []
    parent = []
    for alpha, atom in zip(eta.labels, eta.atoms):
        w, u = np.linalg.eigh(atom)
        for lam, v in zip(w, u.T):
            if lam > TOL.rank:
                pieces.append(lam * np.outer(v, v.conj()))
                parent.append(alpha)
    labels = [float(b) for b in range(len(pieces))]
    xi = make_observable(labels, pieces, backend=HILBERT)
    return xi, dict(zip(labels, parent))


def atom_ranks(eta: Observable) -> list[int]:
    _require_hilbert(eta)
    return [int(np.sum(np.linalg.eigvalsh(a) > TOL.rank)) for a in eta.atoms]


def is_clean(eta: Observable) -> bool:
    """Every nonzero atom has rank one."""
    return all(r <= 1 for r in atom_ranks(eta))


@dataclass(frozen=True)
class CleanEvidence:
    clean: bool
    refinement: Observable
    label_map: dict[float, float]
    refinement_below: PreorderWitness
    eta_below: PreorderWitness

    @property
    def strictly_refined(self) -> bool:
        """The refinement lies strictly below ``eta`` in the preorder."""
        return self.refinement_below.holds and not self.eta_below.holds


def clean_witness(eta: Observable) -> CleanEvidence:
    """Rank verdict plus LP evidence on the rank-one refinement.

    ``refinement_below`` decides ``refinement <= eta``; ``eta_below``
    decides ``eta <= refinement``. For a clean ``eta`` both hold; otherwise
    the refinement is expected to be strictly finer.
    """
    xi, f = rank_one_refinement(eta)
    return CleanEvidence(is_clean(eta), xi, f, preorder_leq(xi, eta), preorder_leq(eta, xi))


def _effect_pair(b: Effect, a: Effect) -> None:
    if b.backend != HILBERT or a.backend != HILBERT:
        raise BackendMismatch("1-0 observables are compared on the Hilbert backend")
    if b.shape != a.shape:
        raise DimMismatch(f"shapes {b.shape} and {a.shape}")


def two_valued_coefficients(b: Effect, a: Effect) -> tuple[float, float] | None:
    """``(t, s)`` in ``[0, 1]^2`` with ``A = t B + s B'``, or ``None``.

    Such a pair exists exactly when the 1-0 observable of ``a`` is a
    smearing of the one of ``b``.
    """
    _effect_pair(b, a)
    bc = effects.orthosupplement(b)
    basis = np.stack([real_coordinates(b.data), real_coordinates(bc.data)], axis=1)
    target = real_coordinates(a.data)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)

    def defect(t, s):
        return hermit.sup_norm(a.data - t * b.data - s * bc.data)

    if defect(*coef) > TOL.eq:
        return None
    lo, hi = -TOL.eq, 1 + TOL.eq
    if lo <= coef[0] <= hi and lo <= coef[1] <= hi:
        t, s = (float(np.clip(c, 0.0, 1.0)) for c in coef)
        if defect(t, s) <= TOL.eq:
            return t, s
    # B and B' are linearly dependent (B a multiple of I) or the unique
    # solution sits outside the box: search the box directly
    m = basis.shape[0]
    a_eq = np.zeros((m, 4))
    a_eq[:, :2] = basis
    x = solve_feasibility(FeasibilityProblem(a_eq, target, [[0, 2], [1, 3]]))
    if x is None:
        return None
    t, s = float(x[0]), float(x[1])
    return (t, s) if defect(t, s) <= TOL.feas else None


def two_valued_leq(b: Effect, a: Effect) -> bool:
    """Whether the 1-0 observable of ``b`` is below that of ``a``."""
    return two_valued_coefficients(b, a) is not None


def two_valued_is_minimal(a: Effect) -> bool:
    """Minimal among 1-0 observables iff ``||A|| = ||A'|| = 1``."""
    if a.backend != HILBERT:
        raise BackendMismatch("defined on the Hilbert backend")
    w = np.linalg.eigvalsh(a.data)
    return bool(abs(w[-1] - 1) <= TOL.eq and abs(w[0]) <= TOL.eq)


def pvm_mother(eta: Observable) -> tuple[Observable, MarkovKernel]:
    """Write an observable with commuting range as a smearing of a sharp one.

    The atoms are diagonalized in a common basis; basis vectors with the same
    tuple of eigenvalues are grouped into one projection. The kernel entry
    from group ``x`` to outcome ``y_j`` is the eigenvalue of ``eta(y_j)`` on
    that group. Raises :class:`~povcal.errors.NotCommuting` otherwise.
    """
    _require_hilbert(eta)
    u, values = hermit.simultaneous_eigenbasis(list(eta.atoms))
    table = np.array(values)  # (outcomes, d)
    groups: list[list[int]] = []
    for col in range(table.shape[1]):
        for g in groups:
            if np.max(np.abs(table[:, g[0]] - table[:, col])) <= TOL.cluster:
                g.append(col)
                break
        else:
            groups.append([col])
    # canonical order: by the first basis direction each projection occupies
    def position(g):
        weight = np.sum(np.abs(u[:, g]) ** 2, axis=1)
        return int(np.argmax(weight > 0.5 / len(weight))), tuple(np.round(table[:, g[0]], 9))

    groups.sort(key=position)
    projections = []
    rows = []
    for g in groups:
        vecs = u[:, g]
        projections.append(vecs @ vecs.conj().T)
        rows.append(np.clip(table[:, g].mean(axis=1), 0.0, 1.0))
    rows = np.array(rows)
    rows = rows / rows.sum(axis=1, keepdims=True)
    xi = make_observable([float(i) for i in range(len(groups))], projections, backend=HILBERT)
    return xi, MarkovKernel(rows)


def range_inclusion_check(xi: Observable, eta: Observable, nu) -> bool:
    """For a 0-1 kernel, confirm every ``eta`` atom is ``xi`` of a set of outcomes."""
    k = nu if isinstance(nu, MarkovKernel) else MarkovKernel(nu)
    if not k.is_deterministic():
        raise NotDeterministicKernel("kernel entries must be 0 or 1")
    _same_space(xi, eta)
    if smearing_residual(xi, k, eta) > TOL.eq:
        raise NotASmearing("eta is not the smearing of xi by this kernel")
    for j in range(len(eta)):
        chosen = [xi.labels[i] for i in range(len(xi)) if k.matrix[i, j] > 0.5]
        if hermit.sup_norm(xi(chosen).data - eta.atoms[j]) > TOL.eq:
            return False
    return True


def refinement_recovers(eta: Observable, xi: Observable, label_map: dict[float, float]) -> bool:
    """Check ``pushforward(xi, label_map) == eta`` up to zero atoms of ``eta``."""
    image = pushforward(xi, label_map, codomain=eta.labels)
    return hermit.sup_norm(image.atoms - eta.atoms) <= TOL.eq


__all__ = [
    "CleanEvidence",
    "Equivalence",
    "PreorderWitness",
    "atom_ranks",
    "clean_witness",
    "fuzzy_equivalent",
    "is_clean",
    "preorder_leq",
    "preorder_problem",
    "pvm_mother",
    "range_inclusion_check",
    "rank_one_refinement",
    "real_coordinates",
    "refinement_recovers",
    "smearing_residual",
    "two_valued_coefficients",
    "two_valued_is_minimal",
    "two_valued_leq",
]
