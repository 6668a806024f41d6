"""Sufficiency of Markov kernels for families of distributions.

Three views of "the kernel loses no information":

* pairwise: the Hellinger distance of every pair survives the kernel;
* against a dominating mixture: each member keeps its distance to the
  uniform mixture of the family;
* Blackwell: one recovery kernel maps every image back to its source.

:func:`equivalence_battery` evaluates all of them, together with the
operator-level fuzzy equivalence, for a pair of observables related by a
smearing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import divergences
from ._config import TOL
from .effects import HILBERT, State
from .errors import DimMismatch, EmptyFamily, NotASmearing, NotFaithful
from .kernels import MarkovKernel, WeakMarkovKernel, apply_to_measure
from .lp import FeasibilityProblem, solve_feasibility
from .observables import Observable, distribution
from .order import fuzzy_equivalent, smearing_residual

DEFAULT_SEED = 3405691582


def _kernel(nu) -> MarkovKernel:
    return nu if isinstance(nu, MarkovKernel) else MarkovKernel(nu)


def hellinger_gap(nu, p, q) -> float:
    """``|H(p, q) - H(p nu, q nu)|``."""
    k = _kernel(nu)
    before = divergences.hellinger(p, q)
    after = divergences.hellinger(apply_to_measure(k, p), apply_to_measure(k, q))
    return abs(before - after)


def pairwise_sufficient(nu, p, q) -> bool:
    """Sufficiency for ``{p, q}``, detected by an unchanged Hellinger distance."""
    return hellinger_gap(nu, p, q) <= TOL.suff


def _family(family: Sequence) -> np.ndarray:
    if len(family) == 0:
        raise EmptyFamily("family must contain at least one distribution")
    try:
        arr = np.array([np.asarray(p, dtype=float) for p in family])
    except ValueError as exc:
        raise DimMismatch("family members have different lengths") from exc
    if arr.ndim != 2:
        raise DimMismatch("family members have different lengths")
    return arr


def dominating_mixture(family: Sequence) -> np.ndarray:
    """Uniform mixture; it charges exactly the union of the members' supports."""
    return _family(family).mean(axis=0)


def sufficient_for_family(nu, family: Sequence) -> bool:
    """Every member is pairwise sufficient against the dominating mixture."""
    p0 = dominating_mixture(family)
    return all(pairwise_sufficient(nu, p, p0) for p in _family(family))


def blackwell_recovery(nu, family: Sequence) -> WeakMarkovKernel | None:
    """A kernel ``r`` with ``(p nu) r = p`` for every member ``p``, or ``None``.

    Rows of ``r`` are constrained only on the support of the image of the
    mixture; rows off that support are returned uniform.
    """
    k = _kernel(nu)
    fam = _family(family)
    if fam.shape[1] != k.source_size:
        raise DimMismatch(f"family over {fam.shape[1]} outcomes, kernel has {k.source_size} rows")
    images = fam @ k.matrix
    mask = images.max(axis=0) > 0
    support = np.flatnonzero(mask)
    n_src = k.source_size
    a = np.kron(images[:, support], np.eye(n_src))
    groups = [list(range(j * n_src, (j + 1) * n_src)) for j in range(len(support))]
    x = solve_feasibility(FeasibilityProblem(a, fam.reshape(-1), groups))
    if x is None:
        return None
    rev = np.full((k.target_size, n_src), 1.0 / n_src)
    rows = x.reshape(len(support), n_src)
    rev[support] = rows / rows.sum(axis=1, keepdims=True)
    return WeakMarkovKernel(rev, mask)


def blackwell_sufficient(nu, family: Sequence) -> bool:
    return blackwell_recovery(nu, family) is not None


def canonical_states(backend: str, dim: int) -> list[State]:
    """States whose linear span contains every state.

    Hilbert backend: ``I/d`` together with ``I/d + H/(2d)`` for ``H`` running
    through a traceless Hermitian basis (``d**2 - 1`` matrices with spectrum
    in ``[-1, 1]``), so every eigenvalue is at least ``1/(2d)``. Tribe
    backend: the point masses.
    """
    if backend != HILBERT:
        return [State.probability(np.eye(dim)[i]) for i in range(dim)]
    eye = np.eye(dim, dtype=complex)
    basis = []
    for k in range(dim - 1):
        h = np.zeros((dim, dim), dtype=complex)
        h[k, k], h[k + 1, k + 1] = 1.0, -1.0
        basis.append(h)
    for k in range(dim):
        for l in range(k + 1, dim):
            h = np.zeros((dim, dim), dtype=complex)
            h[k, l] = h[l, k] = 1.0
            basis.append(h)
            h = np.zeros((dim, dim), dtype=complex)
            h[k, l], h[l, k] = -1j, 1j
            basis.append(h)
    states = [State.density(eye / dim)]
    states += [State.density(eye / dim + h / (2 * dim)) for h in basis]
    return states


def random_states(backend: str, dim: int, n: int, rng: np.random.Generator) -> list[State]:
    """Alternating Hilbert-Schmidt mixed states and Haar pure states (Dirichlet on tribes)."""
    out = []
    for i in range(n):
        if backend != HILBERT:
            out.append(State.probability(rng.dirichlet(np.ones(dim))))
            continue
        if i % 2 == 0:
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            rho = g @ g.conj().T
            out.append(State.density(rho / np.trace(rho).real))
        else:
            v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            out.append(State.pure(v))
    return out


@dataclass(frozen=True)
class SufficiencyReport:
    """Verdicts for one smearing ``xi -> eta`` by ``nu``.

    ``fuzzy_equivalent`` and ``blackwell`` are decided exactly (linear
    feasibility). ``pairwise`` and ``vs_mixture`` come from Hellinger checks
    on sampled states and are evidence only: they can refute sufficiency but
    never prove it.
    """

    pairwise: bool
    vs_mixture: bool
    hellinger_max_gap: float
    pairwise_max_gap: float
    vs_mixture_max_gap: float
    blackwell: bool
    fuzzy_equivalent: bool
    agree: bool
    n_states: int
    seed: int
    evidence: str = "sampled"

    def to_dict(self) -> dict:
        return asdict(self)


def equivalence_battery(
    xi: Observable,
    eta: Observable,
    nu,
    m0: State,
    n_states: int = 16,
    seed: int = DEFAULT_SEED,
) -> SufficiencyReport:
    """Compare the exact and sampled sufficiency criteria for ``eta = smear(xi, nu)``."""
    k = _kernel(nu)
    if smearing_residual(xi, k, eta) > TOL.eq:
        raise NotASmearing("eta is not the smearing of xi by nu")
    if not m0.faithful:
        raise NotFaithful("reference state must be faithful")

    equiv = fuzzy_equivalent(xi, eta).equivalent

    canon = canonical_states(xi.backend, xi.dim)
    family = [distribution(xi, m) for m in canon]
    blackwell = blackwell_sufficient(k, family)

    rng = np.random.default_rng(seed)
    sampled = canon + random_states(xi.backend, xi.dim, n_states, rng)
    dists = [distribution(xi, m) for m in sampled]
    ref = distribution(xi, m0)
    vs_mixture_gap = max(hellinger_gap(k, p, ref) for p in dists)
    pairs = zip(dists, dists[1:] + dists[:1])
    pairwise_gap = max(hellinger_gap(k, p, q) for p, q in pairs)

    return SufficiencyReport(
        pairwise=pairwise_gap <= TOL.suff,
        vs_mixture=vs_mixture_gap <= TOL.suff,
        hellinger_max_gap=max(pairwise_gap, vs_mixture_gap),
        pairwise_max_gap=pairwise_gap,
        vs_mixture_max_gap=vs_mixture_gap,
        blackwell=blackwell,
        fuzzy_equivalent=equiv,
        agree=blackwell == equiv,
        n_states=len(sampled),
        seed=int(seed),
    )
