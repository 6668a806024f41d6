"""Phase-1 simplex feasibility solver.

Decides whether ``A x = b, x >= 0`` (plus optional groups of variables that
must each sum to one) has a solution. Dense tableau, Bland's rule, fixed
variable order, so the answer and the returned point are deterministic.

Problems here are small (a few hundred variables at most), so robustness
matters more than speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._config import TOL
from .errors import DimMismatch, NumericalFailure

PIVOT_TOL = 1e-11
# pivot candidates must also exceed this fraction of the column's largest entry
PIVOT_RTOL = 1e-7
# basic values this small are snapped to zero after each pivot
ZERO_TOL = 1e-13
# the tableau is re-factored from the original data this often
REFACTOR_EVERY = 25
# singular values below this fraction of the largest count as zero
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class FeasibilityProblem:
    a_eq: np.ndarray
    b_eq: np.ndarray
    simplex_groups: Sequence[Sequence[int]] = field(default_factory=tuple)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_eq, dtype=float))
        b = np.asarray(self.b_eq, dtype=float).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise DimMismatch(f"{a.shape[0]} constraint rows but {b.shape[0]} right-hand sides")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("constraint data must be finite")
        n = a.shape[1]
        for g in self.simplex_groups:
            if any(not 0 <= j < n for j in g):
                raise DimMismatch(f"simplex group {list(g)} indexes outside {n} variables")
        object.__setattr__(self, "a_eq", a)
        object.__setattr__(self, "b_eq", b)

    @property
    def n_vars(self) -> int:
        return self.a_eq.shape[1]

    def full_system(self) -> tuple[np.ndarray, np.ndarray]:
        """Equality rows with the simplex groups appended."""
        rows = [self.a_eq]
        rhs = [self.b_eq]
        if len(self.simplex_groups):
            g = np.zeros((len(self.simplex_groups), self.n_vars))
            for r, idx in enumerate(self.simplex_groups):
                g[r, list(idx)] = 1.0
            rows.append(g)
            rhs.append(np.ones(len(self.simplex_groups)))
        return np.vstack(rows), np.concatenate(rhs)

    def residual(self, x: np.ndarray) -> float:
        a, b = self.full_system()
        r = a @ x - b
        return float(np.max(np.abs(r))) if r.size else 0.0


@dataclass(frozen=True)
class PhaseOneResult:
    x: np.ndarray
    infeasibility: float
    residual: float
    pivots: int


def phase_one(prob: FeasibilityProblem, max_pivots: int | None = None) -> PhaseOneResult:
    """Minimize the sum of artificial variables; return the final point."""
    a, b, outside = _independent_rows(*prob.full_system())
    m, n = a.shape
    if m == 0:
        x = np.zeros(n)
        return PhaseOneResult(x, outside, prob.residual(x), 0)
    sign = np.where(b < 0, -1.0, 1.0)
    a = a * sign[:, None]
    b = b * sign

    # columns: n structural, m artificial, then rhs
    system = np.hstack([a, np.eye(m), b[:, None]])
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    tab = _tableau(system, cost, basis)
    limit = max_pivots if max_pivots is not None else 50 * (m + n) + 100

    pivots = 0
    seen = {frozenset(basis)}
    strict_bland = False
    while True:
        entering = _improving(tab[m, :n], basis)
        if entering.size == 0:
            # confirm optimality on a freshly factored tableau
            fresh = _tableau(system, cost, basis)
            if _improving(fresh[m, :n], basis).size and pivots <= limit:
                tab = fresh
                continue
            tab = fresh
            break
        if strict_bland:
            col = int(entering[0])
        else:
            col = int(entering[np.argmin(tab[m, entering])])
        column = tab[:m, col]
        # entries that are tiny next to the rest of the column are round-off
        threshold = max(PIVOT_TOL, PIVOT_RTOL * float(np.max(np.abs(column))))
        positive = np.flatnonzero(column > threshold)
        if positive.size == 0:
            # phase-1 objective is bounded below by 0; a ray here means round-off
            raise NumericalFailure("phase-1 found an improving ray")
        ratios = tab[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + 1e-12 * max(1.0, abs(best))]
        if strict_bland:
            row = int(min(ties, key=lambda r: basis[r]))
        else:
            # among tied rows the largest pivot keeps the basis well conditioned
            row = int(min(ties, key=lambda r: (-column[r], basis[r])))
        basis[row] = col
        key = frozenset(basis)
        if key in seen:
            # a repeated basis means cycling, which Bland's rule rules out
            strict_bland = True
        seen.add(key)
        pivots += 1
        if pivots % REFACTOR_EVERY == 0:
            tab = _tableau(system, cost, basis)
        else:
            _pivot(tab, row, col)
        if pivots > limit:
            raise NumericalFailure(f"phase-1 did not terminate within {limit} pivots")

    x = np.zeros(n + m)
    x[basis] = tab[:m, -1]
    x = np.clip(x[:n], 0.0, None)
    infeasibility = max(-float(tab[m, -1]), outside)
    return PhaseOneResult(x, infeasibility, prob.residual(x), pivots)


def _independent_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Replace ``A x = b`` by an equivalent system with linearly independent rows.

    Redundant rows (common when matrix constraints are written entrywise)
    leave degenerate artificial variables in the basis and invite pivots on
    round-off sized entries. The SVD keeps the numerically nonzero singular
    directions; the part of ``b`` outside the range of ``A`` is returned as
    a lower bound on the attainable residual.
    """
    if a.shape[0] == 0:
        return a, b, 0.0
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    keep = s > RANK_RTOL * (s[0] if s.size else 0.0)
    coords = u[:, keep].T @ b
    outside = float(np.max(np.abs(b - u[:, keep] @ coords))) if b.size else 0.0
    return s[keep, None] * vt[keep], coords, outside


def _improving(reduced: np.ndarray, basis: list[int]) -> np.ndarray:
    """Nonbasic structural columns with negative reduced cost, in index order.

    Artificial columns are not offered, so they never re-enter the basis.
    """
    candidates = reduced < -PIVOT_TOL
    n = reduced.size
    candidates[[j for j in basis if j < n]] = False
    return np.flatnonzero(candidates)


def _tableau(system: np.ndarray, cost: np.ndarray, basis: list[int]) -> np.ndarray:
    """Simplex tableau for ``basis``, factored afresh from the original data.

    Updating the tableau pivot by pivot lets round-off pile up on degenerate
    problems; these systems are small enough to re-solve at every step.
    """
    m = system.shape[0]
    try:
        body = np.linalg.solve(system[:, basis], system)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("singular simplex basis") from exc
    rhs = body[:, -1]
    # basic values are nonnegative in exact arithmetic
    rhs[np.abs(rhs) < ZERO_TOL] = 0.0
    reduced = np.append(cost, 0.0) - cost[basis] @ body
    tab = np.empty((m + 1, system.shape[1]))
    tab[:m] = body
    tab[m] = reduced
    return tab


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factor = tab[:, col].copy()
    factor[row] = 0.0
    tab -= np.outer(factor, tab[row])
    rhs = tab[:-1, -1]
    rhs[np.abs(rhs) < ZERO_TOL] = 0.0


def _polish(prob: FeasibilityProblem, x: np.ndarray) -> np.ndarray:
    """Re-solve the equalities on the support of ``x`` to shed pivoting round-off."""
    a, b = prob.full_system()
    support = np.flatnonzero(x > 0)
    if support.size == 0:
        return x
    sol, *_ = np.linalg.lstsq(a[:, support], b, rcond=None)
    if np.any(sol < 0):
        return x
    out = np.zeros_like(x)
    out[support] = sol
    return out


def solve_feasibility(prob: FeasibilityProblem) -> np.ndarray | None:
    """A point ``x >= 0`` satisfying the problem, or ``None`` if infeasible.

    Infeasibility is only reported when the phase-1 optimum exceeds ten
    times the feasibility tolerance; the band in between raises
    :class:`NumericalFailure`.
    """
    res = phase_one(prob)
    tol = TOL.feas
    if res.infeasibility > 10 * tol:
        return None
    if res.infeasibility <= tol:
        x = res.x
        if res.residual > tol:
            polished = _polish(prob, x)
            if prob.residual(polished) < res.residual:
                x = polished
        if prob.residual(x) <= tol:
            return x
        raise NumericalFailure(
            f"phase-1 optimum {res.infeasibility:.3e} but residual {prob.residual(x):.3e}"
        )
    raise NumericalFailure(
        f"phase-1 optimum {res.infeasibility:.3e} is in the undecidable band ({tol:.1e}, {10 * tol:.1e}]"
    )
