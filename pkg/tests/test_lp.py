import numpy as np
import pytest
from scipy.optimize import linprog

from povcal import _config
from povcal.errors import DimMismatch, NumericalFailure
from povcal.lp import FeasibilityProblem, phase_one, solve_feasibility


def scipy_feasible(prob):
    a, b = prob.full_system()
    res = linprog(np.zeros(prob.n_vars), A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


def test_simple_feasible():
    prob = FeasibilityProblem([[1.0, 1.0]], [1.0])
    x = solve_feasibility(prob)
    assert x is not None and np.all(x >= 0) and x.sum() == pytest.approx(1.0)


def test_simple_infeasible():
    assert solve_feasibility(FeasibilityProblem([[1.0, 1.0]], [-1.0])) is None


def test_simplex_groups():
    # x0 + x1 = 1 from the group, and x0 = 2 from the equality: infeasible
    prob = FeasibilityProblem([[1.0, 0.0]], [2.0], simplex_groups=[[0, 1]])
    assert solve_feasibility(prob) is None
    prob = FeasibilityProblem([[1.0, 0.0]], [0.25], simplex_groups=[[0, 1]])
    np.testing.assert_allclose(solve_feasibility(prob), [0.25, 0.75])


def test_empty_system():
    x = solve_feasibility(FeasibilityProblem(np.zeros((0, 3)), np.zeros(0)))
    np.testing.assert_array_equal(x, np.zeros(3))


def test_bad_shapes():
    with pytest.raises(DimMismatch):
        FeasibilityProblem([[1.0, 1.0]], [1.0, 2.0])
    with pytest.raises(DimMismatch):
        FeasibilityProblem([[1.0, 1.0]], [1.0], simplex_groups=[[0, 5]])


def test_undecidable_band_raises():
    # phase-1 optimum is exactly 5e-7, between feas and 10 * feas
    prob = FeasibilityProblem([[1.0]], [-5e-7])
    with pytest.raises(NumericalFailure):
        solve_feasibility(prob)
    with _config.scaled(10.0):
        assert solve_feasibility(prob) is not None


def test_deterministic():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 9))
    b = a @ rng.random(9)
    x1 = solve_feasibility(FeasibilityProblem(a, b))
    x2 = solve_feasibility(FeasibilityProblem(a.copy(), b.copy()))
    assert np.array_equal(x1, x2)


def test_degenerate_problem_terminates():
    # many identical columns and a zero right-hand side invite cycling without Bland's rule
    a = np.tile([[1.0, -1.0], [-1.0, 1.0], [0.0, 0.0]], (1, 4))
    res = phase_one(FeasibilityProblem(a, np.zeros(3)))
    assert res.infeasibility == 0.0


@pytest.mark.parametrize("seed", range(40))
def test_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 6)), int(rng.integers(3, 10))
    a = rng.normal(size=(m, n))
    if seed % 2 == 0:
        b = a @ rng.random(n)
    else:
        b = rng.normal(size=m)
    prob = FeasibilityProblem(a, b)
    x = solve_feasibility(prob)
    assert (x is not None) == scipy_feasible(prob)
    if x is not None:
        assert prob.residual(x) <= 1e-7 and np.all(x >= 0)


@pytest.mark.parametrize("seed", range(15))
def test_stochastic_groups_agree_with_scipy(seed):
    rng = np.random.default_rng(1000 + seed)
    k, l = 3, 3
    groups = [list(range(i * l, (i + 1) * l)) for i in range(k)]
    a = rng.random((2, k * l))
    target = rng.dirichlet(np.ones(l), size=k).reshape(-1)
    b = a @ target if seed % 3 else rng.random(2) * 5
    prob = FeasibilityProblem(a, b, simplex_groups=groups)
    x = solve_feasibility(prob)
    assert (x is not None) == scipy_feasible(prob)


@pytest.mark.parametrize("seed", range(30))
def test_highly_degenerate_preorder_problems(seed):
    # a clean observable against its own rank-one refinement has a unique,
    # highly degenerate solution; naive pivoting used to stall or blow up here
    import generators as gen
    from povcal import order

    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 7))
    k = int(rng.integers(d, 9))
    eta = gen.povm(d, k, rng, rank=1)
    xi, _ = order.rank_one_refinement(eta)
    for prob in (order.preorder_problem(eta, xi), order.preorder_problem(xi, eta)):
        x = solve_feasibility(prob)
        assert x is not None and scipy_feasible(prob)
        assert prob.residual(x) <= 1e-7
