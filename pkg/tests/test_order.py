import numpy as np
import pytest
from scipy.optimize import linprog

import generators as gen
from povcal import kernels, order
from povcal.effects import Effect
from povcal.errors import NotASmearing, NotCommuting, NotDeterministicKernel
from povcal.observables import make_observable

PVM = make_observable([0, 1], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
ETA = make_observable([0, 1], [np.diag([0.8, 0.3]), np.diag([0.2, 0.7])])
HALF = np.full((2, 2), 0.5)


def scipy_smears(xi, eta):
    """Independent check of xi <= eta: every real and imaginary matrix entry as a constraint."""
    k, l = len(xi), len(eta)
    flat = xi.atoms.reshape(k, -1)
    rows, rhs = [], []
    for j in range(l):
        target = eta.atoms[j].reshape(-1)
        for part in (np.real, np.imag):
            block = np.zeros((flat.shape[1], k * l))
            block[:, j::l] = part(flat).T
            rows.append(block)
            rhs.append(part(target))
    groups = np.zeros((k, k * l))
    for i in range(k):
        groups[i, i * l : (i + 1) * l] = 1
    a = np.vstack(rows + [groups])
    b = np.concatenate(rhs + [np.ones(k)])
    res = linprog(np.zeros(k * l), A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


def test_smeared_pvm_is_below():
    w = order.preorder_leq(PVM, ETA)
    assert w.holds and w.verdict == "holds"
    np.testing.assert_allclose(w.witness.matrix, [[0.8, 0.2], [0.3, 0.7]], atol=1e-9)


def test_fuzzy_version_is_not_above():
    assert not order.preorder_leq(ETA, PVM)


def test_trivial_is_below_everything():
    triv = make_observable([0], [np.eye(2)])
    assert order.preorder_leq(ETA, triv)
    assert not order.preorder_leq(triv, ETA)


def test_noncommuting_pvms_incomparable():
    rotated = make_observable([0, 1], [HALF, np.eye(2) - HALF])
    assert not order.preorder_leq(PVM, rotated)
    assert not order.preorder_leq(rotated, PVM)


def test_permuted_labels_are_equivalent():
    swapped = kernels.smear(PVM, kernels.MarkovKernel.permutation([1, 0]))
    eq = order.fuzzy_equivalent(PVM, swapped)
    assert eq and eq.forward.holds and eq.backward.holds


@pytest.mark.parametrize("seed", range(20))
def test_constructed_smearings_hold(seed):
    rng = np.random.default_rng(seed)
    xi = gen.povm(2, 3, rng)
    nu = gen.kernel(3, 2, rng)
    w = order.preorder_leq(xi, kernels.smear(xi, nu))
    assert w.holds and w.residual <= 1e-8


@pytest.mark.parametrize("seed", range(25))
def test_agrees_with_scipy(seed):
    rng = np.random.default_rng(500 + seed)
    xi, eta = gen.povm(2, 3, rng, rank=1), gen.povm(2, 2, rng)
    if seed % 3 == 0:
        eta = kernels.smear(xi, gen.kernel(3, 2, rng))
    assert order.preorder_leq(xi, eta).holds == scipy_smears(xi, eta)


def test_real_coordinates_size_and_injectivity():
    rng = np.random.default_rng(1)
    a = gen.hermitian(3, rng)
    c = order.real_coordinates(a)
    assert c.shape == (9,)
    iu = np.triu_indices(3, 1)
    rebuilt = np.diag(c[:3]).astype(complex)
    rebuilt[iu] = c[3:6] + 1j * c[6:]
    rebuilt = rebuilt + np.triu(rebuilt, 1).conj().T
    np.testing.assert_allclose(rebuilt, a, atol=1e-15)


class TestClean:
    def test_rank_one_pvm_is_clean(self):
        assert order.is_clean(PVM)

    def test_identity_atom_is_not_clean(self):
        assert not order.is_clean(make_observable([0], [np.eye(2)]))

    def test_refinement_of_trivial(self):
        xi, f = order.rank_one_refinement(make_observable([7], [np.eye(2)]))
        assert len(xi) == 2 and set(f.values()) == {7.0}
        assert order.refinement_recovers(make_observable([7], [np.eye(2)]), xi, f)

    def test_refinement_skips_zero_eigenvalues(self):
        eta = make_observable([0, 1], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        xi, _ = order.rank_one_refinement(eta)
        assert len(xi) == 2

    @pytest.mark.parametrize("seed", range(10))
    def test_nonclean_is_strictly_refined(self, seed):
        rng = np.random.default_rng(seed)
        eta = gen.povm(2, 2, rng)
        ev = order.clean_witness(eta)
        assert not ev.clean and ev.strictly_refined
        assert order.refinement_recovers(eta, ev.refinement, ev.label_map)

    @pytest.mark.parametrize("seed", range(10))
    def test_clean_is_equivalent_to_its_refinement(self, seed):
        rng = np.random.default_rng(seed)
        eta = gen.povm(3, 4, rng, rank=1)
        ev = order.clean_witness(eta)
        assert ev.clean and ev.refinement_below.holds and ev.eta_below.holds


class TestTwoValued:
    def test_half_identity_is_dominated(self):
        a = Effect.hilbert(np.eye(2) / 2)
        b = Effect.hilbert(np.diag([1.0, 0.0]))
        t, s = order.two_valued_coefficients(b, a)
        assert (t, s) == pytest.approx((0.5, 0.5))

    def test_coefficients_recovered(self):
        rng = np.random.default_rng(4)
        b = Effect.hilbert(gen.effect_matrix(3, rng))
        a = Effect.hilbert(0.3 * b.data + 0.9 * (np.eye(3) - b.data))
        assert order.two_valued_coefficients(b, a) == pytest.approx((0.3, 0.9), abs=1e-9)

    def test_outside_span(self):
        b = Effect.hilbert(np.diag([1.0, 0.0]))
        assert not order.two_valued_leq(b, Effect.hilbert(HALF))

    def test_coefficients_outside_box(self):
        # diag(.9,.1) = t diag(.8,.2) + s diag(.2,.8) needs t = 7/6
        b = Effect.hilbert(np.diag([0.8, 0.2]))
        assert order.two_valued_coefficients(b, Effect.hilbert(np.diag([0.9, 0.1]))) is None

    def test_agrees_with_general_preorder(self):
        from povcal.observables import two_valued

        rng = np.random.default_rng(8)
        for _ in range(10):
            b = Effect.hilbert(gen.effect_matrix(2, rng))
            t, s = rng.random(2)
            a = Effect.hilbert(t * b.data + s * (np.eye(2) - b.data))
            assert order.two_valued_leq(b, a) == order.preorder_leq(two_valued(b), two_valued(a)).holds

    @pytest.mark.parametrize(
        "matrix, minimal",
        [(np.diag([1.0, 0.0]), True), (HALF, True), (np.diag([0.9, 0.0]), False), (np.eye(2), False), (np.diag([1.0, 0.3, 0.0]), True)],
    )
    def test_minimality(self, matrix, minimal):
        assert order.two_valued_is_minimal(Effect.hilbert(matrix)) is minimal


class TestMother:
    def test_diagonal_example(self):
        xi, nu = order.pvm_mother(ETA)
        np.testing.assert_allclose(xi.atoms[0], np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(nu.matrix, [[0.8, 0.2], [0.3, 0.7]], atol=1e-12)

    def test_degenerate_groups_merge(self):
        eta = make_observable([0, 1], [np.diag([0.5, 0.5, 1.0]), np.diag([0.5, 0.5, 0.0])])
        xi, nu = order.pvm_mother(eta)
        assert len(xi) == 2
        assert order.smearing_residual(xi, nu, eta) <= 1e-12

    def test_noncommuting(self):
        with pytest.raises(NotCommuting):
            a, b = np.diag([0.5, 0.0]), HALF * 0.5
            order.pvm_mother(make_observable([0, 1, 2], [a, b, np.eye(2) - a - b]))

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        eta = kernels.smear(gen.pvm(d, d, rng), gen.kernel(d, 3, rng))
        xi, nu = order.pvm_mother(eta)
        assert order.smearing_residual(xi, nu, eta) <= 1e-8


class TestRangeInclusion:
    def test_merge_is_in_range(self):
        xi = make_observable([0, 1, 2], [np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0]), np.diag([0, 0, 1.0])])
        nu = kernels.deterministic_kernel({0.0: 0, 1.0: 1, 2.0: 1}, xi.labels)
        assert order.range_inclusion_check(xi, kernels.smear(xi, nu), nu)

    def test_rejects_fuzzy_kernel(self):
        with pytest.raises(NotDeterministicKernel):
            order.range_inclusion_check(PVM, ETA, [[0.8, 0.2], [0.3, 0.7]])

    def test_rejects_non_smearing(self):
        with pytest.raises(NotASmearing):
            order.range_inclusion_check(PVM, ETA, np.eye(2))
