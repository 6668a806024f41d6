import math

import numpy as np
import pytest

import generators as gen
from povcal import kernels, sufficiency as suff
from povcal.effects import State
from povcal.errors import EmptyFamily, NotASmearing, NotFaithful
from povcal.kernels import MarkovKernel
from povcal.observables import make_observable

PVM = make_observable([0, 1], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
NU = MarkovKernel([[0.8, 0.2], [0.3, 0.7]])


def hellinger_oracle(p, q):
    return 1.0 - sum(math.sqrt(a * b) for a, b in zip(p, q))


def test_identity_is_sufficient():
    assert suff.pairwise_sufficient(np.eye(3), [0.2, 0.3, 0.5], [0.5, 0.3, 0.2])
    assert suff.blackwell_sufficient(np.eye(3), [[0.2, 0.3, 0.5], [0.5, 0.3, 0.2]])


def test_constant_kernel_loses_everything():
    nu = np.full((2, 2), 0.5)
    p, q = [0.9, 0.1], [0.1, 0.9]
    assert suff.hellinger_gap(nu, p, q) == pytest.approx(hellinger_oracle(p, q))
    assert not suff.pairwise_sufficient(nu, p, q)
    assert not suff.blackwell_sufficient(nu, [p, q])


def test_kernel_is_sufficient_for_a_single_point():
    assert suff.blackwell_sufficient(NU, [[0.4, 0.6]])
    assert suff.sufficient_for_family(NU, [[0.4, 0.6]])


def test_split_kernel_recovery_undoes_the_split():
    nu = MarkovKernel([[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
    fam = [[0.3, 0.7], [0.9, 0.1]]
    r = suff.blackwell_recovery(nu, fam)
    for p in fam:
        np.testing.assert_allclose(kernels.apply_to_measure(r, kernels.apply_to_measure(nu, p)), p, atol=1e-9)


def test_recovery_rows_off_support_are_uniform():
    nu = MarkovKernel([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    r = suff.blackwell_recovery(nu, [[0.5, 0.5]])
    assert r.support_mask.tolist() == [True, True, False]
    np.testing.assert_allclose(r.matrix[2], [0.5, 0.5])


def test_dominating_mixture():
    np.testing.assert_allclose(suff.dominating_mixture([[1, 0, 0], [0, 0.5, 0.5]]), [0.5, 0.25, 0.25])
    with pytest.raises(EmptyFamily):
        suff.dominating_mixture([])


@pytest.mark.parametrize("seed", range(15))
def test_pairwise_and_blackwell_agree_on_full_support(seed):
    rng = np.random.default_rng(seed)
    nu = gen.split_kernel(3, rng) if seed % 2 else gen.kernel(3, 3, rng)
    p, q = gen.probability(3, rng), gen.probability(3, rng)
    assert suff.pairwise_sufficient(nu, p, q) == suff.blackwell_sufficient(nu, [p, q])


class TestCanonicalStates:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_count_and_faithful(self, d):
        states = suff.canonical_states("hilbert", d)
        assert len(states) == d * d
        assert all(s.faithful for s in states)

    @pytest.mark.parametrize("d", [2, 3])
    def test_spanning(self, d):
        mats = np.array([s.data.reshape(-1) for s in suff.canonical_states("hilbert", d)])
        stacked = np.concatenate([mats.real, mats.imag], axis=1)
        assert np.linalg.matrix_rank(stacked) == d * d

    def test_tribe_point_masses(self):
        states = suff.canonical_states("tribe", 3)
        np.testing.assert_array_equal(np.array([s.data for s in states]), np.eye(3))


class TestBattery:
    def test_fuzzy_smearing_is_not_sufficient(self):
        eta = kernels.smear(PVM, NU)
        rep = suff.equivalence_battery(PVM, eta, NU, State.maximally_mixed(2))
        assert not rep.fuzzy_equivalent and not rep.blackwell and rep.agree
        assert not rep.pairwise and rep.hellinger_max_gap > 1e-6

    def test_permutation_is_sufficient(self):
        nu = MarkovKernel.permutation([1, 0])
        rep = suff.equivalence_battery(PVM, kernels.smear(PVM, nu), nu, State.maximally_mixed(2))
        assert rep.fuzzy_equivalent and rep.blackwell and rep.pairwise and rep.vs_mixture
        assert rep.hellinger_max_gap <= 1e-9

    def test_report_fields(self):
        rep = suff.equivalence_battery(PVM, kernels.smear(PVM, NU), NU, State.maximally_mixed(2), n_states=4, seed=7)
        d = rep.to_dict()
        assert d["n_states"] == 4 + 4 and d["seed"] == 7 and d["evidence"] == "sampled"

    def test_reproducible(self):
        eta = kernels.smear(PVM, NU)
        a = suff.equivalence_battery(PVM, eta, NU, State.maximally_mixed(2))
        b = suff.equivalence_battery(PVM, eta, NU, State.maximally_mixed(2))
        assert a == b

    def test_rejects_non_smearing(self):
        with pytest.raises(NotASmearing):
            suff.equivalence_battery(PVM, PVM, NU, State.maximally_mixed(2))

    def test_rejects_unfaithful_reference(self):
        with pytest.raises(NotFaithful):
            suff.equivalence_battery(PVM, kernels.smear(PVM, NU), NU, State.pure([1, 0]))

    @pytest.mark.parametrize("seed", range(10))
    def test_split_smearing_of_pvm(self, seed):
        rng = np.random.default_rng(seed)
        xi = gen.pvm(3, 3, rng)
        nu = gen.split_kernel(3, rng)
        rep = suff.equivalence_battery(xi, kernels.smear(xi, nu), nu, State.maximally_mixed(3))
        assert rep.fuzzy_equivalent and rep.blackwell and rep.hellinger_max_gap <= 1e-8
