"""
Smearing an observable and recovering the kernel
================================================

A Markov kernel turns a sharp measurement into a noisy one. Given only the
two observables, a linear feasibility problem recovers a kernel that
relates them, or proves that none exists.
"""

import numpy as np

from povcal import MarkovKernel, fuzzy_equivalent, make_observable, preorder_leq, smear
from povcal.effects import State
from povcal.observables import distribution

xi = make_observable([0, 1], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
nu = MarkovKernel([[0.8, 0.2], [0.3, 0.7]])
eta = smear(xi, nu)
for label, atom in zip(eta.labels, eta.atoms):
    print(f"eta({label:g}) = diag{tuple(np.diag(atom).real.round(3).tolist())}")

# the noisy observable is below the sharp one, with a witness kernel
w = preorder_leq(xi, eta)
print("xi <= eta:", w.holds)
print(w.witness.matrix.round(6))

# the noise cannot be undone
print("eta <= xi:", preorder_leq(eta, xi).holds)

# relabelling outcomes loses nothing, so it is an equivalence
swapped = smear(xi, MarkovKernel.permutation([1, 0]))
print("xi ~ swap(xi):", fuzzy_equivalent(xi, swapped).equivalent)

# outcome statistics follow the kernel: p_eta = p_xi @ nu
rho = State.density(np.diag([0.9, 0.1]))
print("p_xi  =", distribution(xi, rho))
print("p_eta =", distribution(eta, rho), "=", distribution(xi, rho) @ nu.matrix)
