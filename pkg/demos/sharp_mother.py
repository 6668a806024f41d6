"""
A sharp measurement behind commuting effects
============================================

When all atoms of an observable commute, they share an eigenbasis. Grouping
basis vectors by their eigenvalue profile gives a projection-valued
observable, and the eigenvalues themselves form the kernel that smears it
into the original.
"""

import numpy as np

from povcal import make_observable, pvm_mother, smear
from povcal.errors import NotCommuting

rng = np.random.default_rng(3)
q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
spectra = [np.array([0.5, 0.5, 0.1]), np.array([0.3, 0.3, 0.2]), np.array([0.2, 0.2, 0.7])]
atoms = [(q * s) @ q.T for s in spectra]
eta = make_observable([0, 1, 2], atoms)

xi, nu = pvm_mother(eta)
print("projections found:", len(xi), "with ranks", [int(round(np.trace(a).real)) for a in xi.atoms])
print("kernel:\n", nu.matrix.round(6))
print("re-smearing error:", np.max(np.abs(smear(xi, nu).atoms - eta.atoms)))

# non-commuting atoms have no such decomposition
a, b = np.diag([0.5, 0.0]), np.full((2, 2), 0.25)
try:
    pvm_mother(make_observable([0, 1, 2], [a, b, np.eye(2) - a - b]))
except NotCommuting as exc:
    print("NotCommuting:", exc)
