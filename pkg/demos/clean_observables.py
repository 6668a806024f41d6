"""
Clean observables and rank-one refinements
==========================================

An observable whose atoms all have rank one is clean. Any other observable
splits into a finer rank-one observable by diagonalizing each atom; merging
the pieces back gives the original, so the refinement sits below it.
"""

import numpy as np

from povcal import make_observable, order
from povcal.effects import Effect

# three rank-one atoms in dimension two: the "trine" measurement
angles = 2 * np.pi * np.arange(3) / 3
trine = [2 / 3 * np.outer(v, v) for v in np.stack([np.cos(angles), np.sin(angles)], axis=1)]
eta = make_observable([0, 1, 2], trine)
print("trine atom ranks:", order.atom_ranks(eta), "clean:", order.is_clean(eta))

# a noisy two-outcome observable has full-rank atoms
noisy = make_observable([0, 1], [np.diag([0.8, 0.3]), np.diag([0.2, 0.7])])
ev = order.clean_witness(noisy)
print("noisy atom ranks:", order.atom_ranks(noisy), "clean:", ev.clean)
print("refinement has", len(ev.refinement), "atoms; label map", ev.label_map)
print("refinement <= noisy:", ev.refinement_below.holds)
print("noisy <= refinement:", ev.eta_below.holds)
print("merging the pieces recovers it:", order.refinement_recovers(noisy, ev.refinement, ev.label_map))

# two-outcome observables have their own minimality test
print("projection minimal among 1-0 observables:", order.two_valued_is_minimal(Effect.hilbert(np.diag([1.0, 0.0]))))
print("I/2 minimal:", order.two_valued_is_minimal(Effect.hilbert(np.eye(2) / 2)))
print("I/2 = t B + s (I - B) with (t, s) =", order.two_valued_coefficients(Effect.hilbert(np.diag([0.9, 0.2])), Effect.hilbert(np.eye(2) / 2)))
