"""
Divergences, sufficiency and the equivalence battery
====================================================

Post-processing by a kernel can only shrink an f-divergence. A kernel that
keeps the Hellinger distance of a family intact loses no information, and a
recovery kernel then maps every image back to its source.
"""

import numpy as np

from povcal import MarkovKernel, divergences, make_observable, smear, sufficiency
from povcal.effects import State

p, q = np.array([0.7, 0.2, 0.1]), np.array([0.2, 0.3, 0.5])
noisy = MarkovKernel([[0.6, 0.4], [0.5, 0.5], [0.1, 0.9]])
for name in ("tv", "kl", "hellinger"):
    before = divergences.f_divergence(name, p, q)
    gap = divergences.monotonicity_gap(name, p, q, noisy)
    print(f"{name:9s} D(p, q) = {before:.4f}, loss under the kernel = {gap:.4f}")

# infinities follow the usual conventions
print("KL with a zero where the other has mass:", divergences.f_divergence("kl", [1.0, 0.0], [0.5, 0.5]))

# splitting each outcome at random and labelling the pieces is reversible
split = MarkovKernel([[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
print("Hellinger gap, split kernel:", sufficiency.hellinger_gap(split, p, q))
rec = sufficiency.blackwell_recovery(split, [p, q])
print("recovery kernel:\n", rec.matrix.round(6))
print("noisy kernel recoverable:", sufficiency.blackwell_sufficient(noisy, [p, q]))

# the battery compares exact and sampled criteria for one smearing
xi = make_observable([0, 1, 2], [np.diag(row) for row in np.eye(3)])
for name, nu in (("split", split), ("noisy", noisy)):
    report = sufficiency.equivalence_battery(xi, smear(xi, nu), nu, State.maximally_mixed(3))
    print(name, {k: report.to_dict()[k] for k in ("fuzzy_equivalent", "blackwell", "pairwise", "hellinger_max_gap")})
