"""
Effects and their partial sum
=============================

An effect is a Hermitian matrix between 0 and the identity. Two effects can
be added only when the sum stays below the identity, so ``oplus`` returns
``None`` when the sum is undefined.
"""

import numpy as np

from povcal import effects
from povcal.effects import Effect, State

a = Effect.hilbert(np.diag([0.5, 0.1]))
b = Effect.hilbert(np.diag([0.4, 0.2]))
print("a + b =\n", effects.oplus(a, b).data.real)

# a rank-one projection plus a diagonal projection overshoots the identity
half = Effect.hilbert(np.full((2, 2), 0.5))
print("diag(1, 0) + |+><+| defined?", effects.oplus(Effect.hilbert(np.diag([1.0, 0.0])), half) is not None)

# every effect has exactly one complement summing to the identity
comp = effects.orthosupplement(a)
print("a' =", np.diag(comp.data).real, " a + a' =", np.diag(effects.oplus(a, comp).data).real)

# how many copies of an effect fit below the identity
for value in (0.3, 0.25, 1.0):
    print(f"copies of {value} that fit:", effects.isotropic_index(Effect.tribe([value])))

# states turn effects into probabilities, additively
rho = State.density(np.array([[0.7, 0.2], [0.2, 0.3]]))
print("m(a) + m(b) =", effects.state_eval(rho, a) + effects.state_eval(rho, b))
print("m(a + b)    =", effects.state_eval(rho, effects.oplus(a, b)))

# the fuzzy-set backend works the same way with vectors in [0, 1]^n
f = Effect.tribe([0.2, 0.9, 0.5])
p = State.probability([0.5, 0.25, 0.25])
print("integral of f against p:", effects.state_eval(p, f))
