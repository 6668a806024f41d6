"""Compare finite quantum measurements up to classical post-processing.

Smearing by Markov kernels, the postprocessing preorder, clean observables,
f-divergences and the sufficiency criteria that characterize fuzzy
equivalence.
"""

from ._config import TOL
from .effects import Effect, State
from .kernels import MarkovKernel, WeakMarkovKernel, compose, smear
from .observables import Observable, make_observable
from .order import fuzzy_equivalent, is_clean, preorder_leq, pvm_mother

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Effect",
    "MarkovKernel",
    "Observable",
    "State",
    "WeakMarkovKernel",
    "compose",
    "fuzzy_equivalent",
    "is_clean",
    "make_observable",
    "preorder_leq",
    "pvm_mother",
    "smear",
]
