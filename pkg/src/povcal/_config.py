"""Numerical tolerances shared by every module.

The values are read at call time, so :func:`scaled` (used by the command
line front-end) affects all subsequent computations in the process.
"""

from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass
class Tolerances:
    herm: float = 1e-9
    eig: float = 1e-9
    comm: float = 1e-9
    simdiag: float = 1e-9
    psd: float = 1e-9
    eq: float = 1e-8
    trace: float = 1e-9
    feas: float = 1e-7
    suff: float = 1e-9
    # eigenvalues closer than this are treated as one eigenspace
    cluster: float = 1e-7
    # eigenvalues above this count toward the rank of an effect
    rank: float = 1e-7
    # kernel rows within this of unit sum are renormalized
    row_sum: float = 1e-10


TOL = Tolerances()


def update(**overrides: float) -> None:
    names = {f.name for f in dataclasses.fields(Tolerances)}
    for key, value in overrides.items():
        if key not in names:
            raise KeyError(f"unknown tolerance {key!r}")
        setattr(TOL, key, float(value))


@contextlib.contextmanager
def scaled(factor: float):
    """Temporarily multiply the equality and feasibility tolerances."""
    saved = dataclasses.replace(TOL)
    TOL.eq *= factor
    TOL.feas *= factor
    try:
        yield TOL
    finally:
        for f in dataclasses.fields(Tolerances):
            setattr(TOL, f.name, getattr(saved, f.name))
