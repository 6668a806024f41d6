"""f-divergences between finite probability vectors.

``D_f(p, q) = sum_{q_i > 0} q_i f(p_i / q_i) + f_inf * sum_{q_i = 0} p_i``

where ``f_inf = lim f(u)/u`` as ``u -> inf``. The first sum integrates the
likelihood ratio over the part of ``p`` absolutely continuous w.r.t. ``q``;
the second charges the singular part. Values are Python floats with
``math.inf`` standing for ``+infinity``; ``0 * inf`` is taken to be 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimMismatch, InputError, MonotonicityViolation, UnknownGenerator
from .kernels import apply_to_measure

INF = math.inf


@dataclass(frozen=True)
class ConvexGenerator:
    name: str
    f: Callable[[float], float] = field(repr=False)
    f_at_0: float
    f_inf: float
    strictly_convex: bool
    f_at_1: float
    check_convexity: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if abs(self.f(1.0) - self.f_at_1) > 1e-12:
            raise InputError(f"{self.name}: f(1) = {self.f(1.0)!r}, declared {self.f_at_1!r}")
        if self.check_convexity:
            _midpoint_convex(self.f, self.name)

    def __call__(self, u: float) -> float:
        if u == 0.0:
            return self.f_at_0
        return self.f(u)


def _midpoint_convex(f, name: str, n: int = 1000, seed: int = 20240611) -> None:
    rng = np.random.default_rng(seed)
    # log-uniform over (1e-6, 1e6) so both ends of (0, inf) are probed
    xs = np.exp(rng.uniform(np.log(1e-6), np.log(1e6), size=(n, 2)))
    for x, y in xs:
        fx, fy, fm = f(x), f(y), f((x + y) / 2)
        if fm > (fx + fy) / 2 + 1e-9 * (1 + abs(fx) + abs(fy)):
            raise InputError(f"{name}: midpoint convexity fails between {x:.3g} and {y:.3g}")


def _tv(u):
    return abs(u - 1.0)


def _kl(u):
    return -math.log(u)


def _hellinger(u):
    return 1.0 - math.sqrt(u)


_BUILTINS = {
    "tv": dict(f=_tv, f_at_0=1.0, f_inf=1.0, strictly_convex=False, f_at_1=0.0),
    "kl": dict(f=_kl, f_at_0=INF, f_inf=0.0, strictly_convex=True, f_at_1=0.0),
    "hellinger": dict(f=_hellinger, f_at_0=1.0, f_inf=0.0, strictly_convex=True, f_at_1=0.0),
}
_CACHE: dict[str, ConvexGenerator] = {}


def builtin(name: str) -> ConvexGenerator:
    """Total variation ``|u - 1|``, relative entropy ``-log u`` or Hellinger ``1 - sqrt(u)``."""
    if name not in _BUILTINS:
        raise UnknownGenerator(f"unknown generator {name!r}; choose from {sorted(_BUILTINS)}")
    if name not in _CACHE:
        _CACHE[name] = ConvexGenerator(name=name, **_BUILTINS[name])
    return _CACHE[name]


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise DimMismatch(f"shapes {p.shape} and {q.shape}")
    return p, q


def f_divergence(gen: ConvexGenerator | str, p, q) -> float:
    if isinstance(gen, str):
        gen = builtin(gen)
    p, q = _pair(p, q)
    terms = []
    singular = []
    for pi, qi in zip(p.tolist(), q.tolist()):
        if qi > 0.0:
            if pi > 0.0:
                terms.append(qi * gen.f(pi / qi))
            elif gen.f_at_0 == INF:
                return INF
            else:
                terms.append(qi * gen.f_at_0)
        elif pi > 0.0:
            singular.append(pi)
    mass = math.fsum(singular)
    if mass > 0.0:
        if gen.f_inf == INF:
            return INF
        terms.append(mass * gen.f_inf)
    return math.fsum(terms)


def hellinger(p, q) -> float:
    return f_divergence(builtin("hellinger"), p, q)


def monotonicity_gap(gen: ConvexGenerator | str, p, q, nu) -> float:
    """``D_f(p, q) - D_f(p nu, q nu)``; ``+inf`` when the source divergence is infinite."""
    if isinstance(gen, str):
        gen = builtin(gen)
    before = f_divergence(gen, p, q)
    after = f_divergence(gen, apply_to_measure(nu, p), apply_to_measure(nu, q))
    if before == INF:
        return INF
    if after == INF:
        raise MonotonicityViolation("image divergence is infinite while the source one is finite")
    return before - after
