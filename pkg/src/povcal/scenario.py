"""JSON scenario files.

A scenario names observables, kernels and states::

    {
      "backend": "hilbert",            # or "tribe"; default "hilbert"
      "dim": 2,
      "tolerances": {"eq": 1e-8},      # optional, field names of povcal._config.Tolerances
      "observables": {
        "xi": {"labels": [0, 1], "atoms": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}
      },
      "kernels": {"nu": [[0.8, 0.2], [0.3, 0.7]]},
      "states": {"rho": [[0.5, 0], [0, 0.5]], "P": [0.5, 0.5]}
    }

Matrices are row-major lists of rows. A complex entry is written
``[re, im]``; a plain number is real. Under the Hilbert backend a state
given as a matrix is a density matrix and a flat list is a probability
vector (used by the divergence and sufficiency commands). Kernel rows follow
the sorted-label order of the source observable's atoms.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _config
from .effects import BACKENDS, HILBERT, State
from .errors import InputError
from .kernels import MarkovKernel
from .observables import Observable, make_observable


class ScenarioError(InputError):
    """Invalid scenario content; the message starts with the JSON location."""


def _entry(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise ScenarioError(f"{where}: expected a number or [re, im], got {value!r}")


def parse_matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ScenarioError(f"{where}: expected a matrix (list of rows)")
    rows = [[_entry(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(value)]
    if len({len(r) for r in rows}) != 1:
        raise ScenarioError(f"{where}: rows have different lengths")
    return np.array(rows, dtype=complex)


def parse_vector(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ScenarioError(f"{where}: expected a nonempty list of numbers")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ScenarioError(f"{where}[{i}]: expected a real number, got {x!r}")
        out.append(float(x))
    return np.array(out)


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def encode_observable(xi: Observable) -> dict:
    if xi.backend == HILBERT:
        atoms = [encode_matrix(a) for a in xi.atoms]
    else:
        atoms = [[float(v) for v in a] for a in xi.atoms]
    return {"labels": [float(x) for x in xi.labels], "atoms": atoms}


@dataclass
class Scenario:
    backend: str
    dim: int
    observables: dict[str, Observable] = field(default_factory=dict)
    kernels: dict[str, MarkovKernel] = field(default_factory=dict)
    states: dict[str, State] = field(default_factory=dict)
    distributions: dict[str, np.ndarray] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    def observable(self, name: str) -> Observable:
        return _lookup(self.observables, name, "observable")

    def kernel(self, name: str) -> MarkovKernel:
        return _lookup(self.kernels, name, "kernel")

    def state(self, name: str) -> State:
        return _lookup(self.states, name, "state")

    def distribution(self, name: str) -> np.ndarray:
        if name in self.distributions:
            return self.distributions[name]
        if name in self.states and self.states[name].backend != HILBERT:
            return np.array(self.states[name].data)
        raise ScenarioError(f"states.{name}: no probability vector of that name")

    def with_observable(self, name: str, xi: Observable) -> dict:
        """Raw JSON content with ``xi`` added under ``name``."""
        out = copy.deepcopy(self.raw)
        out.setdefault("observables", {})[name] = encode_observable(xi)
        return out


def _lookup(table: dict, name: str, kind: str):
    try:
        return table[name]
    except KeyError:
        raise ScenarioError(f"{kind}s.{name}: not defined (known: {sorted(table)})") from None


def tolerance_overrides(raw: dict) -> dict[str, float]:
    """Validated ``tolerances`` section (empty when absent)."""
    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ScenarioError("tolerances: expected an object")
    known = {f.name for f in dataclasses.fields(_config.Tolerances)}
    for key, value in tolerances.items():
        if key not in known:
            raise ScenarioError(f"tolerances.{key}: unknown tolerance (known: {sorted(known)})")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ScenarioError(f"tolerances.{key}: expected a positive number")
    return {k: float(v) for k, v in tolerances.items()}


def parse_scenario(raw: dict) -> Scenario:
    """Build every object of a scenario.

    Tolerance overrides are recorded but not applied; callers that want them
    in effect pass them to :func:`povcal._config.update` first.
    """
    if not isinstance(raw, dict):
        raise ScenarioError("$: top level must be an object")
    backend = raw.get("backend", HILBERT)
    if backend not in BACKENDS:
        raise ScenarioError(f"backend: must be one of {BACKENDS}, got {backend!r}")
    dim = raw.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ScenarioError(f"dim: expected a positive integer, got {dim!r}")
    tolerances = tolerance_overrides(raw)
    sc = Scenario(backend=backend, dim=dim, tolerances=dict(tolerances), raw=raw)

    for name, entry in _section(raw, "observables").items():
        where = f"observables.{name}"
        if not isinstance(entry, dict) or "labels" not in entry or "atoms" not in entry:
            raise ScenarioError(f"{where}: expected an object with 'labels' and 'atoms'")
        labels = parse_vector(entry["labels"], f"{where}.labels")
        if not isinstance(entry["atoms"], list):
            raise ScenarioError(f"{where}.atoms: expected a list")
        if backend == HILBERT:
            atoms = [parse_matrix(a, f"{where}.atoms[{i}]") for i, a in enumerate(entry["atoms"])]
        else:
            atoms = [parse_vector(a, f"{where}.atoms[{i}]") for i, a in enumerate(entry["atoms"])]
        for i, a in enumerate(atoms):
            if a.shape[0] != dim:
                raise ScenarioError(f"{where}.atoms[{i}]: dimension {a.shape[0]} differs from dim={dim}")
        try:
            sc.observables[name] = make_observable(list(labels), atoms, backend=backend)
        except InputError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc

    for name, rows in _section(raw, "kernels").items():
        where = f"kernels.{name}"
        m = parse_matrix(rows, where)
        if np.any(m.imag != 0):
            raise ScenarioError(f"{where}: kernel entries must be real")
        try:
            sc.kernels[name] = MarkovKernel(m.real)
        except InputError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc

    for name, value in _section(raw, "states").items():
        where = f"states.{name}"
        try:
            if backend == HILBERT and isinstance(value, list) and value and isinstance(value[0], list):
                m = parse_matrix(value, where)
                if m.shape[0] != dim:
                    raise ScenarioError(f"{where}: dimension {m.shape[0]} differs from dim={dim}")
                sc.states[name] = State.density(m)
            elif backend == HILBERT:
                sc.distributions[name] = State.probability(parse_vector(value, where)).data
            else:
                v = parse_vector(value, where)
                sc.states[name] = State.probability(v)
                sc.distributions[name] = np.array(sc.states[name].data)
        except ScenarioError:
            raise
        except InputError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
    return sc


def _section(raw: dict, key: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise ScenarioError(f"{key}: expected an object mapping names to values")
    return value


def read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror or exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return raw


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(read_json(path))


def save_scenario(raw: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(raw, indent=2, sort_keys=True) + "\n")
