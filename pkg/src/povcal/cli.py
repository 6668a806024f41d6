"""Command line front end: ``povcal <command> <scenario.json> [options]``.

Exit codes: 0 true/feasible/valid, 1 false/infeasible, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Callable

import numpy as np

from . import _config, divergences, order, sufficiency
from ._config import TOL
from .errors import (
    DegeneracyResolutionFailed,
    InputError,
    MonotonicityViolation,
    NotCommuting,
    NumericalFailure,
)
from .kernels import smear
from .scenario import (
    Scenario,
    ScenarioError,
    encode_matrix,
    encode_observable,
    parse_scenario,
    read_json,
    save_scenario,
    tolerance_overrides,
)

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_SEED = sufficiency.DEFAULT_SEED

EPILOG = """\
Kernel rows follow the sorted-label order of the source observable's atoms;
kernel columns follow the sorted-label order of the target observable.
Scenario files are JSON; complex matrix entries are written [re, im].
Exit codes: 0 true/feasible/valid, 1 false/infeasible, 2 input error,
3 numerical failure. POVCAL_TOL is used when --tol is not given.
"""


class Output:
    def __init__(self, as_json: bool, stream):
        self.as_json = as_json
        self.stream = stream

    def emit(self, payload: dict, lines: list[str]) -> None:
        if self.as_json:
            self.stream.write(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
        else:
            self.stream.write("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _fmt_rows(m) -> list[str]:
    return ["  [" + ", ".join(f"{v:.10g}" for v in row) + "]" for row in np.asarray(m)]


def _fmt_observable(xi) -> list[str]:
    lines = []
    for x, a in zip(xi.labels, xi.atoms):
        lines.append(f"  outcome {x:g}:")
        if xi.backend == "hilbert":
            lines += ["  " + r for r in _fmt_complex_rows(a)]
        else:
            lines.append("    " + ", ".join(f"{v:.10g}" for v in a))
    return lines


def _fmt_complex_rows(m) -> list[str]:
    def z(v):
        return f"{v.real:.10g}" if v.imag == 0 else f"{v.real:.10g}{v.imag:+.10g}j"

    return ["  [" + ", ".join(z(v) for v in row) + "]" for row in np.asarray(m)]


def _observable_payload(xi) -> dict:
    return encode_observable(xi)


def cmd_check(sc: Scenario, args, out: Output) -> int:
    payload = {
        "valid": True,
        "backend": sc.backend,
        "dim": sc.dim,
        "observables": sorted(sc.observables),
        "kernels": sorted(sc.kernels),
        "states": sorted(set(sc.states) | set(sc.distributions)),
    }
    lines = [f"valid {sc.backend} scenario, dim={sc.dim}"]
    for key in ("observables", "kernels", "states"):
        lines.append(f"  {key}: {', '.join(payload[key]) or '-'}")
    out.emit(payload, lines)
    return EXIT_TRUE


def cmd_smear(sc: Scenario, args, out: Output) -> int:
    xi = sc.observable(args.observable)
    nu = sc.kernel(args.kernel)
    eta = smear(xi, nu)
    name = args.name or f"{args.observable}_{args.kernel}"
    payload = {"name": name, "observable": _observable_payload(eta)}
    lines = [f"{name} = smear({args.observable}, {args.kernel}):"] + _fmt_observable(eta)
    if args.out:
        save_scenario(sc.with_observable(name, eta), args.out)
        payload["written"] = args.out
        lines.append(f"written to {args.out}")
    out.emit(payload, lines)
    return EXIT_TRUE


def _witness_payload(w) -> dict:
    return {
        "verdict": w.verdict,
        "witness": None if w.witness is None else w.witness.matrix,
        "residual": w.residual,
    }


def cmd_preorder(sc: Scenario, args, out: Output) -> int:
    w = order.preorder_leq(sc.observable(args.lhs), sc.observable(args.rhs))
    if w.holds:
        lines = [f"{args.lhs} <= {args.rhs}: witness kernel"] + _fmt_rows(w.witness.matrix)
        lines.append(f"residual {w.residual:.3e}")
    else:
        lines = ["INFEASIBLE"]
    out.emit(_witness_payload(w), lines)
    return EXIT_TRUE if w.holds else EXIT_FALSE


def cmd_equiv(sc: Scenario, args, out: Output) -> int:
    e = order.fuzzy_equivalent(sc.observable(args.lhs), sc.observable(args.rhs))
    payload = {
        "equivalent": e.equivalent,
        "forward": _witness_payload(e.forward),
        "backward": _witness_payload(e.backward),
    }
    lines = [
        f"{args.lhs} <= {args.rhs}: {e.forward.verdict}",
        f"{args.rhs} <= {args.lhs}: {e.backward.verdict}",
        "EQUIVALENT" if e.equivalent else "NOT EQUIVALENT",
    ]
    out.emit(payload, lines)
    return EXIT_TRUE if e.equivalent else EXIT_FALSE


def cmd_clean(sc: Scenario, args, out: Output) -> int:
    eta = sc.observable(args.observable)
    ranks = order.atom_ranks(eta)
    clean = order.is_clean(eta)
    payload = {"clean": clean, "atom_ranks": ranks}
    lines = [f"{args.observable}: {'CLEAN' if clean else 'NOT CLEAN'} (atom ranks {ranks})"]
    if args.witness:
        ev = order.clean_witness(eta)
        payload["refinement"] = _observable_payload(ev.refinement)
        payload["label_map"] = [[b, a] for b, a in sorted(ev.label_map.items())]
        payload["refinement_below"] = _witness_payload(ev.refinement_below)
        payload["eta_below"] = _witness_payload(ev.eta_below)
        lines.append(f"rank-one refinement with {len(ev.refinement)} atoms")
        lines.append(f"refinement <= {args.observable}: {ev.refinement_below.verdict}")
        lines.append(f"{args.observable} <= refinement: {ev.eta_below.verdict}")
    out.emit(payload, lines)
    return EXIT_TRUE if clean else EXIT_FALSE


def cmd_mother(sc: Scenario, args, out: Output) -> int:
    eta = sc.observable(args.observable)
    try:
        xi, nu = order.pvm_mother(eta)
    except NotCommuting as exc:
        out.emit({"verdict": "NOT_COMMUTING", "detail": str(exc)}, ["NOT_COMMUTING"])
        return EXIT_FALSE
    payload = {
        "verdict": "ok",
        "pvm": _observable_payload(xi),
        "kernel": nu.matrix,
        "residual": order.smearing_residual(xi, nu, eta),
    }
    lines = ["sharp observable:"] + _fmt_observable(xi) + ["kernel:"] + _fmt_rows(nu.matrix)
    out.emit(payload, lines)
    return EXIT_TRUE


def cmd_divergence(sc: Scenario, args, out: Output) -> int:
    p, q = sc.distribution(args.p), sc.distribution(args.q)
    value = divergences.f_divergence(divergences.builtin(args.f), p, q)
    out.emit({"generator": args.f, "value": value}, [f"D_{args.f}({args.p}, {args.q}) = {value!r}"])
    return EXIT_TRUE


def cmd_sufficiency(sc: Scenario, args, out: Output) -> int:
    nu = sc.kernel(args.kernel)
    names = [n for n in args.family.split(",") if n]
    family = [sc.distribution(n) for n in names]
    mixture = sufficiency.dominating_mixture(family)
    gaps = [sufficiency.hellinger_gap(nu, p, mixture) for p in family]
    vs_mixture = all(g <= TOL.suff for g in gaps)
    payload = {"family": names, "vs_mixture": vs_mixture, "hellinger_gaps": gaps}
    lines = [f"sufficient against the mixture: {vs_mixture} (max Hellinger gap {max(gaps):.3e})"]
    verdict = vs_mixture
    if args.blackwell:
        rec = sufficiency.blackwell_recovery(nu, family)
        payload["blackwell"] = rec is not None
        payload["recovery"] = None if rec is None else rec.matrix
        lines.append(f"Blackwell sufficient: {rec is not None}")
        if rec is not None:
            lines += ["recovery kernel:"] + _fmt_rows(rec.matrix)
        verdict = rec is not None
    out.emit(payload, lines)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_battery(sc: Scenario, args, out: Output) -> int:
    report = sufficiency.equivalence_battery(
        sc.observable(args.xi),
        sc.observable(args.eta),
        sc.kernel(args.kernel),
        sc.state(args.state),
        n_states=args.samples,
        seed=args.seed,
    )
    payload = report.to_dict()
    lines = [
        f"fuzzy equivalent         : {report.fuzzy_equivalent}",
        f"Blackwell sufficient     : {report.blackwell}",
        f"vs reference (evidence)  : {report.vs_mixture} (max gap {report.vs_mixture_max_gap:.3e})",
        f"pairwise (evidence)      : {report.pairwise} (max gap {report.pairwise_max_gap:.3e})",
        f"exact verdicts agree     : {report.agree}",
    ]
    out.emit(payload, lines)
    if not report.agree:
        return EXIT_NUMERIC
    return EXIT_TRUE if report.fuzzy_equivalent else EXIT_FALSE


COMMANDS: dict[str, Callable] = {
    "check": cmd_check,
    "smear": cmd_smear,
    "preorder": cmd_preorder,
    "equiv": cmd_equiv,
    "clean": cmd_clean,
    "mother": cmd_mother,
    "divergence": cmd_divergence,
    "sufficiency": cmd_sufficiency,
    "battery": cmd_battery,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="scenario JSON file")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol", type=float, default=None, help="scale factor for the equality/feasibility tolerances")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="sampling seed")

    parser = argparse.ArgumentParser(
        prog="povcal",
        description="Smearing, preorder and sufficiency checks for finite observables.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    sub.add_parser("check", parents=[common], help="validate every object", epilog=EPILOG, formatter_class=fmt)

    p = sub.add_parser("smear", parents=[common], help="smear an observable by a kernel", epilog=EPILOG, formatter_class=fmt)
    p.add_argument("--observable", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--out", help="write the scenario with the result added")
    p.add_argument("--name", help="name of the result in --out (default OBSERVABLE_KERNEL)")

    for name, text in (("preorder", "decide LHS <= RHS"), ("equiv", "decide fuzzy equivalence")):
        p = sub.add_parser(name, parents=[common], help=text, epilog=EPILOG, formatter_class=fmt)
        p.add_argument("--lhs", required=True)
        p.add_argument("--rhs", required=True)

    p = sub.add_parser("clean", parents=[common], help="rank-one (clean) test", epilog=EPILOG, formatter_class=fmt)
    p.add_argument("--observable", required=True)
    p.add_argument("--witness", action="store_true", help="attach the refinement and LP evidence")

    p = sub.add_parser("mother", parents=[common], help="sharp observable behind a commuting range", epilog=EPILOG, formatter_class=fmt)
    p.add_argument("--observable", required=True)

    p = sub.add_parser("divergence", parents=[common], help="f-divergence of two distributions", epilog=EPILOG, formatter_class=fmt)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--f", required=True, choices=["tv", "kl", "hellinger"])

    p = sub.add_parser("sufficiency", parents=[common], help="sufficiency of a kernel for a family", epilog=EPILOG, formatter_class=fmt)
    p.add_argument("--kernel", required=True)
    p.add_argument("--family", required=True, help="comma-separated probability-vector state names")
    p.add_argument("--blackwell", action="store_true", help="also solve for a recovery kernel")

    p = sub.add_parser("battery", parents=[common], help="sufficiency/equivalence report for a smearing", epilog=EPILOG, formatter_class=fmt)
    p.add_argument("--xi", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--state", required=True, help="faithful reference state")
    p.add_argument("--samples", type=int, default=16, help="random states sampled on top of the canonical ones")
    return parser


def _tolerance_scale(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("POVCAL_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise ScenarioError(f"POVCAL_TOL: not a number: {env!r}") from None
    return 1.0


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_TRUE
    out = Output(args.json, stdout)
    with _config.scaled(1.0):
        try:
            factor = _tolerance_scale(args)
            if not factor > 0:
                raise ScenarioError(f"--tol: expected a positive factor, got {factor}")
            raw = read_json(args.file)
            _config.update(**tolerance_overrides(raw))
            TOL.eq *= factor
            TOL.feas *= factor
            sc = parse_scenario(raw)
            return COMMANDS[args.command](sc, args, out)
        except InputError as exc:
            stderr.write(f"povcal: input error: {exc}\n")
            return EXIT_INPUT
        except (NumericalFailure, DegeneracyResolutionFailed, MonotonicityViolation) as exc:
            stderr.write(f"povcal: numerical failure: {exc}\n")
            return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
