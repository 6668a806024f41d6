import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from povcal import cli
from povcal._config import TOL

DEMO = Path(__file__).resolve().parents[1] / "demos" / "demo.json"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    return code, json.loads(out) if out else None


@pytest.fixture
def scenario(tmp_path):
    def write(raw):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(raw))
        return path

    return write


def test_check():
    code, payload = run_json("check", DEMO)
    assert code == 0 and payload["valid"] and payload["dim"] == 2


def test_smear_round_trip(tmp_path):
    out = tmp_path / "with_eta.json"
    code, payload = run_json("smear", DEMO, "--observable", "xi", "--kernel", "nu", "--out", out, "--name", "made")
    assert code == 0 and payload["name"] == "made"
    code, payload = run_json("equiv", out, "--lhs", "made", "--rhs", "eta")
    assert code == 0 and payload["equivalent"]


@pytest.mark.parametrize(
    "lhs, rhs, code",
    [("xi", "eta", 0), ("eta", "xi", 1), ("eta", "trivial", 0), ("xi", "tilted", 1)],
)
def test_preorder_exit_codes(lhs, rhs, code):
    got, out, _ = run("preorder", DEMO, "--lhs", lhs, "--rhs", rhs)
    assert got == code
    if code == 1:
        assert out.strip() == "INFEASIBLE"


def test_preorder_witness_in_json():
    code, payload = run_json("preorder", DEMO, "--lhs", "xi", "--rhs", "eta")
    np.testing.assert_allclose(payload["witness"], [[0.8, 0.2], [0.3, 0.7]], atol=1e-9)
    assert payload["verdict"] == "holds"


def test_equiv_swap(tmp_path):
    out = tmp_path / "s.json"
    run("smear", DEMO, "--observable", "xi", "--kernel", "swap", "--out", out)
    assert run("equiv", out, "--lhs", "xi", "--rhs", "xi_swap")[0] == 0
    assert run("equiv", DEMO, "--lhs", "xi", "--rhs", "eta")[0] == 1


def test_clean():
    code, payload = run_json("clean", DEMO, "--observable", "trivial", "--witness")
    assert code == 1 and payload["atom_ranks"] == [2]
    assert payload["refinement_below"]["verdict"] == "holds"
    assert payload["eta_below"]["verdict"] == "fails"
    assert run("clean", DEMO, "--observable", "tilted")[0] == 0


def test_mother():
    code, payload = run_json("mother", DEMO, "--observable", "eta")
    assert code == 0 and payload["residual"] <= 1e-12
    code, out, _ = run("mother", DEMO, "--observable", "noncommuting")
    assert code == 1 and out.strip() == "NOT_COMMUTING"


def test_divergence_infinite_is_a_string():
    code, payload = run_json("divergence", DEMO, "--p", "Q", "--q", "P", "--f", "kl")
    assert code == 0 and payload["value"] == "inf"
    code, payload = run_json("divergence", DEMO, "--p", "P", "--q", "Q", "--f", "kl")
    assert payload["value"] == pytest.approx(np.log(2))
    code, payload = run_json("divergence", DEMO, "--p", "Q", "--q", "R", "--f", "tv")
    assert payload["value"] == 2.0


def test_sufficiency():
    code, payload = run_json("sufficiency", DEMO, "--kernel", "swap", "--family", "Q,R", "--blackwell")
    assert code == 0 and payload["blackwell"] and payload["vs_mixture"]
    code, payload = run_json("sufficiency", DEMO, "--kernel", "nu", "--family", "Q,R", "--blackwell")
    assert code == 1 and not payload["blackwell"]


def test_battery():
    code, payload = run_json("battery", DEMO, "--xi", "xi", "--eta", "eta", "--kernel", "nu", "--state", "rho")
    assert code == 1 and payload["agree"] and not payload["fuzzy_equivalent"]
    assert payload["seed"] == cli.DEFAULT_SEED


def test_battery_rejects_unfaithful_state(scenario):
    raw = json.loads(DEMO.read_text())
    raw["states"]["pure"] = [[1, 0], [0, 0]]
    code, _, err = run("battery", scenario(raw), "--xi", "xi", "--eta", "eta", "--kernel", "nu", "--state", "pure")
    assert code == 2 and "input error" in err


@pytest.mark.parametrize(
    "mutate",
    [
        lambda r: r["observables"]["xi"].update(atoms=[[[1, 0], [0, 0]], [[0, 0], [0, 0.5]]]),
        lambda r: r["kernels"].update(nu=[[0.5, 0.6], [0.3, 0.7]]),
        lambda r: r.update(backend="banach"),
        lambda r: r["observables"]["xi"].update(labels=[0, 0]),
    ],
)
def test_invalid_scenarios_exit_2(scenario, mutate):
    raw = json.loads(DEMO.read_text())
    mutate(raw)
    code, _, err = run("check", scenario(raw))
    assert code == 2 and err.startswith("povcal: input error")


def test_unknown_name_and_missing_file(tmp_path):
    assert run("preorder", DEMO, "--lhs", "nope", "--rhs", "xi")[0] == 2
    assert run("check", tmp_path / "missing.json")[0] == 2


def test_bad_arguments():
    assert run("divergence", DEMO, "--p", "P", "--q", "Q", "--f", "chi2")[0] == 2
    assert run("frobnicate", DEMO)[0] == 2


def test_tolerance_scaling_is_scoped(monkeypatch):
    before = TOL.eq
    assert run("check", DEMO, "--tol", "10")[0] == 0
    monkeypatch.setenv("POVCAL_TOL", "abc")
    assert run("check", DEMO)[0] == 2
    assert TOL.eq == before
    assert run("check", DEMO, "--tol", "-1")[0] == 2


def test_tolerance_scale_accepts_slightly_off_normalization(scenario):
    raw = json.loads(DEMO.read_text())
    raw["observables"]["xi"]["atoms"][1][1][1] = 1 - 5e-8
    path = scenario(raw)
    assert run("check", path)[0] == 2
    assert run("check", path, "--tol", "10")[0] == 0


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "povcal", "preorder", str(DEMO), "--lhs", "eta", "--rhs", "xi"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 1 and res.stdout.strip() == "INFEASIBLE"


def test_json_reports_are_byte_stable():
    argv = ("battery", DEMO, "--xi", "xi", "--eta", "eta", "--kernel", "nu", "--state", "rho", "--json", "--seed", "11")
    assert run(*argv)[1] == run(*argv)[1]


def test_hellinger_of_identical_distributions_is_zero():
    code, out, _ = run("divergence", DEMO, "--p", "P", "--q", "P", "--f", "hellinger")
    assert code == 0 and out.strip().endswith("= 0.0")
