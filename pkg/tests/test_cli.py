import json
import random

import pytest

from deltahecke.cli import main, run
from deltahecke.deltaseries import DeltaSeries1, DeltaSeries2
from deltahecke.qseries import LaurentSeries
from deltahecke.symmetry import SymmetricProfile

from conftest import rand_series


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def coeffs(tmp_path):
    code, tr = run(["divisor-sum", "--p", "5", "--N", "11", "--nmax", "300",
                    "--out", str(tmp_path / "a.json")])
    assert code == 0
    return str(tmp_path / "a.json")


def test_divisor_sum_file(tmp_path, coeffs):
    vals = json.loads(open(coeffs).read())
    assert len(vals) == 300 and vals[5] == 12 and vals[10] == 1
    code, tr = run(["divisor-sum", "--nmax", "12"])
    assert code == 0 and tr["result"]["coeffs"][5] == 12


def test_sharp2_then_check_eigen(tmp_path, coeffs):
    out = str(tmp_path / "s2.json")
    code, tr = run(["sharp2", "--p", "5", "--N", "11", "--kappa", "0", "--prec", "60",
                    "--coeffs", coeffs, "--out", out])
    assert code == 0 and tr["pass"]
    code, tr = run(["check-eigen", "--input", out, "--coeffs", coeffs])
    assert code == 0
    names = [c["check"] for c in tr["checks"]]
    assert "pT(p)" in names
    code, tr = run(["decompose", "--input", out, "--coeffs", coeffs])
    assert code == 0 and tr["result"]["c_list"][0] == 1


def test_check_eigen_failure(tmp_path, coeffs):
    f = DeltaSeries1(5, {0: LaurentSeries(5, {1: 1, 2: 1}, 40)})
    path = write(tmp_path, "f.json", f.to_json())
    code, tr = run(["check-eigen", "--input", path, "--coeffs", coeffs])
    assert code == 1 and not tr["pass"]
    code, tr = run(["decompose", "--input", path, "--coeffs", coeffs])
    assert code == 1


def test_usage_errors(tmp_path):
    assert run(["divisor-sum", "--p", "4"])[0] == 2
    assert run(["divisor-sum", "--N", "10", "--p", "5"])[0] == 2
    assert run(["divisor-sum", "--N", "3"])[0] == 2
    assert run(["sharp2"])[0] == 2
    assert run(["no-such-command"])[0] == 2
    assert run(["hecke", "--input", str(tmp_path / "missing.json"), "--n", "2"])[0] == 2


def test_hecke_commands(tmp_path):
    f = DeltaSeries1(5, {0: LaurentSeries(5, {1: 1, 2: 3}, 30)})
    path = write(tmp_path, "f.json", f.to_json())
    code, tr = run(["hecke", "--input", path, "--n", "1"])
    assert code == 0 and DeltaSeries1.from_json(tr["result"]["series"]) == f
    assert run(["hecke", "--input", path, "--n", "5"])[0] == 2
    g = DeltaSeries2(5, {(0, 1): LaurentSeries(5, {2: 1}, 20)})
    path2 = write(tmp_path, "g.json", g.to_json())
    code, tr = run(["hecke2", "--input", path2, "--n", "2", "--kappa", "0"])
    assert code == 0
    assert set(tr["result"]["series"]["components"]) == {"0,1", "5,0", "10,0"}


def test_pu_and_oracle_identical(tmp_path):
    rng = random.Random(1)
    prof = SymmetricProfile(5, rand_series(rng, 5, 0, 10, 11),
                            {0: rand_series(rng, 5, 1, 10, 11),
                             1: rand_series(rng, 5, 1, 10, 11)})
    path = write(tmp_path, "f.json", prof.to_series().to_json())
    c1, t1 = run(["pu", "--input", path, "--max-weight", "30", "--oracle"])
    c2, t2 = run(["oracle-pu", "--input", path, "--max-weight", "30"])
    assert c1 == 0 and c2 == 0
    assert t1["checks"][0]["pass"]
    assert json.dumps(t1["result"]["series"], sort_keys=True) == \
        json.dumps(t2["result"]["series"], sort_keys=True)
    c3, t3 = run(["ptp", "--input", path, "--max-weight", "30", "--oracle"])
    assert c3 == 0
    code, tr = run(["decompose-symmetric", "--input", path])
    assert code == 0 and tr["result"]["symmetric"] and tr["result"]["taylor"]


def test_pu_not_symmetric(tmp_path):
    f = DeltaSeries1(5, {2: LaurentSeries(5, {12: 1}, 30)})
    path = write(tmp_path, "f.json", f.to_json())
    assert run(["pu", "--input", path])[0] == 1
    code, tr = run(["decompose-symmetric", "--input", path])
    assert code == 0 and tr["result"] == {"symmetric": False}


def test_lift_and_reduce(tmp_path):
    a = str(tmp_path / "a.json")
    assert run(["divisor-sum", "--nmax", "1000", "--out", a])[0] == 0
    out = str(tmp_path / "lift.json")
    code, tr = run(["lift", "--coeffs", a, "--prec", "40", "--check-knacond", "--out", out])
    assert code == 0 and tr["pass"]
    assert tr["checks"][1]["min_valuation_seen"] == -2
    code, tr2 = run(["reduce", "--input", out, "--prec", "40"])
    assert code == 0
    assert tr2["result"]["series"] == tr["result"]["reduced"]


def test_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DELTAHECKE_OUT", str(tmp_path))
    code, tr = run(["divisor-sum", "--nmax", "10", "--out", "x.json"])
    assert code == 0 and (tmp_path / "x.json").exists()


def test_main_prints_deterministic_json(capsys):
    assert main(["divisor-sum", "--nmax", "10"]) == 0
    first = capsys.readouterr().out
    assert main(["divisor-sum", "--nmax", "10"]) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["pass"] is True
