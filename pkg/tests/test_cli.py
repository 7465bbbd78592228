import csv
import json
import math

import numpy as np
import pytest

from symspace import __version__, families
from symspace.cli import main
from symspace.stepfn import StepFunction, write_csv
from symspace.suites import FnSpecError, Options, parse_fn_spec, run_suite


# -- function specs ------------------------------------------------------------------


def test_fn_spec_kinds(tmp_path):
    r = parse_fn_spec("indicator:0,0.5")
    assert r.kind == "indicator" and r.function.equals(StepFunction.indicator(0.0, 0.5, 1.0))
    assert parse_fn_spec("const:2.5").function.equals(StepFunction.constant(2.5))
    r = parse_fn_spec("power:-0.25,400")
    assert r.function.equals(families.power_approximant(-0.25, 400))
    assert parse_fn_spec("power:-0.25").function.npieces == 201
    r = parse_fn_spec("invphi")
    assert r.params["k"] == 16.0 and r.function.values[0] == 16.0
    assert parse_fn_spec("invphi:k=4,m=50").function.equals(families.invphi_approximant(4.0, 50))
    f = families.random_step(np.random.default_rng(0), 5)
    path = tmp_path / "f.csv"
    write_csv(f, path)
    assert parse_fn_spec(f"csv:{path}").function.equals(f)
    a = parse_fn_spec("random-decreasing:3,12").function
    assert a.equals(parse_fn_spec("random-decreasing:3,12").function)
    assert a.is_nonincreasing() and a.npieces == 12


@pytest.mark.parametrize(
    "spec,position",
    [
        ("blob:1", 0),
        ("indicator:0", 10),
        ("indicator:0,zz", 12),
        ("indicator:0.7,0.2", 10),
        ("power:-0.5", 6),
        ("power:0.3,10", 6),
        ("invphi:q=3", 7),
        ("invphi:k=2,m=x", 11),
        ("invphi:k=0.5", 7),
        ("csv:", 4),
        ("csv:/nonexistent/file.csv", 4),
        ("random-decreasing:1.5,3", 18),
    ],
)
def test_fn_spec_errors_point_at_column(spec, position):
    with pytest.raises(FnSpecError) as exc:
        parse_fn_spec(spec)
    assert exc.value.position == position
    assert isinstance(exc.value, ValueError)


# -- run_suite ------------------------------------------------------------------------


def test_run_suite_examples():
    out = run_suite("extremizer", Options(trials=200, seed=7))
    assert len(out.cases) == 200 and all(c.status == "pass" for c in out.cases)
    names = [c.name for c in out.cases]
    assert names == sorted(names)
    with pytest.raises(KeyError):
        run_suite("nope")


@pytest.mark.slow
def test_run_suite_postcritical_defaults():
    out = run_suite("postcritical", Options(d=1, n=4096, trials=50))
    assert all(c.status == "pass" for c in out.cases)


def test_run_suite_is_thread_count_independent(monkeypatch):
    monkeypatch.setenv("SYMSPACE_THREADS", "1")
    a = run_suite("cesaro-claim", Options(trials=10, seed=3))
    monkeypatch.setenv("SYMSPACE_THREADS", "4")
    b = run_suite("cesaro-claim", Options(trials=10, seed=3))
    assert [c.as_dict() for c in a.cases] == [c.as_dict() for c in b.cases]


# -- command line ------------------------------------------------------------------------


def run_cli(args, capsys):
    code = main(args)
    return code, capsys.readouterr()


def test_cli_report_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, out = run_cli(["verify", "cesaro-claim", "--trials", "5", "--seed", "11", "--out", str(p)], capsys)
        assert code == 0
        assert "cesaro-claim: " in out.out
    a, b = (json.loads(p.read_text()) for p in paths)
    assert a["schema"] == 1 and a["suite"] == "cesaro-claim" and a["seed"] == 11
    assert a["version"] == __version__
    assert set(a) == {"schema", "suite", "seed", "version", "parameters", "summary", "cases", "wall_time"}
    assert a["summary"] == {"pass": len(a["cases"]), "fail": 0, "inconclusive": 0}
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_cli_suite_flag_and_fn(tmp_path, capsys):
    out_json = tmp_path / "r.json"
    code, _ = run_cli(["--suite", "from-below", "--fn", "indicator:0,0.5", "--out", str(out_json)], capsys)
    assert code == 0
    rep = json.loads(out_json.read_text())
    assert rep["parameters"]["fn"] == "indicator:0,0.5"
    assert [c["name"] for c in rep["cases"]] == ["fn"]


def test_cli_torus_csv(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, _ = run_cli(["verify", "cwikel-lower", "--fn", "invphi:k=8", "--n", "256", "--csv", str(path)], capsys)
    assert code == 0
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["case", "norm", "f_norm", "ratio", "n", "d", "converged_iters"]
    assert len(rows) == 3


def test_cli_spectrum_csv(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, _ = run_cli(["verify", "spectrum", "--n", "64", "--csv", str(path)], capsys)
    assert code == 0
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["k", "mu_k"] and len(rows) == 65
    assert math.isclose(float(rows[1][1]), 1.0)


def test_cli_default_csv(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, _ = run_cli(["verify", "orlicz-gate", "--csv", str(path)], capsys)
    assert code == 0
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["case", "lhs", "rhs", "margin", "status"] and len(rows) == 4


def test_cli_failure_exit_code(capsys):
    # a negative tolerance turns every equality into a failure
    code, out = run_cli(["verify", "norms", "--trials", "3", "--tol", "-1"], capsys)
    assert code == 1
    assert " fail" in out.out


def test_cli_usage_errors(capsys):
    for argv in (["verify"], [], ["--suite", "nope"], ["--n", "12", "--suite", "oneil"],
                 ["--fn", "blob:1", "--suite", "oneil"], ["verify", "oneil", "--suite", "norms"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_cli_runtime_error_exit_code(capsys):
    code, out = run_cli(["verify", "spectrum", "--n", "512"], capsys)
    assert code == 2
    assert "n <= 256" in out.err


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
