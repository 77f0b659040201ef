import io
import json
import math
import subprocess
import sys

import pytest

from spatial_ntr.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_eppf_dirichlet_pair():
    code, out = run("eppf", "--family", "dirichlet_gen:theta=1", "--sizes", "1,1")
    assert code == 0
    value = float(next(line for line in out.splitlines() if line.startswith("eppf:")).split(":")[1])
    assert value == pytest.approx(0.5, rel=1e-14)


def test_eppf_all_ties_stable():
    code, out = run("eppf", "--family", "generalized_gamma:alpha=0.5,b=0", "--sizes", "2")
    value = float(next(line for line in out.splitlines() if line.startswith("eppf:")).split(":")[1])
    assert code == 0 and value == pytest.approx(math.sqrt(2) - 1, rel=1e-13)


def test_eppf_orderings_and_composition():
    code, out = run("eppf", "--family", '{"kind":"dirichlet_gen","theta":1}', "--sizes", "2,1")
    rows = [line.split(",") for line in out.splitlines() if line[:1].isdigit()]
    assert code == 0 and [r[0] for r in rows] == ["1-2", "2-1"]
    code, out = run("eppf", "--family", "dirichlet_gen:theta=1", "--sizes", "1,1", "--ordered")
    assert "composition_probability: 0.5" in out.replace("0.49999999999999994", "0.5")


@pytest.mark.parametrize(
    "argv",
    [
        ("eppf", "--sizes", ""),
        ("eppf", "--sizes", "1,x"),
        ("eppf", "--family", "nonsense", "--sizes", "1"),
        ("eppf",),
        ("sample", "-n", "2"),
        ("sample", "-n", "0", "--seed", "1"),
        ("posterior", "survival", "--data", "/nonexistent.csv", "--grid", "0:1:2"),
        ("verify", "--family", "beta_process:theta=1"),
        ("moments", "-n", "2", "--draws", "10"),
        ("sample", "-n", "2", "--seed", "1", "--workers", "0"),
    ],
)
def test_usage_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_numeric_error_exit_3(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("time\n2\n5\n")
    code, _ = run("posterior", "survival", "--family", "gg:alpha=0.5,b=0", "--data", str(data),
                  "--grid", "0:6:3", "--simulate", "10", "--eps", "1e-8", "--seed", "1")
    assert code == 3


def test_sample_jsonl_deterministic():
    argv = ("sample", "--family", "gg:alpha=0.5,b=0", "--baseline", "weibull", "-n", "4", "--draws", "5",
            "--seed", "9", "--with-jumps")
    code, a = run(*argv)
    _, b = run(*argv)
    _, c = run(*argv, "--workers", "3")
    assert code == 0 and a == b == c
    lines = [json.loads(x) for x in a.splitlines()]
    assert lines[0]["meta"]["seed"] == 9 and lines[0]["meta"]["family"]["kind"] == "generalized_gamma"
    for rec in lines[1:]:
        assert set(rec) == {"m", "times", "marks", "jumps"}
        assert sum(rec["m"]) == 4 and len(rec["times"]) == len(rec["m"]) == len(rec["jumps"])


def test_sample_partition_records():
    code, out = run("sample-partition", "--family", "pd:alpha=0.3,theta=1", "-n", "5", "--draws", "3", "--seed", "2")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and lines[0]["meta"]["seed"] == 2
    for rec in lines[1:]:
        assert set(rec) == {"m", "labels"} and len(rec["labels"]) == 5
        assert [rec["labels"].count(j + 1) for j in range(len(rec["m"]))] == rec["m"]


def test_posterior_survival_small_c_is_kaplan_meier(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("time,mark\n2,a\n2,b\n5,c\n")
    code, out = run("posterior", "survival", "--family", "beta_process:theta=1e-6", "--data", str(data),
                    "--grid", "2:5:4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# ") and lines[1] == "time,mean_survival"
    values = [tuple(map(float, x.split(","))) for x in lines[2:]]
    km = {2.0: 1 / 3, 3.0: 1 / 3, 4.0: 1 / 3, 5.0: 0.0}
    for t, s in values:
        assert s == pytest.approx(km[t], abs=1e-4)


def test_posterior_survival_simulation_columns(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("time\n2\n2\n5\n")
    argv = ("posterior", "survival", "--family", "beta_process:theta=1", "--data", str(data), "--grid", "0:6:4",
            "--simulate", "500", "--eps", "1e-6", "--seed", "3")
    code, a = run(*argv)
    _, b = run(*argv)
    assert code == 0 and a == b
    meta = json.loads(a.splitlines()[0][2:])
    assert meta["seed"] == 3 and meta["family"] == {"kind": "beta_process", "theta": 1.0}
    assert a.splitlines()[1] == "time,mean_survival,mc_mean,mc_stderr"
    code, js = run(*argv, "--format", "json")
    assert set(json.loads(js)["columns"]) == {"time", "mean_survival", "mc_mean", "mc_stderr"}


def test_moments_closed_form_and_mc():
    code, out = run("moments", "--family", "generalized_gamma:alpha=0.5,b=0", "-n", "3")
    row = out.splitlines()[2].split(",")
    assert code == 0 and float(row[1]) == pytest.approx(math.sqrt(6), rel=1e-14)
    code, out = run("moments", "--family", "generalized_gamma:alpha=0.5,b=0", "-n", "3", "--draws", "20000",
                    "--seed", "1")
    assert out.splitlines()[1] == "n,closed_form,mc_mean,mc_stderr"


def test_verify_deterministic_and_json(tmp_path):
    code, a = run("verify", "--suite", "quick", "--seed", "7")
    _, b = run("verify", "--suite", "quick", "--seed", "7")
    assert code == 0 and a == b and "failed" in a.splitlines()[-1]
    path = tmp_path / "r.json"
    run("verify", "--suite", "quick", "--seed", "7", "--json", str(path))
    doc = json.loads(path.read_text())
    assert doc["passed"] is True and doc["meta"]["seed"] == 7 and doc["reports"]


def test_verify_failure_exit_1():
    code, out = run("verify", "--family", "beta_process:theta=1", "--suite", "quick", "--seed", "7",
                    "--tol", "sum of EPPF=0")
    # exact-zero tolerance cannot be met by every floating-point sum
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spatial_ntr", "eppf", "--sizes", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "eppf: 1.0" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "spatial_ntr", "eppf", "--sizes", ""], capture_output=True, text=True)
    assert proc.returncode == 2


def test_baseline_shorthand_and_json_agree():
    from spatial_ntr.baseline import WeibullHazard, parse_baseline
    from spatial_ntr.errors import ConfigurationError

    short = parse_baseline("weibull:shape=2,scale=1.5")
    full = parse_baseline('{"hazard": "weibull", "shape": 2, "scale": 1.5}')
    assert short.hazard == full.hazard == WeibullHazard(2.0, 1.5)
    assert parse_baseline("identity").is_identity
    for bad in ("weibull:shape", "gompertz", "{bad json"):
        with pytest.raises(ConfigurationError):
            parse_baseline(bad)
    code, out = run("sample", "--baseline", "weibull:shape=2,scale=1.5", "-n", "2", "--draws", "1", "--seed", "1")
    assert code == 0 and json.loads(out.splitlines()[0])["meta"]["baseline"]["hazard"] == "weibull"
