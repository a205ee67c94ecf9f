import json

import pytest

from modergodic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_average_worked_example(capsys):
    code, rep = run_json(capsys, "average", "--n", "15", "--set-a", "{0,7}", "--poly", "n^2")
    assert code == 0 and rep["schema"] == 1
    assert rep["result"]["average"] == "2/225" and rep["result"]["product"] == "4/225"
    assert rep["result"]["deviation"] == "2/225" and rep["result"]["signed_deviation"] == "-2/225"


def test_coverage_counterexample(capsys):
    code, rep = run_json(capsys, "coverage", "--n", "9", "--set-a", "squares", "--set-b", "{0}", "--poly", "n^2")
    assert code == 0 and rep["result"]["covered"] is False and 3 in rep["result"]["missing"]


@pytest.mark.parametrize(
    "argv",
    [
        ["average", "--n", "35", "--set-a", "res(0,5)", "--poly", "5*n"],
        ["deviation-scan", "--n", "12", "--poly", "n^2"],
        ["deviation-scan", "--n", "40", "--mode", "sampled", "--samples", "500", "--seed", "3"],
        ["pkgoal", "--prime", "3", "--power", "3", "--set-a", "ap(0,2,7)"],
        ["expsum", "--n", "15", "--degree", "1"],
        ["expsum", "--n", "9", "--degree", "2", "--j", "3"],
        ["bounds", "--n", "15", "--kind", "lpf-bound", "--set-a", "{0,7}"],
        ["bounds", "--n", "77", "--kind", "vdc", "--set-a", "interval(30)", "--poly", "n^3"],
        ["bounds", "--n", "35", "--kind", "norm", "--set-a", "{0,1,5}", "--poly", "(n^2+n)/2"],
        ["bounds", "--n", "7", "--kind", "norm", "--signal", "1,-1,1/2,0,0,-1/2,0"],
        ["thresholds", "--poly", "n^2", "--mu-a", "1/2", "--mu-b", "1/2"],
        ["pair-count", "--n", "15", "--set-a", "{0,7}", "--set-b", "{0,8}"],
        ["waring", "--prime", "7", "--power", "2"],
        ["weil-count", "--prime", "7", "--poly", "n^2", "--c", "3"],
        ["counterexample", "--kind", "under", "--prime", "13", "--k", "2"],
        ["counterexample", "--kind", "nonpermutation", "--poly", "(n^3+2*n)/3"],
        ["counterexample", "--kind", "interval", "--n", "100"],
    ],
)
def test_roundtrip_verify_and_determinism(argv, capsys, tmp_path):
    code, first, _ = run(capsys, *argv)
    assert code == 0
    code2, second, _ = run(capsys, *argv)
    assert first == second
    path = tmp_path / "report.json"
    path.write_text(first)
    code, rep = run_json(capsys, "verify", str(path))
    assert code == 0 and rep["result"]["matches"] is True


def test_verify_detects_tampering(capsys, tmp_path):
    _, out, _ = run(capsys, "pair-count", "--n", "15", "--set-a", "{0,7}", "--set-b", "{0,8}")
    rep = json.loads(out)
    assert rep["result"]["epsilon_achieved"] == "3/4"
    rep["result"]["epsilon_achieved"] = "1/2"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(rep))
    code, res = run_json(capsys, "verify", str(path))
    assert code == 2 and res["result"]["mismatched_fields"] == ["epsilon_achieved"]


def test_worker_count_keeps_bytes(capsys):
    _, a, _ = run(capsys, "deviation-scan", "--n", "20", "--poly", "n^3", "--workers", "1")
    _, b, _ = run(capsys, "deviation-scan", "--n", "20", "--poly", "n^3", "--workers", "2")
    ja, jb = json.loads(a), json.loads(b)
    assert ja["result"] == jb["result"]


@pytest.mark.parametrize("fmt", ["csv", "text"])
def test_other_formats(fmt, capsys):
    code, out, _ = run(capsys, "average", "--n", "15", "--set-a", "{0,7}", "--output", fmt)
    assert code == 0 and "2/225" in out
    if fmt == "csv":
        assert out.splitlines()[0] == "field,value"


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["average", "--n", "15", "--set-a", "{0,7"], "column 5"),
        (["average", "--n", "15", "--poly", "n^2/2"], "not integer-valued"),
        (["average", "--n", "15", "--poly", "n^"], "column 3"),
        (["nonsense"], "invalid choice"),
        ([], "subcommand"),
        (["average"], "--n"),
        (["deviation-scan", "--n", "30", "--mode", "exhaustive"], "sampl"),
        (["counterexample", "--kind", "over", "--prime", "11"], "1 mod 4"),
        (["thresholds", "--eps", "x/y"], "rational"),
        (["reproduce"], "--all"),
    ],
)
def test_usage_errors_exit_one(argv, needle, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 1 and needle in err


def test_failed_check_exits_two(capsys):
    code, rep = run_json(capsys, "reproduce", "--criterion", "10")
    assert code == 2 and rep["result"]["criteria"][0]["passed"] is False


def test_reproduce_fast_criteria(capsys):
    code, rep = run_json(capsys, "reproduce", "--criterion", "1", "2", "8", "9", "11")
    assert code == 0 and all(c["passed"] for c in rep["result"]["criteria"])
