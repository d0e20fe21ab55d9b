import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from reinforced_ep.cli import main, parse_args

SCHEMA = json.loads(resources.files("reinforced_ep").joinpath("schemas", "output.schema.json").read_text())


def run(args, env=None):
    return subprocess.run([sys.executable, "-m", "reinforced_ep.cli", *args], capture_output=True, text=True,
                          env=env)


def test_parse_args_valid():
    a = parse_args(["simulate", "--p", "0.5", "--n", "1000", "--seed", "7"])
    assert (a.command, a.p, a.n, a.seed) == ("simulate", 0.5, 1000, 7)


@pytest.mark.parametrize("argv", [["simulate", "--p", "1.5", "--n", "10"], ["simulate", "--p", "0.5"],
                                  ["moments", "--p", "0.5", "--n", "10", "--bogus"], ["nope"],
                                  ["empirical", "--p", "0.5", "--n", "2.5"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == 2


def test_moments_csv(capsys):
    assert main(["moments", "--p", "0.5", "--n", "10"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["n", "expected_s2"]
    assert len(rows) == 11
    assert float(rows[1][1]) == 1.0
    assert float(rows[4][1]) == pytest.approx(25 / 3)


def test_empirical_csv_endpoints_and_determinism():
    args = ["empirical", "--p", "0.25", "--n", "100", "--seed", "1", "--grid", "5"]
    a, b = run(args), run(args)
    assert a.returncode == 0 and a.stdout == b.stdout
    rows = list(csv.reader(io.StringIO(a.stdout)))
    assert rows[0] == ["x", "value"] and len(rows) == 6
    assert float(rows[1][1]) == 0.0 and float(rows[-1][1]) == 0.0
    assert "sup_norm=" in a.stderr


def test_floats_round_trip(capsys):
    main(["empirical", "--p", "0.3", "--n", "1000", "--seed", "2", "--grid", "17", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    main(["empirical", "--p", "0.3", "--n", "1000", "--seed", "2", "--grid", "17"])
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))[1:]
    assert [float(v) for _, v in rows] == [v for _, v in doc["rows"]]


@pytest.mark.parametrize("argv", [
    ["simulate", "--p", "0.5", "--n", "500", "--checkpoints", "10,500", "--replicates", "2"],
    ["moments", "--p", "0.75", "--n", "5"],
    ["empirical", "--p", "0.5", "--n", "200", "--grid", "9"],
    ["bridge", "--grid", "5", "--replicates", "2"],
    ["bridge", "--kind", "bp", "--p", "0.75", "--n", "10000", "--grid", "5"],
    ["regime-scan", "--p", "0.25", "--checkpoints", "100,1000,10000,100000", "--replicates", "10"],
    ["yule", "--p", "0.5", "--replicates", "5"],
    ["walk", "--p", "0.5", "--n", "1000", "--replicates", "20"],
])
def test_json_outputs_validate_and_repeat(argv, capsys):
    main([*argv, "--format", "json", "--seed", "3"])
    first = capsys.readouterr().out
    main([*argv, "--format", "json", "--seed", "3", "--workers", "2"])
    assert capsys.readouterr().out == first
    jsonschema.validate(json.loads(first), SCHEMA)


def test_csv_reports_and_walk_rows(capsys):
    main(["walk", "--p", "0.25", "--n", "100", "--replicates", "4", "--seed", "5"])
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["replicate", "n", "S_hat"] and len(rows) == 5
    main(["yule", "--p", "0.5", "--replicates", "3"])
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0][:3] == ["test", "statistic", "estimate"] and rows[1][-1] in ("true", "false")


def test_seed_from_environment():
    import os
    env = dict(os.environ, REINFORCED_EP_SEED="11")
    a = run(["simulate", "--p", "0.5", "--n", "300"], env=env)
    b = run(["simulate", "--p", "0.5", "--n", "300", "--seed", "11"])
    assert a.returncode == 0 and a.stdout == b.stdout
    bad = run(["simulate", "--p", "0.5", "--n", "300"], env=dict(os.environ, REINFORCED_EP_SEED="x"))
    assert bad.returncode == 2


def test_runtime_error_exit_1(tmp_path):
    r = run(["bridge", "--kind", "bp", "--grid", "3"])
    assert r.returncode == 1 and "error" in r.stderr
    r = run(["moments", "--p", "0.5", "--n", "3", "--out", str(tmp_path / "missing" / "x.csv")])
    assert r.returncode == 1


def test_out_file(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["moments", "--p", "0.5", "--n", "3", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "n,expected_s2"


def test_accept_single_criterion(capsys):
    status = main(["accept", "--profile", "quick", "--only", "10", "--format", "json"])
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    jsonschema.validate(doc, SCHEMA)
    assert status == 0 and doc["passed"] and doc["profile"] == "quick"
    assert "criterion 10" in captured.err
