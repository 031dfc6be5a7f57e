import csv
import io
import json
import subprocess
import sys

import pytest

from seqrac import cli, serialize
from seqrac.scenario import ideal_strategy


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_grid_parse():
    g = cli.Grid.parse("0:1:5")
    assert list(g.values()) == [0, 0.25, 0.5, 0.75, 1]
    for bad in ("0:1", "a:1:3", "0:1:1"):
        with pytest.raises(cli.ParseFailure):
            cli.Grid.parse(bad)


def test_run_config_validation():
    with pytest.raises(cli.ParseFailure):
        cli.RunConfig("nope")
    with pytest.raises(cli.ParseFailure):
        cli.RunConfig("sweep", budget=-1)


def test_sweep_csv(capsys):
    code, out, _ = run(["sweep", "--grid", "0:1:3"], capsys)
    assert code == 0
    rows = rows_of(out)
    assert rows[0] == ["eta", "a_ab", "a_ac", "bound", "slack", "classical_bound", "double_violation"]
    assert len(rows) == 4
    assert rows[3][1] == "0.788675134595"
    assert {r[6] for r in rows[1:]} == {"0"}
    assert "\r" not in out


def test_tradeoff_with_and_without_optimizer(capsys):
    _, out, _ = run(["tradeoff", "--grid", "0.5:0.75:3"], capsys)
    assert rows_of(out)[0] == ["a_ab", "bound", "classical_ac"]
    _, out, _ = run(["tradeoff", "--grid", "0.5:0.75:3", "--budget", "2000"], capsys)
    rows = rows_of(out)
    assert rows[0][-4:] == ["optimized_ac", "gap", "evaluations", "seed"]
    assert all(abs(float(r[4])) < 1e-3 for r in rows[1:])


def test_certify_json(capsys):
    code, out, _ = run(["certify", "0.6425", "0.7156"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["eta_lo"] == pytest.approx(0.4936, abs=1e-4)
    assert doc["eta_hi"] == pytest.approx(0.7844, abs=1e-3)


def test_certify_exit_codes(capsys):
    code, _, err = run(["certify", "0.78", "0.78"], capsys)
    assert code == cli.EXIT_INFEASIBLE and "infeasible" in err
    code, _, _ = run(["certify", "1.5", "0.7"], capsys)
    assert code == cli.EXIT_INFEASIBLE
    code, _, _ = run(["certify", "abc", "0.7"], capsys)
    assert code == cli.EXIT_PARSE


def test_chain(capsys):
    code, out, _ = run(["chain", "3"], capsys)
    rows = rows_of(out)
    assert code == 0 and len(rows) == 4
    assert float(rows[2][1]) == pytest.approx(0.596225, abs=1e-6)
    assert run(["chain", "0"], capsys)[0] == cli.EXIT_INFEASIBLE


def test_unknown_command_and_bad_grid(capsys):
    assert run(["bogus"], capsys)[0] == cli.EXIT_PARSE
    assert run(["sweep", "--grid", "0:1"], capsys)[0] == cli.EXIT_PARSE
    assert run(["sweep", "--seed", "x"], capsys)[0] == cli.EXIT_PARSE


def test_selftest_round_trip(tmp_path, capsys):
    path = tmp_path / "s.json"
    assert run(["strategy", "--eta", "0.6", "--rotate", "--seed", "3", "--out", str(path)], capsys)[0] == 0
    code, out, _ = run(["selftest", str(path)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "PASS"
    assert doc["eta"] == pytest.approx(0.6, abs=1e-9)


def test_selftest_errors(tmp_path, capsys):
    assert run(["selftest", str(tmp_path / "missing.json")], capsys)[0] == cli.EXIT_IO
    bad = tmp_path / "bad.json"
    doc = serialize.strategy_to_dict(ideal_strategy())
    doc["preparations"][4] = [1.0, 1.0, 1.0]
    bad.write_text(json.dumps(doc))
    code, _, err = run(["selftest", str(bad)], capsys)
    assert code == cli.EXIT_PARSE
    assert "$.preparations[4]" in err


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "no" / "such" / "dir" / "out.csv"
    assert run(["sweep", "--grid", "0:1:2", "--out", str(target)], capsys)[0] == cli.EXIT_IO


def test_frontier_ties_go_to_lowest_seed(capsys):
    _, a, _ = run(["frontier", "--grid", "0.6:0.7:2", "--budget", "500", "--seed", "2,1"], capsys)
    _, b, _ = run(["frontier", "--grid", "0.6:0.7:2", "--budget", "500", "--seed", "1,2"], capsys)
    assert a == b


def test_json_format_for_tables(capsys):
    _, out, _ = run(["sweep", "--grid", "0:1:2", "--format", "json"], capsys)
    doc = json.loads(out)
    assert doc["columns"][0] == "eta" and len(doc["rows"]) == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "seqrac", "chain", "2"], capture_output=True, text=True, check=True
    )
    assert out.stdout.startswith("decoder,")
