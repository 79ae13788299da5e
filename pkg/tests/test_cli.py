import json
from importlib import resources

import pytest

from hsdcodes.cli import EXIT_BUDGET, EXIT_INVALID, main

EXAMPLES = resources.files("hsdcodes") / "data" / "examples"


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_field_card(capsys):
    rc, out, _ = run(capsys, "field", "--q2", "9")
    card = json.loads(out)
    assert rc == 0 and (card["p"], card["q"], card["m"]) == (3, 3, 1)


def test_invalid_field(capsys):
    rc, _, err = run(capsys, "field", "--q2", "10")
    assert rc == EXIT_INVALID and "invalid_field" in err


def test_verify_example(capsys):
    rc, out, _ = run(capsys, "verify", str(EXAMPLES / "mds_gf64_12.json"))
    rep = json.loads(out)
    assert rc == 0 and rep["self_dual"] and rep["mds"]


def test_construct_then_mindist(capsys, tmp_path):
    path = tmp_path / "c.json"
    rc, _, _ = run(
        capsys, "construct", "--construction", "eq5", "--q2", "9", "--n", "5",
        "--ijkl", "1,0,2,1", "--abcd", "1,0,0,w^2", "--out", str(path),
    )
    assert rc == 0 and json.loads(path.read_text())["self_dual"]
    rc, out, _ = run(capsys, "mindist", str(path))
    assert rc == 0 and json.loads(out)["d"] == 6


def test_mindist_mds_fallback_and_budget(capsys):
    rc, out, err = run(capsys, "mindist", str(EXAMPLES / "mds_gf64_12.json"), "--budget", "10")
    assert rc == 0 and json.loads(out) == {"n": 12, "k": 6, "d": 7, "method": "mds_certificate"}
    assert "budget_exceeded" in err
    rc, _, _ = run(capsys, "mindist", str(EXAMPLES / "mp_gf4_56.json"), "--budget", "10")
    assert rc == EXIT_BUDGET


def test_malformed_input(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"q2": 9}')
    rc, _, err = run(capsys, "verify", str(path))
    assert rc == EXIT_INVALID and "malformed_input" in err


def test_unitary_stream(capsys):
    rc, out, _ = run(capsys, "unitary", "--q2", "9", "--n", "4", "--s", "1")
    lines = out.splitlines()
    assert rc == 0 and len(lines) == 16 and json.loads(lines[0])["ijkl"] == [0, 0, 0, 0]


def test_search_writes_csv(capsys, tmp_path):
    base = tmp_path / "res"
    rc, _, _ = run(capsys, "search", "--q2", "9", "--n", "4-5", "--s", "1", "--jobs", "1", "--out", str(base))
    assert rc == 0
    rows = (tmp_path / "res.csv").read_text().splitlines()
    assert len(rows) == 3 and rows[0].startswith("q2,n,length")
    assert len((tmp_path / "res.jsonl").read_text().splitlines()) == 2


def test_search_rejects_bad_plan(capsys):
    rc, _, err = run(capsys, "search", "--q2", "9", "--n", "3", "--jobs", "1")
    assert rc == EXIT_INVALID and "invalid_plan" in err


def test_reproduce(capsys):
    rc, out, err = run(capsys, "reproduce", "--table", "1", "--rows", "0-1")
    assert rc == 0 and json.loads(out)["counts"]["REPRODUCED_EXACT"] == 2
    assert '"summary"' in err


def test_missing_table_is_invalid(capsys):
    rc, _, _ = run(capsys, "reproduce", "--table", "42")
    assert rc == EXIT_INVALID


def test_argparse_errors():
    with pytest.raises(SystemExit):
        main(["unitary", "--q2", "9", "--n", "4", "--ijkl", "1,2"])
