import json
import subprocess
import sys

import pytest

from regrep import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ring_info(capsys):
    code, out, _ = run(capsys, "ring-info", "--ring", "Fqt:p=2,f=1,r=3")
    info = json.loads(out)
    assert code == 0 and info["size"] == 8 and info["q"] == 2


@pytest.mark.parametrize("argv", [["ring-info", "--ring", "Zp:p=4,r=2"],
                                  ["ring-info", "--ring", "Zp;p=2"],
                                  ["orbits", "--ring", "Zp:p=2,r=3", "--n", "0"],
                                  ["construct", "--ring", "Zp:p=2,r=1", "--n", "2"],
                                  ["frobnicate"]])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_lemmas_all_pass(capsys):
    code, out, _ = run(capsys, "verify-lemmas", "--ring", "Zp:p=2,r=3", "--n", "2")
    ledger = json.loads(out)["ledger"]
    assert code == 0 and ledger
    assert not any(cli.is_failure(e) for e in ledger)


def test_verify_lemmas_filter(capsys):
    code, out, _ = run(capsys, "verify-lemmas", "--ring", "Zp:p=2,r=3", "--n", "2",
                       "--checks", "trace-duality")
    ledger = json.loads(out)["ledger"]
    assert code == 0 and ledger
    assert {e["lemma"] for e in ledger} == {"trace-duality"}


def test_construct_all_regular_sections(capsys):
    code, out, _ = run(capsys, "construct", "--ring", "Zp:p=2,r=3", "--n", "2")
    payload = json.loads(out)
    assert code == 0 and len(payload["reports"]) == 4


def test_construct_families_share_census_shape(capsys):
    shapes = []
    for spec in ("Zp:p=2,r=3", "Fqt:p=2,f=1,r=3"):
        code, out, _ = run(capsys, "construct", "--ring", spec, "--n", "2")
        assert code == 0
        shapes.append(sorted(sorted(p["degree"] for p in r["reps"]) for r in json.loads(out)["reports"]))
    assert shapes[0] == shapes[1]


def test_construct_compare_round_trip(capsys, tmp_path):
    census = tmp_path / "census.json"
    report = tmp_path / "report.json"
    assert run(capsys, "oracle", "--ring", "Zp:p=2,r=2", "--n", "2", "--dump", str(census))[0] == 0
    assert run(capsys, "construct", "--ring", "Zp:p=2,r=2", "--n", "2", "--out", str(report))[0] == 0
    code, out, _ = run(capsys, "compare", "--census", str(census), "--report", str(report))
    assert code == 0 and json.loads(out)["match"]


def test_compare_mismatch_exit_1(capsys, tmp_path):
    census = tmp_path / "census.json"
    report = tmp_path / "report.json"
    run(capsys, "oracle", "--ring", "Zp:p=2,r=2", "--n", "2", "--dump", str(census))
    run(capsys, "construct", "--ring", "Zp:p=2,r=2", "--n", "2", "--orbit", "charpoly=x^2+x+1",
        "--out", str(report))
    code, out, _ = run(capsys, "compare", "--census", str(census), "--report", str(report))
    assert code == 1 and not json.loads(out)["match"]


def test_cap_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("REGREP_CAP", "100")
    assert run(capsys, "oracle", "--ring", "Zp:p=2,r=3", "--n", "2")[0] == 3
    # an explicit flag wins over the environment
    assert run(capsys, "oracle", "--ring", "Zp:p=2,r=1", "--n", "2", "--cap", "1000")[0] == 0


def test_output_is_deterministic(capsys):
    argv = ["construct", "--ring", "Zp:p=2,r=3", "--n", "2", "--orbit", "charpoly=x^2+x+1"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second


def test_jobs_do_not_change_output(capsys):
    argv = ["construct", "--ring", "Zp:p=2,r=2", "--n", "2"]
    assert run(capsys, *argv)[1] == run(capsys, *argv, "--jobs", "2")[1]


def test_census_command(capsys):
    code, out, _ = run(capsys, "census", "--ring", "Zp:p=2,r=2", "--n", "2")
    assert code == 0 and json.loads(out)["verdict"]["match"]


def test_pretty_output(capsys):
    code, out, _ = run(capsys, "orbits", "--ring", "Zp:p=2,r=2", "--n", "2", "--pretty")
    assert code == 0 and "x^2+x+1" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "regrep.cli", "ring-info", "--ring", "Zp:p=3,r=2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["size"] == 9
