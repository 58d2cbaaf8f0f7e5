import csv
import io
import json
import subprocess
import sys


from qekr import audit, lattice
from qekr import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_qbinom(capsys):
    assert run(capsys, "qbinom", "4", "2", "--q", "2")[:2] == (0, "35\n")


def test_formula(capsys):
    code, out, _ = run(capsys, "formula", "g2", "--q", "2", "--n", "6", "--l", "2", "--t", "1")
    assert (code, out) == (0, "35\n")
    code, _, err = run(capsys, "formula", "g9", "--q", "2")
    assert code == 2 and "unknown formula" in err
    code, _, err = run(capsys, "formula", "g2", "--q", "2", "--n", "6")
    assert code == 2


def test_construct_and_size_check(capsys):
    code, out, _ = run(capsys, "construct", "B", "--q", "2", "--n", "6", "--k", "2", "--size-check", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["results"][0]["size"] == "35" and rep["results"][0]["match"] is True
    assert set(rep) == {"command", "params", "results", "failures", "sampled", "version"}
    code, out, _ = run(capsys, "construct", "H2", "--q", "2", "--n", "8", "--k", "3", "--size-check")
    assert code == 0 and "size=435" in out and "match=True" in out


def test_construct_rejects_bad_anchors(capsys):
    code, _, err = run(capsys, "construct", "B", "--q", "2", "--n", "6", "--k", "2", "--dm", "4")
    assert code == 2 and "dim M" in err


def test_verify_pairs_and_rwise(capsys):
    code, out, _ = run(capsys, "verify", "--q", "2", "--n", "6", "--pair", "AB", "--k1", "2", "--k2", "2")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--q", "2", "--n", "6", "--rwise", "D", "--k", "4", "--r", "3", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["failures"] == [] and rep["sampled"] is False


def test_verify_budget_error(capsys):
    code, _, err = run(capsys, "verify", "--q", "2", "--n", "7", "--pair", "CD", "--k1", "3", "--k2", "3", "--budget", "5")
    assert code == 2 and "budget" in err.lower()


def test_tau(capsys):
    code, out, _ = run(capsys, "tau", "B", "--q", "2", "--n", "6", "--k", "2", "--format", "json")
    assert code == 0 and json.loads(out)["results"][0]["tau"] == "2"


def test_audit_all_csv(capsys):
    code, out, _ = run(capsys, "audit", "--all", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == audit.CSV_HEADER
    assert not [r for r in rows[1:] if r[-1] == "fail"]


def test_audit_h1_h2_exits_one(capsys):
    code, out, _ = run(capsys, "audit", "--lemma", "h1-vs-h2")
    assert code == 1 and "FAILURE" in out
    code, _, _ = run(capsys, "audit", "--lemma", "nope")
    assert code == 2
    assert run(capsys, "audit")[0] == 2


def test_search_json_is_deterministic(capsys, tmp_path):
    argv = ["search", "--q", "2", "--n", "5", "--k", "2,2", "--random-seeds", "3", "--perturbations", "2", "--format", "json"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    p = tmp_path / "rep.json"
    assert run(capsys, *argv, "--output", str(p))[0] == 0
    assert p.read_text() == a


def test_from_report_replay(capsys, tmp_path):
    p = tmp_path / "rep.json"
    code, _, _ = run(capsys, "verify", "--q", "2", "--n", "6", "--pair", "CD", "--k1", "3", "--k2", "2", "--format", "json", "--output", str(p))
    assert code == 0
    code, out, _ = run(capsys, "verify", "--from-report", str(p), "--format", "json")
    assert code == 0 and "true" in out.lower()


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# pencil\nq = 2\nn = 6\nk = 3\nsize-check = true\n")
    code, out, _ = run(capsys, "construct", "C", "--config", str(cfg))
    assert code == 0 and "size=155" in out
    code, out, _ = run(capsys, "construct", "C", "--config", str(cfg), "--n", "7")
    assert code == 0 and "size=651" in out
    cfg.write_text("bogus = 1\n")
    code, _, err = run(capsys, "construct", "C", "--config", str(cfg))
    assert code == 2 and "unknown key" in err


def test_cache_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "cache", "build", "--q", "2", "--n", "4", "--k", "2", "--dir", str(tmp_path))
    assert code == 0
    path = lattice.cache_path(tmp_path, 4, 2, 2)
    assert path.exists()
    code, out, _ = run(capsys, "cache", "verify", "--path", str(path))
    assert code == 0
    path.write_bytes(path.read_bytes()[:-3])
    code, _, err = run(capsys, "cache", "verify", "--path", str(path))
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "qbinom", "4")[0] == 2
    assert run(capsys, "enumerate", "--q", "6", "--n", "3", "--k", "1")[0] == 2


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "qekr.cli", "qbinom", "5", "2", "--q", "3"], capture_output=True, text=True
    )
    assert out.returncode == 0 and out.stdout.strip() == "1210"
