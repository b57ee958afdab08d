import json
import shutil
import subprocess
import sys

import pytest

from liegerm.cli import VERBS, default_corpus_dir, main, run_corpus

CUSP = """\
ring x y
ideal cusp: y^2 - x^3
ideal cone3: x^2 + y^2
ideal line: x
field ex: [1, 0]
"""

CONE = "ring x y z\nideal cone: x^2 + y^2 + z^2\n"


@pytest.fixture
def session(tmp_path):
    def write(text, name="s.session"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tangent_cusp_json(session, capsys):
    code, out, err = run(capsys, "tangent", session(CUSP), "cusp", "--format", "json")
    assert code == 0 and err == ""
    rep = json.loads(out)
    assert set(rep) == {"task", "inputs", "result", "provenance"}
    assert rep["task"] == "tangent"
    assert rep["provenance"] == {"order": "grevlex", "d": 4, "k": 2}
    assert sorted(map(tuple, rep["result"]["generators"])) == [("2*x", "3*y"), ("2*y", "3*x^2")]


def test_recover_cone(session, capsys):
    code, out, _ = run(capsys, "recover", session(CONE), "cone", "--format", "json")
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "equal"


def test_false_verdict_still_exit_zero(session, capsys):
    code, out, _ = run(capsys, "member", session(CUSP), "x", "cusp", "--format", "json")
    assert code == 0
    assert json.loads(out)["result"] == {"member": False}


def test_text_format(session, capsys):
    code, out, _ = run(capsys, "tangent", session(CUSP), "cusp")
    assert code == 0 and "generators" in out


def test_malformed_session_exit_2(session, capsys):
    code, out, err = run(capsys, "tangent", session("ring x y\nideal a: x +\n"), "a")
    assert code == 2 and out == ""
    assert "line 2, column" in err and "^" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("tangent", "MISSING", "cusp"),
        ("tangent", "@", "nosuch"),
        ("tangent", "@", "cusp", "--depth", "3"),
        ("tangent", "@", "cusp", "--degree-bound", "-1"),
        ("bracket", "@", "ex"),
    ],
)
def test_input_errors_exit_2(argv, session, capsys, tmp_path):
    path = session(CUSP)
    argv = [path if a == "@" else str(tmp_path / a) if a == "MISSING" else a for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_precondition_exit_3(session, capsys):
    code, out, err = run(capsys, "stability", session(CUSP), "line")
    assert code == 3 and out == "" and "precondition" in err


def test_unknown_flag_rejected(session):
    with pytest.raises(SystemExit) as exc:
        main(["tangent", session(CUSP), "cusp", "--bogus"])
    assert exc.value.code == 2


def test_every_verb_registered():
    assert set(VERBS) == {
        "tangent", "family", "integral", "sing", "chain", "recover", "stability", "irredundant", "bracket",
        "closure", "balanced", "visible", "conjugate", "lambda", "extract", "gb", "nf", "member",
    }


def test_deterministic_subprocess(session):
    path = session(CUSP)
    cmd = [sys.executable, "-m", "liegerm", "tangent", path, "cusp", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


def test_run_session(capsys):
    path = str(default_corpus_dir() / "curves.session")
    code, out, _ = run(capsys, "run", path, "--format", "json")
    assert code == 0
    assert len(json.loads(out)) > 5


def test_corpus_passes(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("0 failed")
    assert all(line.startswith("PASS") for line in out.strip().splitlines()[:-1])


def test_corpus_parallel_same_rows(monkeypatch, capsys):
    _, serial, _ = run(capsys, "corpus", "--filter", "curves")
    monkeypatch.setenv("LIEGERM_WORKERS", "3")
    _, parallel, _ = run(capsys, "corpus", "--filter", "curves")
    strip = lambda s: [" ".join(l.split()[:-1]) for l in s.splitlines()[:-1]]
    assert strip(serial) == strip(parallel)


def test_empty_filter(capsys):
    code, out, _ = run(capsys, "corpus", "--filter", "no-such-item")
    assert code == 0 and out.strip() == "0 items, 0 failed"


def test_corrupted_golden(tmp_path, capsys):
    cdir = tmp_path / "corpus"
    shutil.copytree(default_corpus_dir(), cdir)
    gp = cdir / "golden" / "curves.json"
    reports = json.loads(gp.read_text())
    reports[0]["result"] = "corrupted"
    gp.write_text(json.dumps(reports))
    code, out, _ = run(capsys, "corpus", "--corpus-dir", str(cdir))
    assert code == 1
    fails = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert len(fails) == 1 and fails[0].split()[1].startswith("curves:0:")


def test_missing_corpus_dir(tmp_path, capsys):
    code, _, err = run(capsys, "corpus", "--corpus-dir", str(tmp_path / "none"))
    assert code == 2 and "missing corpus" in err


def test_seed_corpus_round_trip(tmp_path, capsys):
    cdir = tmp_path / "corpus"
    shutil.copytree(default_corpus_dir(), cdir)
    shutil.rmtree(cdir / "golden")
    assert run_corpus(cdir, "groebner", seed=True, out=sys.stderr) == 0
    code, out, _ = run(capsys, "corpus", "--corpus-dir", str(cdir), "--filter", "groebner")
    assert code == 0
