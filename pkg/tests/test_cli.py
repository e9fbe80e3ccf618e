import json
import subprocess
import sys

import pytest

from dkh.cli import RunConfig, InputError, emit_report, main, run_command
from dkh.suites import Result


def test_kh_trefoil(capsys):
    assert main(["kh", "trefoil"]) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("total 6")


def test_hkh_and_pointed(capsys):
    assert main(["hkh", "unknot0", "--depth", "2"]) == 0
    assert "xi^2" in capsys.readouterr().out
    assert main(["pointed", "hopf_p"]) == 0
    assert "total 8" in capsys.readouterr().out


def test_movie_band_certificate(capsys):
    assert main(["movie", "band_minus.mov", "--depth", "3"]) == 0
    out = capsys.readouterr().out
    assert "certificate found" in out
    assert "pointed map rank" in out


def test_movie_zero_map_report(capsys):
    assert main(["movie", "rp2_plus", "--depth", "2", "--out", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    (rec,) = doc["tests"]
    assert rec["witness"]["plain"]["zero"] is True


def test_check_lemma23(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check", "lemma23", "--out", str(out), "--quiet"]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert [t["status"] for t in doc["tests"]] == ["pass"]


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["check", "--suite", "quick", "--out", str(a), "--quiet"]) == 0
    assert main(["check", "--suite", "quick", "--out", str(b), "--quiet"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_diagram_from_a_file(tmp_path, capsys):
    from dkh.diagram import dumps
    from dkh.movie import bundled_diagram

    p = tmp_path / "my knot.json"
    p.write_text(dumps(bundled_diagram("hopf_pos")))
    assert main(["kh", str(p)]) == 0
    assert "total 4" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["check", "nosuch"],
    ["check"],
    ["kh", "missing_diagram.json"],
    ["kh", "trefoil", "hopf_pos"],
    ["kh", "trefoil", "--depth", "-1"],
    ["movie", "nosuch.mov"],
])
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_malformed_file_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{\"crossings\": [")
    assert main(["kh", str(p)]) == 2
    s = tmp_path / "bad.mov"
    s.write_text("diagram unknot0.json\nslide p9 c1\n")
    assert main(["movie", str(s)]) == 2


def test_failed_check_exits_1(monkeypatch):
    import dkh.cli as cli

    monkeypatch.setattr(cli, "run_suite", lambda name: [Result("c1", False, {"title": "t"})])
    assert main(["check", "c1", "--quiet"]) == 1


def test_run_command_and_report_shape():
    status, results, lines = run_command(RunConfig("kh", ["unknot0"]))
    assert status == 0 and lines[-1] == "total 2"
    doc = json.loads(emit_report(results))
    assert set(doc["tests"][0]) == {"name", "status", "witness"}
    assert json.loads(emit_report([])) == {"tests": []}
    with pytest.raises(InputError):
        RunConfig("hkh", []).validate()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "dkh", "kh", "unknot0"], capture_output=True, text=True)
    assert r.returncode == 0 and "total 2" in r.stdout
