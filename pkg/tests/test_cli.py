import csv
import io
import json
import subprocess
import sys

import pytest

from golden_data import MOBIUS_2_DET
from skeingram import formulas
from skeingram.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, default_cache_dir, main
from skeingram.gram import VerificationReport
from skeingram.polyring import Polynomial, parse_polynomial


@pytest.fixture(autouse=True)
def fresh(monkeypatch):
    formulas._det_cache.clear()
    yield
    formulas._det_cache.clear()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enum_text_and_json(capsys):
    code, out, _ = run(capsys, "enum", "--kind", "disc", "-n", "3")
    assert code == EXIT_OK and len(out.splitlines()) == 5
    code, out, _ = run(capsys, "enum", "--kind", "mobius", "-n", "2", "--format", "json")
    assert len(json.loads(out)["basis"]) == 11


def test_det_mobius_2_matches_printed_product(capsys, tmp_path):
    code, out, _ = run(capsys, "det", "--kind", "mobius", "-n", "2", "--cache-dir", str(tmp_path))
    assert code == EXIT_OK
    assert parse_polynomial(out.strip()) == MOBIUS_2_DET
    code, out, _ = run(capsys, "det", "--kind", "mobius", "-n", "2", "--no-cache", "--method", "bareiss",
                       "--format", "json")
    assert Polynomial.from_json(json.loads(out)["det"]) == MOBIUS_2_DET


def test_gram_csv_and_det_from_file(capsys, tmp_path):
    code, out, _ = run(capsys, "gram", "--kind", "genA", "-n", "2", "--format", "csv", "--no-cache")
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 3 and rows[0][0] == "" and len(rows[0]) == 3
    assert [parse_polynomial(c) for c in rows[1][1:]] == [parse_polynomial("d^2"), parse_polynomial("d")]
    path = tmp_path / "m.json"
    run(capsys, "gram", "--kind", "genA", "-n", "2", "--format", "json", "-o", str(path), "--no-cache")
    code, out, _ = run(capsys, "det", "--input", str(path), "--method", "bareiss")
    assert code == EXIT_OK and parse_polynomial(out.strip()) == parse_polynomial("d^2*z^2 - d^2")


def test_verify_chen_json(capsys):
    code, out, err = run(capsys, "verify", "--claim", "chen", "-n", "2", "--format", "json", "--no-cache")
    assert code == EXIT_OK
    data = json.loads(out)
    assert {"claim", "n", "status", "witness", "timing_ms"} <= set(data)
    assert data["status"] == "verified"
    assert "chen" in err


def test_verify_output_is_deterministic(capsys, tmp_path):
    outs = []
    for workers in ("1", "2"):
        path = tmp_path / f"r{workers}.json"
        formulas._det_cache.clear()
        code, _, _ = run(capsys, "verify", "--claim", "typeB", "-n", "2", "--no-timing", "--no-cache",
                         "--workers", workers, "-o", str(path))
        assert code == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["timing_ms"] == 0


def test_cache_is_reused(capsys, tmp_path, monkeypatch):
    import skeingram.cli as cli

    run(capsys, "gram", "--kind", "annulus", "-n", "2", "--cache-dir", str(tmp_path))
    monkeypatch.setattr(cli, "build_gram", lambda *a, **k: pytest.fail("cache was not used"))
    code, out, _ = run(capsys, "gram", "--kind", "annulus", "-n", "2", "--cache-dir", str(tmp_path))
    assert code == EXIT_OK and out.strip()


def test_failed_verification_exits_one(capsys, monkeypatch):
    import skeingram.cli as cli

    monkeypatch.setattr(cli, "verify", lambda *a, **k: VerificationReport("chen", 1, "failed"))
    code, _, _ = run(capsys, "verify", "--claim", "chen", "-n", "1", "--no-cache")
    assert code == EXIT_FAILED


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--claim", "nonsense", "-n", "2"])
    assert exc.value.code == EXIT_USAGE
    code, _, err = run(capsys, "gram", "--kind", "mobius", "-n", "5", "--no-cache")
    assert code == EXIT_USAGE and "refused" in err
    code, _, err = run(capsys, "enum", "--kind", "disc", "-n", "0")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "det", "--no-cache")
    assert code == EXIT_USAGE
    code, _, err = run(capsys, "det", "--kind", "mobius", "-n", "2", "--no-cache", "--method", "cofactor")
    assert code == EXIT_USAGE and "refused" in err
    code, _, err = run(capsys, "wenzl", "--check", "dbasis", "-n", "4")
    assert code == EXIT_USAGE and "refused" in err


def test_wenzl_show_and_check(capsys, tmp_path):
    code, out, _ = run(capsys, "wenzl", "--check", "traces", "-n", "2", "--show")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].split("\t")[1] == "1"
    assert len([l for l in lines if "\t" in l]) == 2
    path = tmp_path / "w.json"
    run(capsys, "wenzl", "--check", "theta", "-n", "2", "-o", str(path))
    assert json.loads(path.read_text())["status"] == "verified"


def test_default_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    assert default_cache_dir() == tmp_path / "skeingram"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "skeingram", "enum", "--kind", "annulus", "-n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 6
