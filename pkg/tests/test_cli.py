import json
import shutil
import subprocess
import sys

import pytest

from expsum import golden
from expsum.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_console_script_present():
    exe = shutil.which("expsum")
    cmd = [exe] if exe else [sys.executable, "-m", "expsum.cli"]
    r = subprocess.run(cmd + ["--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "expsum" in r.stdout


def test_optimize_expect(capsys):
    code, out, _ = run(["optimize", "--program", "appendix_741.plp", "--expect", "-1/68"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["value"] == "-1/68" and rep["argmax"]["n1"] == "9/17"
    assert rep["run"]["config"]["subcommand"] == "optimize"
    code, _, err = run(["optimize", "--program", "appendix_741.plp", "--expect=-1/64"], capsys)
    assert code == 2


def test_optimize_verdict_and_file(tmp_path, capsys):
    code, out, _ = run(["optimize", "--program", "cuspidal_62.plp"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "FEASIBLE"
    f = tmp_path / "toy.plp"
    f.write_text("max min(x, 1 - x) st 0 <= x; x <= 1\n")
    out_file = tmp_path / "r.json"
    code, _, _ = run(["optimize", "--program", str(f), "--out", str(out_file)], capsys)
    assert code == 0 and json.loads(out_file.read_text())["value"] == "1/2"
    f.write_text("max min(x, st\n")
    code, _, err = run(["optimize", "--program", str(f)], capsys)
    assert code == 1 and "line 1, column 12" in err


def test_usage_errors(capsys):
    assert run(["m4", "--q", "4"], capsys)[0] == 1
    assert run(["nonsense"], capsys)[0] == 1
    assert run(["kloosterman"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["oracle-freeze", "--scope", "NOPE"], capsys)[0] == 1


def test_kloosterman_report_and_dump(tmp_path, capsys):
    dump = tmp_path / "kl.csv"
    code, out, _ = run(["kloosterman", "--q", "31", "--dump", str(dump)], capsys)
    assert code == 0
    rows = dump.read_text().strip().splitlines()
    assert len(rows) >= 30
    assert json.loads(out)["run"]["config"]["params"]["q"] == 31


def test_checks_exit_codes(capsys):
    assert run(["ortho", "--q", "7", "--sigma", "-1"], capsys)[0] == 0
    assert run(["voronoi", "--a", "1", "--c", "3", "--X", "200"], capsys)[0] == 0
    assert run(["tau", "--n", "300", "--check"], capsys)[0] == 0
    # an impossible tolerance is a failed check, not a usage error
    assert run(["decomp-check", "--q", "7", "--sigma", "+1", "--tol", "1e-30"], capsys)[0] == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# bilinear run\nq = 101\nM = 10\nN = 10\nbounds = trivial,typeII\n")
    code, out, _ = run(["bilinear", "--config", str(cfg), "--M", "12"], capsys)
    assert code == 0
    params = json.loads(out)["run"]["config"]["params"]
    assert params["q"] == 101 and params["M"] == 12
    cfg.write_text("q = 101\nbogus = 3\n")
    assert run(["bilinear", "--config", str(cfg)], capsys)[0] == 1


def test_oracle_freeze_env_and_idempotence(tmp_path, monkeypatch, capsys):
    path = tmp_path / "golden.json"
    monkeypatch.setenv(golden.ENV_VAR, str(path))
    assert golden.golden_path() == path
    assert run(["oracle-freeze", "--scope", "C4"], capsys)[0] == 0
    first = json.loads(path.read_text())
    assert run(["oracle-freeze", "--scope", "C4"], capsys)[0] == 0
    second = json.loads(path.read_text())
    assert second["version"] == first["version"] + 1
    assert second["constants"]["C4"]["value"] == first["constants"]["C4"]["value"]
    assert first["constants"]["C4"]["value"] == pytest.approx(golden.constant("C4", golden.default_path()), rel=1e-12)
    with pytest.raises(KeyError):
        golden.constant("C2", path)
