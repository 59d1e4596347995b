import json
import subprocess
import sys
import time

import pytest

from heckesign.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_text(capsys):
    code, out, _ = run(capsys, "constants", "--tol", "1e-9")
    assert code == 0
    assert "avg_pf" in out and "avg_nf" in out and "avg_nf_product" in out


def test_constants_json(capsys):
    code, out, _ = run(capsys, "--json", "constants")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["id"] for r in rows] == ["avg_pf", "avg_nf", "avg_nf_product"]
    assert rows[0]["verdict"] == rows[1]["verdict"] == "pass"
    assert rows[2]["verdict"] == "info"


def test_entry_point_runs_as_module():
    t = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "heckesign", "constants"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert time.perf_counter() - t < 5


def test_measure_and_intervals(capsys):
    code, out, _ = run(capsys, "--json", "measure", "--kind", "st", "--lo", "0", "--hi", "1.0471975511965976")
    assert code == 0
    assert json.loads(out)["observed"] == pytest.approx(0.19550110947788527, abs=1e-15)
    code, out, _ = run(capsys, "--csv", "intervals", "--target", "3^2")
    assert code == 0
    assert out.splitlines()[0] == "p,kind,lo,hi"
    assert len(out.splitlines()) == 5


def test_forms_and_census(capsys):
    code, out, _ = run(capsys, "--csv", "forms", "--k", "24")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "--json", "census", "--kmax", "40")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["observed"]["table"]["columns"] == ["k", "index", "p_f", "n_f"]


def test_sieve_commands(capsys):
    code, out, _ = run(capsys, "--json", "sieve", "kloosterman", "--m", "1", "--n", "1", "--c", "4")
    assert code == 0 and json.loads(out)["observed"] == pytest.approx(-2)
    code, out, _ = run(capsys, "--json", "sieve", "h-sum", "--M", "10")
    assert json.loads(out)["observed"] == pytest.approx(1.44)
    code, out, _ = run(capsys, "--json", "sieve", "bounds", "--k", "12", "--N", "1000000", "--M", "10")
    assert [json.loads(line)["id"] for line in out.splitlines()] == ["delta-bound", "complete-sieve-bound"]
    code, out, _ = run(capsys, "--json", "sieve", "tail", "--m", "1", "--n", "2", "--k", "40")
    assert abs(json.loads(out)["observed"]) < 1e-6


def test_failed_verdict_exits_one(capsys):
    code, out, _ = run(capsys, "experiment", "sign-fraction", "--kmin", "12", "--kmax", "12")
    assert code == 1 and "fail" in out


def test_usage_errors_exit_two(capsys):
    assert run(capsys, "measure", "--kind", "plancherel", "--lo", "0", "--hi", "1")[0] == 2
    assert run(capsys, "intervals", "--target", "12")[0] == 2
    assert run(capsys, "measure", "--kind", "st", "--lo", "2", "--hi", "1")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_bad_config_exits_two(capsys, tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("colour = blue\n")
    assert run(capsys, "--config", str(path), "constants")[0] == 2
