import json
import subprocess
import sys
from fractions import Fraction

import pytest

from jacobivoa.cli import main
from jacobivoa.jacobi import JacobiSeries, gen_phi_0_1


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dims(capsys):
    assert run(capsys, "dims", "--weight", "24")[:2] == (0, "3\n")


def test_expand_json(capsys):
    code, out, _ = run(capsys, "expand", "--form", "E4", "--order", "3")
    assert code == 0
    assert json.loads(out)["terms"] == [[0, "1"], [24, "240"], [48, "2160"]]


def test_jacobi_dims(capsys):
    code, out, _ = run(capsys, "jacobi", "dims", "--weight", "10", "--index", "1")
    assert json.loads(out) == {"dim_weak": 3, "codim_sum": 1, "dim_true": 2}


def test_jacobi_gens_round_trip(capsys):
    code, out, _ = run(capsys, "jacobi", "gens", "--order", "3")
    data = json.loads(out)
    assert JacobiSeries.from_json(data["phi_0_1"]).agrees_with(gen_phi_0_1(3))


def test_classify_file(tmp_path, capsys):
    p = tmp_path / "phi.json"
    p.write_text(json.dumps(gen_phi_0_1(8).to_json()))
    code, out, _ = run(capsys, "jacobi", "classify", "--input", str(p))
    assert code == 0
    assert json.loads(out)["classification"]["verdict"] == "weak-only"


def test_character_writes_json(tmp_path, capsys):
    p = tmp_path / "j.json"
    code, _, _ = run(capsys, "voa", "character", "--lattice", "A1", "--h", "1", "--order", "4", "--json", str(p))
    assert code == 0
    J = JacobiSeries.from_json(json.loads(p.read_text()))
    assert J.eta_power == -1 and J.index == 1


def test_trace_period(capsys):
    code, out, _ = run(capsys, "voa", "trace", "--R", "2", "--order", "3")
    data = json.loads(out)
    assert data["period"] == 3 and data["modulus"] == 2


@pytest.mark.parametrize("argv", [
    ["verify", "modular", "--lattice", "A1", "--h", "1", "--all-modules", "--order", "15"],
    ["verify", "modular", "--gamma", "T", "--order", "15"],
    ["verify", "elliptic", "--u", "1", "--v", "1", "--order", "15"],
    ["verify", "theorem3", "--order", "15"],
    ["verify", "miyamoto", "--order", "15", "--u", "h/2", "--v", "zero"],
])
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert ": pass (max residual" in out


def test_verify_json_report(tmp_path, capsys):
    p = tmp_path / "r.json"
    run(capsys, "verify", "modular", "--order", "15", "--json", str(p))
    data = json.loads(p.read_text())
    assert data["verdict"] == "pass" and data["order"] == 15
    assert abs(data["fitted"]["chi"][0] - 1) < 1e-9


def test_verify_failure_exits_1(tmp_path, capsys):
    fake = JacobiSeries(Fraction(0), Fraction(0), {(0, 0): Fraction(1), (24, 0): Fraction(1)})
    src, rep = tmp_path / "f.json", tmp_path / "r.json"
    src.write_text(json.dumps(fake.to_json()))
    code, _, err = run(capsys, "verify", "modular", "--input", str(src), "--json", str(rep))
    assert code == 1 and err.startswith("fail:")
    assert json.loads(rep.read_text())["verdict"] == "fail"


@pytest.mark.parametrize("argv", [
    ["voa", "character", "--lattice", "E8", "--h", "e1/2"],
    ["voa", "character", "--h", "1,1"],
    ["voa", "twisted", "--a", "1/1001,0,0,0,0,0,0,0"],
    ["voa", "trace", "--h", "h/2", "--R", "2"],
    ["jacobi", "basis", "--weight", "5", "--index", "1"],
    ["verify", "theorem3", "--lattice", "A1", "--h", "1"],
])
def test_precondition_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "jacobivoa", "dims", "--weight", "12"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "2"
