import json
import math

import pytest

from riesz_disk.cli import main

KEYS = {"params", "support", "F_Q", "C_Q", "density", "verification"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_capacity(capsys):
    code, out, _ = run(capsys, "capacity")
    assert code == 0 and math.isclose(json.loads(out)["capacity"], 2 / math.pi)


def test_bad_lambda_and_exclusive_options(capsys):
    code, _, err = run(capsys, "capacity", "--lambda", "1.2")
    assert code == 2 and "lambda out of (0,1): 1.2" in err
    code, _, _ = run(capsys, "capacity", "--lambda", "0.3", "--s", "0.6")
    assert code == 2


def test_solve_monomial_json(capsys, tmp_path):
    path = tmp_path / "sol.json"
    code, out, _ = run(capsys, "solve", "--field", f"monomial:q={3 * math.pi},alpha=2",
                       "-o", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    assert set(data) == KEYS
    assert data["verification"]["passed"] and data["support"]["kind"] == "disk"
    assert data["params"]["field"].startswith("monomial")

    code, out, _ = run(capsys, "plot-data", "--input", str(path))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "r,f" and len(lines) == 65

    code, out, _ = run(capsys, "plot-data", "--input", str(path), "--potential")
    assert code == 0 and out.splitlines()[0] == "r,weighted_potential"

    code, out, _ = run(capsys, "verify", "--input", str(path))
    assert code == 0 and json.loads(out)["verification"]["passed"]


def test_solve_csv(capsys):
    code, out, _ = run(capsys, "solve", "--format", "csv", "--grid-n", "32")
    assert code == 0 and out.startswith("r,f\r\n") and out.count("\r\n") == 33


def test_solve_point_charge_too_low(capsys):
    code, out, _ = run(capsys, "solve", "--field", "point:q=1,h=0.3")
    assert code == 4 and not json.loads(out)["verification"]["passed"]


def test_solve_needs_ring(capsys):
    code, _, _ = run(capsys, "solve", "--field", "monomial:q=1,alpha=0.5")
    assert code == 2
    code, _, err = run(capsys, "critical-radius", "--field", "point:q=1,h=0.3")
    assert code == 3


def test_critical_radius(capsys):
    code, out, _ = run(capsys, "critical-radius", "--field", "monomial:q=20,alpha=2")
    data = json.loads(out)
    assert code == 0 and math.isclose(data["R_star"], data["R_star_closed_form"], rel_tol=1e-9)


def test_critical_height(capsys):
    code, out, _ = run(capsys, "critical-height")
    data = json.loads(out)
    assert code == 0 and data["threshold"] == max(data["h_minus"], data["h_plus"])
    code, _, _ = run(capsys, "critical-height", "--q", "0")
    assert code == 2
    code, out, _ = run(capsys, "critical-height", "--d", "8")
    assert code == 0 and "newtonian_check" in json.loads(out)


def test_ring(capsys):
    code, out, err = run(capsys, "ring", "--a", "0.2", "--field", "point:q=1,h=0.2")
    data = json.loads(out)
    assert set(data) == KEYS
    assert data["density"]["residual_norm"] < 1e-8
    assert "residual_norm=" in err
    assert code in (0, 4) and (code == 0) == data["verification"]["passed"]
    code, _, _ = run(capsys, "ring", "--a", "0.5", "--b", "0.4")
    assert code == 2


def test_ring_ill_conditioned(capsys):
    code, _, err = run(capsys, "ring", "--a", "0.2", "--lambda", "0.15",
                       "--field", "point:q=1,h=0.4")
    assert code == 6 and "ill-conditioned" in err


def test_missing_input(capsys):
    assert run(capsys, "plot-data")[0] == 2
    assert run(capsys, "verify", "--input", "/nonexistent.json")[0] == 2


def test_required_argument():
    with pytest.raises(SystemExit) as exc:
        main(["ring"])
    assert exc.value.code == 2
