import json
import math

import pytest

from brody_lab.cli import parse_and_dispatch, parse_radii
from brody_lab.curve import exp_curve, sin_curve
from brody_lab.errors import InputError
from brody_lab.growth import GrowthSample
from brody_lab.report import format_float, normalize, write_report


@pytest.fixture()
def curves(tmp_path):
    paths = {}
    for name, c in (("expz", exp_curve()), ("sin", sin_curve())):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(c.to_json()))
        paths[name] = str(p)
    return paths


def test_format_and_normalize():
    assert format_float(1 / 3) == "0.333333333333"
    assert normalize({"b": math.inf, "a": 1 + 2j, "c": float("nan")}) == {"b": "inf", "a": [1.0, 2.0], "c": "nan"}


def test_write_report_refuses_empty(tmp_path):
    with pytest.raises(InputError):
        write_report([], tmp_path / "x.csv")


def test_write_report_deterministic(tmp_path):
    rows = [GrowthSample(1.0, 1 / 3, 1 / 3, 0.1), GrowthSample(2.0, 2 / 3, 2 / 3, 0.2)]
    a = write_report(rows, tmp_path / "a.csv")
    b = write_report(rows, tmp_path / "b.csv")
    assert a == b == (tmp_path / "a.csv").read_text()
    assert a.splitlines()[0] == "r,t_jensen,t_ahlfors,n_of_r"


def test_parse_radii():
    r = parse_radii("1:100:24")
    assert len(r) == 24 and r[-1] == pytest.approx(100)
    with pytest.raises(InputError):
        parse_radii("1:100")


def test_characteristic_and_order_fit(curves, tmp_path):
    out = tmp_path / "g.csv"
    assert parse_and_dispatch(["characteristic", "--curve", curves["expz"], "--radii", "1:100:24",
                               "--method", "both", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,t_jensen,t_ahlfors,n_of_r" and len(lines) == 25
    fit = tmp_path / "fit.json"
    assert parse_and_dispatch(["order-fit", "--input", str(out), "--window", "20,100", "--out", str(fit)]) == 0
    data = json.loads(fit.read_text())
    assert set(data) == {"order", "type", "window", "rms"}
    assert data["order"] == pytest.approx(1.0, abs=0.02)
    assert parse_and_dispatch(["order-fit", "--input", str(out), "--window", "20,100", "--max-order", "0.5"]) == 1


def test_characteristic_byte_identical(curves, tmp_path, monkeypatch):
    args = ["characteristic", "--curve", curves["sin"], "--radii", "1:20:6", "--method", "jensen"]
    assert parse_and_dispatch(args + ["--out", str(tmp_path / "a.csv")]) == 0
    monkeypatch.setenv("BRODY_LAB_THREADS", "3")
    assert parse_and_dispatch(args + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_lemma1_command(tmp_path):
    out = tmp_path / "l.json"
    assert parse_and_dispatch(["lemma1", "--trials", "40", "--degree", "8", "--seed", "42",
                               "--report", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["min_margin"] >= 0 and "argmin_case" in data


def test_main_ineq_command(curves, tmp_path):
    out = tmp_path / "m.json"
    base = ["main-ineq", "--curve", curves["sin"], "--z0", f"{math.pi},0", "--annulus", "6.3,100",
            "--samples", "2000"]
    assert parse_and_dispatch(base + ["--chain-centers", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True
    assert parse_and_dispatch(base + ["--sup", "0", "--out", str(out)]) == 1
    assert parse_and_dispatch(base[:6] + ["--annulus", "1,100"]) == 2


def test_example_and_report_commands(tmp_path):
    e = tmp_path / "e.json"
    assert parse_and_dispatch(["example", "--n", "2", "--verify", "b0", "--out", str(e)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"passed": false}')
    summary = tmp_path / "s.csv"
    assert parse_and_dispatch(["report", str(e), "--out", str(summary)]) == 0
    assert parse_and_dispatch(["report", str(e), str(bad)]) == 1
    assert parse_and_dispatch(["report"]) == 2


def test_spherical_grid_command(curves, tmp_path):
    grid, summ = tmp_path / "g.csv", tmp_path / "s.json"
    assert parse_and_dispatch(["spherical-grid", "--curve", curves["expz"], "--radius", "3", "--resolution",
                               "0.2", "--out", str(grid), "--summary", str(summ)]) == 0
    assert json.loads(summ.read_text())["sup"] == pytest.approx(0.5)


def test_input_errors(tmp_path, capsys):
    assert parse_and_dispatch(["lemma1", "--bogus"]) == 2
    assert parse_and_dispatch([]) == 2
    assert parse_and_dispatch(["characteristic", "--curve", str(tmp_path / "none.json"), "--radii", "1:2:3"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"components": [{"type": "mystery"}]}')
    assert parse_and_dispatch(["characteristic", "--curve", str(bad), "--radii", "1:2:3"]) == 2
    assert "input error" in capsys.readouterr().err


def test_io_failure_exit_code(curves, tmp_path):
    target = tmp_path / "missing_dir" / "out.csv"
    assert parse_and_dispatch(["characteristic", "--curve", curves["expz"], "--radii", "1:2:2",
                               "--out", str(target)]) == 3
