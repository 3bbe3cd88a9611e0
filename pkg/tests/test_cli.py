import csv
import io
import json
import os

import numpy as np
import pytest

from z2graze.cli import run

from conftest import THETA

OSC = ["--system", "thompson_hunt", "--a", "-1", "--b", repr(THETA)]


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def ok(argv):
    code, out, err = call(argv)
    assert code == 0, err
    return json.loads(out)


def test_simulate_parabola(tmp_path):
    res = ok(["simulate", "--system", "parabola", "--from", "-1,1", "--t", "2",
              "--out", str(tmp_path)])
    r = res["result"]
    graze = [e for e in r["events"] if e["kind"] == "Grazing"]
    assert graze and graze[0]["t"] == pytest.approx(1.0, abs=1e-9)
    with open(tmp_path / "trajectory.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "y", "arc_kind", "event"]
    meta = json.loads((tmp_path / "trajectory.csv.meta.json").read_text())
    assert meta["config"]["system"]["id"] == "parabola" and "version" in meta


def test_quantities_circle(tmp_path):
    r = ok(["quantities", "--system", "circle", "--out", str(tmp_path)])["result"]
    assert r["quantities"]["lambda0"] == pytest.approx(np.exp(-4 * np.pi), rel=1e-6)
    assert all(r["sign_checks"].values())
    assert os.path.exists(tmp_path / "quantities.json")


def test_tangencies(tmp_path):
    r = ok(["tangencies", *OSC, "--alpha", "0.01,0", "--interval", "-0.5,0.5",
            "--out", str(tmp_path)])["result"]
    assert len(r["tangencies"]) >= 2
    assert len(r["pseudo_equilibria"]) == 1


def test_portrait_beta(tmp_path):
    r = ok(["portrait", *OSC, "--beta", "0,1e-6", "--trajectories", "--out", str(tmp_path)])
    files = r["result"]["trajectory_files"]
    assert files and all(os.path.exists(tmp_path / f) for f in files)
    assert all(o["certified"] for o in r["result"]["objects"])


def test_boundary_small_grid(tmp_path):
    r = ok(["boundary", *OSC, "--kind", "psi3", "--grid", "2e-3,4e-3",
            "--out", str(tmp_path)])["result"]
    assert os.path.exists(tmp_path / "psi3.csv")
    assert r["n_samples"] == 2 and r["predicted"] < 0
    # two points cannot support a fit; the failure is reported, not raised
    assert r["fit_error"]["error"] == "IllConditioned"


def test_exit_codes(tmp_path):
    code, out, err = call(["quantities", "--system", "nope", "--out", str(tmp_path)])
    assert code == 1 and out == "" and json.loads(err)["error"] == "ConfigError"
    code, _, err = call(["quantities", "--set", "run.colour=red", "--out", str(tmp_path)])
    assert code == 1 and "colour" in err
    code, _, err = call(["simulate", "--bogus"])
    assert code == 1
    code, _, err = call(["quantities", "--system", "parabola", "--out", str(tmp_path)])
    assert code == 2 and json.loads(err)["error"] == "NotGrazing"


def test_print_config(tmp_path):
    code, out, _ = call(["diagram", "--system", "circle", "--set", "diagram.n_grid=5", "--print-config"])
    assert code == 0
    assert "[diagram]" in out and "n_grid = 5" in out and "id = circle" in out
    cfg = tmp_path / "run.ini"
    cfg.write_text(out, encoding="utf-8")
    code, again, _ = call(["diagram", "--config", str(cfg), "--print-config"])
    assert again == out


def test_deterministic_output(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        code, out, _ = call(["simulate", *OSC, "--alpha", "0.02,0", "--from", "0.3,0.1",
                             "--t", "15", "--out", str(d)])
        assert code == 0
        outs.append((out.replace(str(d), "D"), (d / "trajectory.csv").read_bytes()))
    assert outs[0] == outs[1]
