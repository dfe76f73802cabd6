import json

import numpy as np
import pytest

from ehglue import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


def run_json(args, capsys):
    code, out = run(args, capsys)
    return code, json.loads(out)


def test_jet_curvature_complex_hyperbolic(capsys):
    code, d = run_json(["jet-curvature", "--catalog", "complex-hyperbolic"], capsys)
    assert code == 0
    rplus = np.array(d["operator"]["rplus"])
    assert np.abs(rplus - np.diag([-1.5, 0.0, 0.0])).max() < 1e-12
    assert abs(d["operator"]["scal"] + 6.0) < 1e-12
    assert d["einstein"]["is_einstein"] is True
    assert abs(d["einstein"]["lambda"] + 1.5) < 1e-12
    assert "omega_norm" in d["convention"]


def test_jet_curvature_flat(capsys):
    code, d = run_json(["jet-curvature", "--catalog", "flat"], capsys)
    assert code == 0
    assert np.abs(np.array(d["operator"]["matrix"])).max() == 0.0
    assert np.abs(np.array(d["curvature_tensor"])).max() == 0.0


def test_jet_curvature_conflicting_file(tmp_path, capsys):
    path = tmp_path / "jet.json"
    path.write_text(json.dumps([
        {"i": 1, "j": 2, "k": 3, "l": 4, "value": 1.0},
        {"i": 2, "j": 1, "k": 4, "l": 3, "value": 2.0},
    ]))
    code, _ = run(["jet-curvature", "--input", str(path)], capsys)
    assert code == 3


def test_jet_curvature_needs_source(capsys):
    code, _ = run(["jet-curvature"], capsys)
    assert code == 3


def test_obstruction_real_hyperbolic(capsys):
    code, d = run_json(["obstruction", "--catalog", "real-hyperbolic"], capsys)
    assert code == 0
    assert d["on_wall"] is False
    assert d["gauge"] is None
    assert abs(d["lambda"][0] + 2.0) < 1e-8


def test_obstruction_complex_hyperbolic(capsys):
    code, d = run_json(["obstruction", "--catalog", "complex-hyperbolic"], capsys)
    assert code == 0
    assert d["on_wall"] is True
    assert d["kernel_dim"] == 2
    assert d["degeneracy"] == "degenerate"
    assert np.abs(np.array(d["lambda_aligned"])).max() < 1e-8
    assert abs(np.array(d["rplus_aligned"])[0, 0]) < 1e-10
    # schema of the wall report
    for key in ("rplus", "eigenvalues", "det", "on_wall", "kernel_dim",
                "kernel", "gauge", "lambda", "convention"):
        assert key in d
    assert "quaternion" in d["gauge"]
    assert "omega_norm" in d["convention"]
    assert "sphere_volume" in d["convention"]


def test_obstruction_flat(capsys):
    code, d = run_json(["obstruction", "--catalog", "flat"], capsys)
    assert code == 0
    assert d["on_wall"] is True
    assert d["degeneracy"] == "degenerate"
    assert d["kernel_dim"] == 3


def test_eh_verify_passes(capsys):
    code, d = run_json(["eh-verify", "--grid", "4"], capsys)
    assert code == 0
    assert d["passed"] is True
    assert d["failures"] == []


def test_eh_verify_csv(capsys):
    code, out = run(["eh-verify", "--grid", "3", "--format", "csv"], capsys)
    assert code == 0
    header = out.splitlines()[0]
    assert header == "identity,r,direction,residual"
    assert len(out.splitlines()) > 10


def test_eh_verify_tight_tolerance_fails(capsys):
    code, d = run_json(["eh-verify", "--grid", "3", "--tol", "1e-12"], capsys)
    assert code == 2
    assert d["passed"] is False
    assert d["failures"]


def test_eh_verify_empty_grid(capsys):
    code, _ = run(["eh-verify", "--grid", "0"], capsys)
    assert code == 3


def test_glue_scan_json(capsys):
    code, d = run_json(["glue-scan", "--catalog", "real-hyperbolic",
                        "--t-list", "1e-2,3e-3,1e-3,3e-4", "--grid", "8"], capsys)
    assert code == 0
    assert abs(d["slope"] - 1.0) < 0.2
    for (lo, hi), r in zip(d["transition"], d["argmax_r"]):
        assert lo <= r <= hi
    assert d["span_decades"] > 1.5
    assert "omega_norm" in d["convention"]


def test_glue_scan_csv(capsys):
    code, out = run(["glue-scan", "--catalog", "flat",
                     "--t-list", "1e-2,3e-3,1e-3,3e-4", "--grid", "6",
                     "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,sup_residual,argmax_r"
    assert len(lines) == 5


def test_glue_scan_inadmissible(capsys):
    code, _ = run(["glue-scan", "--catalog", "flat",
                   "--t-list", "1e6,2e6,3e6,4e6"], capsys)
    assert code == 3


def test_glue_scan_unknown_chart(capsys):
    code, _ = run(["glue-scan", "--catalog", "nope"], capsys)
    assert code == 3


def test_validation_of_config(capsys):
    code, _ = run(["eh-verify", "--wall-tol", "-1"], capsys)
    assert code == 3
    code, _ = run(["glue-scan", "--catalog", "flat", "--t-list", "1e-2,-1e-3"], capsys)
    assert code == 3


def test_determinism_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert cli.main(["obstruction", "--catalog", "complex-hyperbolic",
                         "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]

    outs = []
    for k in range(2):
        path = tmp_path / f"g{k}.json"
        assert cli.main(["glue-scan", "--catalog", "flat",
                         "--t-list", "1e-2,3e-3,1e-3,3e-4", "--grid", "5",
                         "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]

    outs = []
    for k in range(2):
        path = tmp_path / f"v{k}.json"
        assert cli.main(["eh-verify", "--grid", "3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_float_formatting_17_digits(capsys):
    code, out = run(["jet-curvature", "--catalog", "complex-hyperbolic"], capsys)
    # every float in the report round-trips through 17 significant digits
    d = json.loads(out)
    assert d["convention"]["sphere_volume"] == 2.0 * np.pi**2
