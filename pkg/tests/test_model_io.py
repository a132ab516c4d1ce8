import io
import json
import subprocess
import sys

import numpy as np
import pytest

from nhqm.dynamics import TimeDependentModel
from nhqm.errors import ParseError, SchemaError
from nhqm.model_io import format_float, load_model, parse_sweep, run_cli, write_csv

SQRT3 = 1.7320508075688772


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_load_brachistochrone(tmp_path):
    H = load_model(write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 1.5707963}))
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(H).real), [-SQRT3, SQRT3], atol=1e-7)


def test_load_matrix(tmp_path):
    H = load_model(write(tmp_path, "m.json", {"kind": "matrix", "H": [["1", "0"], ["0", "2"]]}))
    np.testing.assert_array_equal(H, np.diag([1, 2]))


def test_load_matrix_with_parameters_and_time(tmp_path):
    model = load_model(write(tmp_path, "m.json", {
        "kind": "matrix", "parameters": {"g": 0.5},
        "H": [["g*cos(t)", "i"], ["-i", 0]],
        "terms": [{"matrix": [[0, 1], [1, 0]], "coefficient": "sin(t)"}],
    }))
    assert isinstance(model, TimeDependentModel)
    H = model.hamiltonian(0.3)
    np.testing.assert_allclose(H, [[0.5 * np.cos(0.3), 1j + np.sin(0.3)], [-1j + np.sin(0.3), 0]], atol=1e-15)


def test_missing_field_named(tmp_path):
    with pytest.raises(SchemaError, match=r"missing fields: s\b"):
        load_model(write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "theta": 0.3}))


def test_extra_field_named(tmp_path):
    with pytest.raises(SchemaError, match="unexpected fields: colour"):
        load_model(write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 0, "colour": 1}))


def test_bad_kind_and_shapes(tmp_path):
    with pytest.raises(SchemaError):
        load_model(write(tmp_path, "x.json", {"kind": "laser"}))
    with pytest.raises(SchemaError):
        load_model(write(tmp_path, "x.json", {"kind": "matrix", "H": [["1", "2"]]}))


def test_expression_errors_propagate(tmp_path):
    with pytest.raises(ParseError):
        load_model(write(tmp_path, "x.json", {"kind": "matrix", "H": [["1+", "0"], ["0", "1"]]}))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_model(str(bad))


def test_fock_models_load(tmp_path):
    osc = load_model(write(tmp_path, "o.json", {"kind": "driven-oscillator", "m": 1, "omega0": 1, "lambda": 0.1,
                                                "omega": 2, "truncation": 12}))
    assert osc.dim == 12
    sw = load_model(write(tmp_path, "s.json", {"kind": "swanson", "omega": 2, "alpha": 0.5, "beta": 1,
                                               "truncation": 10}))
    assert sw.shape == (10, 10)
    swt = load_model(write(tmp_path, "s.json", {"kind": "swanson", "omega": "2+0.1*cos(t)", "alpha": 0.5,
                                                "beta": 1, "truncation": 10}))
    assert isinstance(swt, TimeDependentModel)


def test_csv_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert write_csv(["t", "x"], [[0.0, 1.5], [1.0, "a"]]) == "t,x\n0,1.5\n1,a\n"


def test_sweep_parsing():
    name, values = parse_sweep("r=0:2:5")
    assert name == "r"
    np.testing.assert_array_equal(values, [0, 0.5, 1, 1.5, 2])


def test_cli_spectrum(tmp_path):
    path = write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 1.5707963})
    code, out, _ = run(["spectrum", path])
    assert code == 0
    rep = json.loads(out)
    assert rep["classification"] == "Unbroken"
    np.testing.assert_allclose([e[0] for e in rep["eigenvalues"]], [-SQRT3, SQRT3], atol=1e-7)


def test_cli_evolve_header(tmp_path):
    path = write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 0.5})
    out = tmp_path / "traj.csv"
    code, _, _ = run(["evolve", path, "--t1", "10", "--steps", "1000", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,re_0,im_0,re_1,im_1,pseudo_norm"
    assert len(lines) == 1002
    norms = np.array([float(l.split(",")[-1]) for l in lines[1:]])
    assert np.ptp(norms) <= 1e-7 * norms[0]


def test_cli_floquet_oscillator(tmp_path):
    path = write(tmp_path, "o.json", {"kind": "driven-oscillator", "m": 1, "omega0": 1, "lambda": 0.1, "omega": 2,
                                      "truncation": 40})
    code, out, _ = run(["floquet", path, "--period", "3.14159265", "--steps", "4000"])
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()]
    assert rows[0] == ["n", "re_quasienergy", "im_quasienergy", "closed_form", "stability"]
    for r in rows[1:]:
        assert abs(float(r[1]) - float(r[3])) <= 1e-4 * abs(float(r[3]))
        assert r[4] == "Stable"


def test_cli_metric_and_invariant(tmp_path):
    path = write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 0.7})
    code, out, _ = run(["metric", path])
    assert code == 0 and json.loads(out)["pseudo_hermiticity_residual"] <= 1e-12
    sw = write(tmp_path, "s.json", {"kind": "swanson", "omega": 2, "alpha": 0.5, "beta": 1, "truncation": 40})
    code, out, _ = run(["invariant", sw, "--t1", "1", "--steps", "100", "--out", str(tmp_path / "g.csv")])
    rep = json.loads(out)
    assert code == 0
    assert rep["constraint_residual"] <= 1e-12
    np.testing.assert_allclose(rep["invariant_eigenvalues"], [0.25, 0.75, 1.25, 1.75], atol=1e-8)


def test_cli_exit_codes(tmp_path):
    assert run(["spectrum", str(tmp_path / "missing.json")])[0] == 2
    code, _, err = run(["spectrum", write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1})])
    assert code == 2 and err.count("\n") == 1 and "SchemaError" in err
    assert run(["nonsense", "x"])[0] == 2
    broken = write(tmp_path, "k.json", {"kind": "brachistochrone", "r": 2, "s": 1, "theta": 1.5707963})
    code, _, err = run(["evolve", broken, "--t1", "1000", "--steps", "20000"])
    assert code == 3 and "NonFinite" in err
    assert run(["metric", broken])[0] == 3
    assert run(["floquet", broken])[0] == 2  # no period for a static model


def test_cli_sweep_deterministic_across_thread_counts(tmp_path, monkeypatch):
    path = write(tmp_path, "b.json", {"kind": "brachistochrone", "r": 1, "s": 2, "theta": 0.5})
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("NHQM_THREADS", threads)
        code, out, _ = run(["evolve", path, "--t1", "2", "--steps", "50", "--sweep", "r=0:2:6"])
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    rows = outs[0].splitlines()
    assert rows[0].startswith("r,t,")
    assert [float(r.split(",")[0]) for r in rows[1::51]] == list(np.linspace(0, 2, 6))


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "m.json", {"kind": "matrix", "H": [["1", "0"], ["0", "2"]]})
    res = subprocess.run([sys.executable, "-m", "nhqm.cli", "spectrum", path], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["eigenvalues"] == [[1.0, 0.0], [2.0, 0.0]]
