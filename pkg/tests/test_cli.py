import json
import os
import subprocess
import sys

import numpy as np
import pytest

from starcalc.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USER, main
from starcalc.discretize import read_matrix
from starcalc.kernels import Interval, SeparableFn, interpolate
from starcalc.sampling import random_element
from starcalc.serialize import element_to_spec, load_json, parse_element
from starcalc.star import action_residual, delta, identity, smooth_part, star, theta

THETA = {"domain": [0, 1], "terms": [{"order": -1, "coeff": {"separable": [{"a": {"poly": [1]}, "b": {"poly": [1]}}]}}]}


def _dirac(k):
    return {"domain": [0, 1], "terms": [{"order": k, "coeff": {"separable": [{"a": {"builtin": "one"}, "b": {"builtin": "one"}}]}}]}


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(tmp_path, *argv, out="out"):
    code = main([*argv, "--out", str(tmp_path / out)])
    res = tmp_path / out / "result.json"
    return code, (json.loads(res.read_text()) if res.exists() else None)


def _element(tmp_path, out, name):
    return parse_element(load_json(str(tmp_path / out / name)))


def test_mul_theta_theta(tmp_path, unit, capsys):
    t = _write(tmp_path, "t.json", THETA)
    code, res = _run(tmp_path, "mul", t, t)
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out) == res
    p = _element(tmp_path, "out", res["outputs"]["spec"])
    for x, y in [(0.9, 0.1), (0.5, 0.5), (1.0, 0.0)]:
        assert abs(p.theta_part(x, y) - (x - y)) < 1e-12
    rows = (tmp_path / "out" / res["outputs"]["theta_csv"]).read_text().splitlines()
    assert rows[0] == "x,y,re,im"
    x, y, re, im = (float(v) for v in rows[5].split(","))
    assert abs(re - (x - y) * (x >= y)) < 1e-12 and im == 0.0


def test_mul_delta_is_unit(tmp_path, unit):
    d = random_element(unit, np.random.default_rng(4), max_order=2)
    dp = _write(tmp_path, "d.json", element_to_spec(d))
    one = _write(tmp_path, "one.json", _dirac(0))
    code, res = _run(tmp_path, "mul", one, dp, out="a")
    assert code == EXIT_OK
    code, res_d = _run(tmp_path, "mul", dp, one, out="b")
    assert code == EXIT_OK
    prod = _element(tmp_path, "a", res["outputs"]["spec"])
    assert action_residual(prod, d) < 1e-10
    for name in ("theta_csv", "dirac_csv"):
        assert (tmp_path / "a" / res["outputs"][name]).read_bytes() == (tmp_path / "b" / res_d["outputs"][name]).read_bytes()


@pytest.mark.parametrize("i, j", [(-1, 1), (1, -1), (1, 1), (0, 2), (2, -1), (-1, -1)])
def test_mul_dirac_orders(tmp_path, unit, i, j):
    code, res = _run(tmp_path, "mul", _write(tmp_path, "i.json", _dirac(i)), _write(tmp_path, "j.json", _dirac(j)))
    assert code == EXIT_OK
    p = _element(tmp_path, "out", res["outputs"]["spec"])
    assert action_residual(p, delta(i + j, unit)) < 1e-10


def test_inv_theta(tmp_path, unit):
    code, res = _run(tmp_path, "inv", _write(tmp_path, "t.json", THETA))
    assert code == EXIT_OK
    inv = _element(tmp_path, "out", res["outputs"]["spec"])
    assert list(inv.parts) == [1]
    assert abs(inv.parts[1](0.3, 0.7) - 1.0) < 1e-12
    assert max(res["residuals"]["left"], res["residuals"]["right"]) < 1e-10


def test_inv_delta_minus_theta(tmp_path, unit):
    spec = {
        "domain": [0, 1],
        "terms": [
            {"order": 0, "coeff": {"separable": [{"a": {"poly": [1]}, "b": {"poly": [1]}}]}},
            {"order": -1, "coeff": {"separable": [{"a": {"poly": [-1]}, "b": {"poly": [1]}}]}},
        ],
    }
    code, res = _run(tmp_path, "inv", _write(tmp_path, "d.json", spec))
    assert code == EXIT_OK
    inv = _element(tmp_path, "out", res["outputs"]["spec"])
    ref = identity(unit) + smooth_part(SeparableFn.rank1(interpolate(np.exp, unit), interpolate(lambda t: np.exp(-t), unit)))
    assert action_residual(inv, ref) < 1e-8


def test_inv_structural_failure_exits_2(tmp_path):
    xtheta = {"domain": [0, 1], "terms": [{"order": -1, "coeff": {"separable": [{"a": {"poly": [0, 1]}, "b": {"poly": [1]}}]}}]}
    code, res = _run(tmp_path, "inv", _write(tmp_path, "x.json", xtheta))
    assert code == EXIT_NUMERIC
    assert res["error"]["kind"] == "structure"
    assert "diagonal" in res["error"]["message"]


def test_solve_volterra(tmp_path):
    prob = {
        "domain": [0, 1],
        "kernel": {"separable": [{"a": {"builtin": "one"}, "b": {"builtin": "one"}}]},
        "forcing": {"poly": [1]},
    }
    code, res = _run(tmp_path, "solve-volterra", _write(tmp_path, "v.json", prob))
    assert code == EXIT_OK
    assert abs(res["outputs"]["u_hi"] - np.e) < 1e-8
    assert res["residuals"]["equation"] < 1e-9
    rows = (tmp_path / "out" / res["outputs"]["u_csv"]).read_text().splitlines()
    x, re, _ = (float(v) for v in rows[-1].split(","))
    assert x == 1.0 and abs(re - np.e) < 1e-8


def test_toe_scalar_linear(tmp_path):
    code, res = _run(tmp_path, "toe", _write(tmp_path, "a.json", {"domain": [0, 1], "A": [[{"poly": [0, 1]}]]}))
    assert code == EXIT_OK
    u = res["outputs"]["U_hi_lo"]
    assert abs(np.asarray(u, dtype=float).ravel()[0] - np.exp(0.5)) < 1e-9
    assert max(res["residuals"].values()) < 1e-8
    lines = (tmp_path / "out" / res["outputs"]["U_csv"]).read_text().splitlines()
    assert lines[0] == "x,y,i,j,re,im"
    for line in lines[1:40]:
        x, y, _, _, re, _ = (float(v) for v in line.split(","))
        assert abs(re - np.exp((x * x - y * y) / 2)) < 1e-9


def test_metric_and_discretize_check(tmp_path):
    t = _write(tmp_path, "t.json", THETA)
    code, res = _run(tmp_path, "metric", t, t, "--kmax", "4", out="m")
    assert code == EXIT_OK and res["outputs"]["metric"] == 0.0
    assert res["outputs"]["tail_bound"] == 2.0 ** -5
    code, res = _run(tmp_path, "discretize-check", t, t, "--dump", "prod.bin", out="c")
    assert code == EXIT_OK
    assert 0.8 <= res["diagnostics"]["rate"] <= 1.2
    assert res["outputs"]["table"]["N"] == [64, 128, 256, 512]
    m = read_matrix(tmp_path / "c" / "prod.bin")
    assert m.shape == (512, 512) and abs(m[511, 0] - 1.0 - 1.0 / 511) < 1e-12


def test_round_trip_determinism(tmp_path):
    t = _write(tmp_path, "t.json", THETA)
    d = _write(tmp_path, "d.json", element_to_spec(random_element(Interval(0.0, 1.0), np.random.default_rng(8))))
    for cmd in (["mul", t, d], ["inv", t], ["metric", t, d]):
        assert _run(tmp_path, *cmd, "--seed", "3", out="r1")[0] == EXIT_OK
        assert _run(tmp_path, *cmd, "--seed", "3", out="r2")[0] == EXIT_OK
        for f in sorted(os.listdir(tmp_path / "r1")):
            assert (tmp_path / "r1" / f).read_bytes() == (tmp_path / "r2" / f).read_bytes(), f


def test_serialize_round_trip(unit, rng):
    for _ in range(5):
        d = random_element(unit, rng, max_order=2)
        back = parse_element(json.loads(json.dumps(element_to_spec(d))))
        assert action_residual(back, d) < 1e-12
    t = parse_element(THETA)
    assert action_residual(star(t, t), star(theta(unit), theta(unit))) < 1e-14


@pytest.mark.parametrize(
    "content, needle",
    [
        ("{not json", "bad.json:1:2: malformed JSON"),
        (json.dumps({"domain": [1, 0], "terms": []}), "domain"),
        (json.dumps({"domain": [0, 1], "terms": [{"order": -2, "coeff": {"separable": []}}]}), "terms[0].order"),
        (json.dumps({"domain": [0, 1], "terms": [{"order": 0, "coeff": {"separable": [{"a": {"builtin": "tan"}, "b": {"poly": [1]}}]}}]}), "terms[0].coeff.separable[0].a"),
        (json.dumps({"domain": [0, 1], "terms": [{"order": 0}]}), "coeff"),
    ],
)
def test_user_errors_exit_1(tmp_path, capsys, content, needle):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code = main(["mul", str(p), str(p), "--out", str(tmp_path / "o")])
    assert code == EXIT_USER
    assert needle in capsys.readouterr().err


def test_domain_mismatch_and_bad_flags(tmp_path, capsys):
    t = _write(tmp_path, "t.json", THETA)
    other = _write(tmp_path, "o.json", {**THETA, "domain": [0, 2]})
    assert main(["mul", t, other, "--out", str(tmp_path / "o")]) == EXIT_USER
    assert main(["mul", t, t, "--grid", "1", "--out", str(tmp_path / "o")]) == EXIT_USER
    assert main(["mul", t, t, "--domain", "2,1", "--out", str(tmp_path / "o")]) == EXIT_USER
    assert main(["discretize-check", t, t, "--ns", "64,x", "--out", str(tmp_path / "o")]) == EXIT_USER
    capsys.readouterr()


def test_domain_override(tmp_path):
    t = _write(tmp_path, "t.json", THETA)
    code, res = _run(tmp_path, "mul", t, t, "--domain", "0,2")
    assert code == EXIT_OK
    p = _element(tmp_path, "out", res["outputs"]["spec"])
    assert p.domain == Interval(0.0, 2.0)
    assert abs(p.theta_part(2.0, 0.0) - 2.0) < 1e-12


def test_module_entry_point_and_threads(tmp_path):
    t = _write(tmp_path, "t.json", THETA)
    env = {**os.environ, "STARCALC_THREADS": "1"}
    proc = subprocess.run(
        [sys.executable, "-m", "starcalc", "mul", t, t, "--out", str(tmp_path / "s")],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == EXIT_OK, proc.stderr
    assert json.loads(proc.stdout)["command"] == "mul"
    env["STARCALC_THREADS"] = "zero"
    proc = subprocess.run(
        [sys.executable, "-m", "starcalc", "mul", t, t, "--out", str(tmp_path / "s")],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == EXIT_USER and "STARCALC_THREADS" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "starcalc"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USER and "usage" in proc.stderr
