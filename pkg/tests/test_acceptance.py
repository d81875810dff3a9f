"""Acceptance criteria, one test per criterion.

Each test evaluates every sub-check of its criterion, prints and records a
``CRITERION n <name>: PASS/FAIL (details)`` line (collected again in the
terminal summary), then asserts. Tolerances are the ones the criteria state.
"""

import json
from math import factorial

import numpy as np
from conftest import ACCEPTANCE_LINES
from oracles import rk4_propagator

from starcalc.actions import InjectedFn, Side, apply_left, inner, star_injected, transpose
from starcalc.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USER, main
from starcalc.discretize import Grid, convergence_probe, dirac_matrix, mat_star, sample
from starcalc.inverse import exp_identity_check, invert_finite_order, invert_theta_kernel, inversion_residual, rank1_resolvent
from starcalc.kernels import Interval, SeparableFn, UnivariateFn, interpolate, probe_points
from starcalc.sampling import random_element, random_separable, random_theta_element, random_univariate
from starcalc.seminorms import metric, seminorm, submult_probe
from starcalc.serialize import element_to_spec, load_json, parse_element
from starcalc.solvers import VolterraProblem, solve_volterra2, time_ordered_exp, volterra_residual
from starcalc.star import (
    action_residual,
    delta,
    dirac_part,
    dprime_product_left_form,
    dprime_product_right_form,
    identity,
    random_test_function,
    smooth_part,
    star,
    star_power,
    theta,
)

UNIT = Interval(0.0, 1.0)


def _rng(n):
    return np.random.default_rng(1000 + n)


def _report(n: int, name: str, checks: dict[str, tuple[bool, str]]) -> bool:
    ok = all(passed for passed, _ in checks.values())
    details = "; ".join(f"{k}: {'ok' if passed else 'FAIL'} ({info})" for k, (passed, info) in checks.items())
    line = f"CRITERION {n} {name}: {'PASS' if ok else 'FAIL'} ({details})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _exp_kernel(dom, sign=1.0):
    return SeparableFn.rank1(interpolate(lambda t: np.exp(sign * t), dom), interpolate(lambda t: np.exp(-sign * t), dom))


def test_criterion_1_identity():
    rng = _rng(1)
    one = identity(UNIT)
    worst_unit = 0.0
    for _ in range(50):
        d = random_element(UNIT, rng, max_order=2)
        worst_unit = max(worst_unit, action_residual(star(one, d), d), action_residual(star(d, one), d))
    worst_delta = 0.0
    for i in range(-3, 4):
        for j in range(-3, 4):
            if i + j >= -3:
                worst_delta = max(worst_delta, action_residual(star(delta(i, UNIT), delta(j, UNIT)), delta(i + j, UNIT)))
    xs = probe_points(UNIT)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    low = X >= Y
    worst_theta = 0.0
    for n in range(1, 7):
        c = star_power(theta(UNIT), n).theta_part.grid(xs)
        worst_theta = max(worst_theta, float(np.max(np.abs(c - (X - Y) ** (n - 1) / factorial(n - 1))[low])))
    ok = _report(
        1,
        "identity",
        {
            "unit on 50 elements": (worst_unit <= 1e-10, f"max residual {worst_unit:.2e} <= 1e-10"),
            "delta^(i)*delta^(j), i,j in [-3,3]": (worst_delta <= 1e-10, f"max residual {worst_delta:.2e} <= 1e-10"),
            "Theta powers n <= 6": (worst_theta <= 1e-12, f"max coefficient error {worst_theta:.2e} <= 1e-12"),
        },
    )
    assert ok


def test_criterion_2_associativity_distributivity():
    rng = _rng(2)
    worst_a = worst_d = 0.0
    for _ in range(100):
        d, e, f = (random_element(UNIT, rng) for _ in range(3))
        de = star(d, e)
        worst_a = max(worst_a, action_residual(star(de, f), star(d, star(e, f))))
        worst_d = max(worst_d, action_residual(star(d, e + f), de + star(d, f)))
    ok = _report(
        2,
        "associativity/distributivity",
        {
            "associativity, 100 triples": (worst_a <= 1e-8, f"max residual {worst_a:.2e} <= 1e-8"),
            "distributivity, 100 triples": (worst_d <= 1e-8, f"max residual {worst_d:.2e} <= 1e-8"),
        },
    )
    assert ok


def test_criterion_3_schwartz_forms():
    rng = _rng(3)
    worst = worst_direct = 0.0
    for _ in range(20):
        f, g = random_separable(UNIT, rng), random_separable(UNIT, rng)
        left, right = dprime_product_left_form(f, g), dprime_product_right_form(f, g)
        worst = max(worst, action_residual(left, right))
        worst_direct = max(worst_direct, action_residual(left, star(dirac_part(f, 1), dirac_part(g, 1))))
    ok = _report(
        3,
        "Schwartz representation",
        {
            "two expansions, 20 pairs": (worst <= 1e-9, f"max residual {worst:.2e} <= 1e-9"),
            "expansion vs star": (worst_direct <= 1e-9, f"max residual {worst_direct:.2e} <= 1e-9"),
        },
    )
    assert ok


def test_criterion_4_inversion():
    rng = _rng(4)
    worst_r1 = 0.0
    for _ in range(20):
        a, b = random_univariate(UNIT, rng, degree=4), random_univariate(UNIT, rng, degree=4)
        d = identity(UNIT) - smooth_part(SeparableFn.rank1(a, b))
        worst_r1 = max(worst_r1, *inversion_residual(d, rank1_resolvent(a, b)))
    inv_theta = invert_theta_kernel(theta(UNIT))
    xs = probe_points(UNIT)
    structure = list(inv_theta.parts) == [1] and float(np.max(np.abs(inv_theta.parts[1].grid(xs) - 1.0))) == 0.0
    inv = invert_finite_order(identity(UNIT) - theta(UNIT))
    r_fo = action_residual(inv, identity(UNIT) + smooth_part(_exp_kernel(UNIT)))
    exp_res = {
        name: exp_identity_check(interpolate(fn, UNIT))
        for name, fn in (("0", lambda t: 0 * t), ("1", lambda t: 1 + 0 * t), ("x", lambda t: t), ("sin", np.sin))
    }
    ok = _report(
        4,
        "inversion",
        {
            "rank-1 closed form, 20 pairs": (worst_r1 <= 1e-9, f"max residual {worst_r1:.2e} <= 1e-9"),
            "Theta^-1 = delta'": (structure, f"orders {list(inv_theta.parts)}, coefficient exactly 1"),
            "(delta - Theta)^-1": (r_fo <= 1e-8, f"residual {r_fo:.2e} <= 1e-8"),
            "exponentiation identity": (
                max(exp_res.values()) < 1e-8,
                ", ".join(f"h={k}: {v:.1e}" for k, v in exp_res.items()) + " < 1e-8",
            ),
        },
    )
    assert ok


def test_criterion_5_discretization():
    rng = _rng(5)
    rates, monotone = [], True
    for _ in range(10):
        t = convergence_probe(random_theta_element(UNIT, rng), random_theta_element(UNIT, rng))
        rates.append(t.rate)
        monotone &= all(a > b for a, b in zip(t.errors, t.errors[1:]))
    rate_ok = all(0.8 <= r <= 1.2 for r in rates)
    g = Grid(UNIT, 48)
    worst_chain = 0.0
    for k in range(-2, 3):
        for j in range(-2, 3):
            if k + j >= -2:
                lhs = dirac_matrix(k, g) @ dirac_matrix(j, g) * g.dx
                rhs = dirac_matrix(k + j, g)
                worst_chain = max(worst_chain, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))))
    s_chain = mat_star(mat_star(sample(delta(1, UNIT), g), sample(theta(UNIT), g)), sample(identity(UNIT), g)).entries
    s_err = float(np.max(np.abs(s_chain - np.eye(48) / g.dx)) * g.dx)
    ok = _report(
        5,
        "discretization oracle",
        {
            "fitted rates, 10 Theta pairs": (rate_ok, f"rates in [{min(rates):.4f}, {max(rates):.4f}], required [0.8, 1.2]"),
            "errors decrease": (monotone, "strictly decreasing over N = 64..512"),
            "Dirac scaling chains k,j in [-2,2]": (worst_chain <= 1e-12, f"max relative error {worst_chain:.1e}"),
            "delta' Theta delta = delta": (s_err <= 1e-12, f"error {s_err:.1e}"),
        },
    )
    assert ok


def test_criterion_6_frechet():
    rng = _rng(6)
    homog = subadd = 0.0
    mono = True
    for _ in range(20):
        d, e = random_element(UNIT, rng, max_order=2), random_element(UNIT, rng, max_order=2)
        lam = complex(*rng.standard_normal(2))
        ps = [seminorm(d, k) for k in range(-1, 4)]
        mono &= all(a <= b for a, b in zip(ps, ps[1:]))
        for k in range(-1, 3):
            pd, pe = ps[k + 1], seminorm(e, k)
            homog = max(homog, abs(seminorm(lam * d, k) - abs(lam) * pd) / (1 + abs(lam) * pd))
            subadd = max(subadd, (seminorm(d + e, k) - pd - pe) / (1 + pd + pe))
    sym = tri = 0.0
    for _ in range(50):
        a, b, c = (random_element(UNIT, rng, max_order=2) for _ in range(3))
        ab, ba = metric(a, b).value, metric(b, a).value
        sym = max(sym, abs(ab - ba))
        tri = max(tri, metric(a, c).value - ab - metric(b, c).value)
    fails, worst_ratio = {}, {}
    for k in range(3):
        fails[k], worst_ratio[k] = 0, 0.0
        for _ in range(100):
            res = submult_probe(random_element(UNIT, rng, max_order=k), random_element(UNIT, rng, max_order=k), k)
            fails[k] += not res.passed
            worst_ratio[k] = max(worst_ratio[k], res.lhs / res.rhs if res.rhs else 0.0)
    ok = _report(
        6,
        "Frechet structure",
        {
            "homogeneity": (homog <= 1e-12, f"max scaled defect {homog:.1e} <= 1e-12"),
            "subadditivity": (subadd <= 1e-12, f"max scaled excess {subadd:.1e} <= 1e-12"),
            "p_k monotone": (mono, "p_-1 <= ... <= p_3 on 20 elements"),
            "metric symmetry, 50 triples": (sym <= 1e-12, f"max asymmetry {sym:.1e}"),
            "metric triangle, 50 triples": (tri <= 1e-12, f"max excess {tri:.1e}"),
            **{
                f"submultiplicativity k={k}, 100 pairs": (
                    fails[k] == 0,
                    f"{fails[k]} violations, max lhs/rhs {worst_ratio[k]:.3g}",
                )
                for k in range(3)
            },
        },
    )
    assert ok


def test_criterion_7_actions():
    rng = _rng(7)
    worst_adj = 0.0
    for _ in range(10):
        g = random_theta_element(UNIT, rng, rank=2, degree=4)
        h, f = random_univariate(UNIT, rng, 5), random_univariate(UNIT, rng, 5)
        worst_adj = max(worst_adj, abs(inner(h, apply_left(transpose(g), f)) - inner(apply_left(g, h), f)))
    worst_adj_dirac = 0.0
    for _ in range(10):
        g = random_element(UNIT, rng, max_order=2)
        h = random_test_function(UNIT, rng, 5, vanish_lo=3, vanish_hi=3)
        f = random_test_function(UNIT, rng, 5, vanish_lo=3, vanish_hi=3)
        worst_adj_dirac = max(worst_adj_dirac, abs(inner(h, apply_left(transpose(g), f)) - inner(apply_left(g, h), f)))
    xs = probe_points(UNIT)
    worst_comp = 0.0
    for _ in range(10):
        d, e = random_element(UNIT, rng, max_order=2), random_element(UNIT, rng, max_order=2)
        phi = random_test_function(UNIT, rng, 6, vanish_lo=3)
        lhs = apply_left(star(d, e), phi)(xs)
        rhs = apply_left(d, apply_left(e, phi))(xs)
        worst_comp = max(worst_comp, float(np.max(np.abs(lhs - rhs)) / (1 + np.max(np.abs(rhs)))))
    worst_inner = 0.0
    for _ in range(10):
        h, f = random_univariate(UNIT, rng, 6), random_univariate(UNIT, rng, 6)
        chain = star_injected(InjectedFn(h, Side.RIGHT), InjectedFn(f, Side.LEFT))
        worst_inner = max(worst_inner, abs(chain - inner(h, f)))
    ok = _report(
        7,
        "actions",
        {
            "adjoint identity, Theta-order g": (worst_adj <= 1e-8, f"max defect {worst_adj:.1e} <= 1e-8"),
            "adjoint identity, Dirac g, boundary-vanishing h,f": (
                worst_adj_dirac <= 1e-8,
                f"max defect {worst_adj_dirac:.1e} <= 1e-8",
            ),
            "star as composition": (worst_comp <= 1e-8, f"max scaled defect {worst_comp:.1e} <= 1e-8"),
            "inner product as star": (worst_inner <= 1e-12, f"max defect {worst_inner:.1e} <= 1e-12"),
        },
    )
    assert ok


def test_criterion_8_solvers():
    rng = _rng(8)
    prob = VolterraProblem(SeparableFn.constant(UNIT, 1.0), UnivariateFn.constant(UNIT, 1.0))
    u = solve_volterra2(prob)
    err_e = abs(u(1.0) - np.e)
    resid = volterra_residual(prob, u)
    toe = time_ordered_exp([[UnivariateFn.identity(UNIT)]], UNIT)
    pts = np.linspace(0, 1, 21)
    err_x = max(abs(toe(x, y)[0, 0] - np.exp((x * x - y * y) / 2)) for x in pts for y in pts[pts <= x])
    zero, one = UnivariateFn.constant(UNIT, 0.0), UnivariateFn.constant(UNIT, 1.0)
    nc = time_ordered_exp([[zero, UnivariateFn.identity(UNIT)], [one, zero]], UNIT)
    err_nc = 0.0
    for _ in range(10):
        x, y = np.sort(rng.uniform(0, 1, 2))[::-1]
        ref = rk4_propagator(lambda t: np.array([[0.0, t], [1.0, 0.0]]), x, y, 8 * 512)
        err_nc = max(err_nc, float(np.max(np.abs(nc(x, y) - ref))))
    grid = np.linspace(0, 1, 11)
    err_flow = max(
        float(np.max(np.abs(nc(x, y) @ nc(y, z) - nc(x, z))))
        for x in grid
        for y in grid[grid <= x]
        for z in grid[grid <= y]
    )
    ok = _report(
        8,
        "solvers",
        {
            "Volterra u(1) = e": (err_e <= 1e-8, f"error {err_e:.1e} <= 1e-8"),
            "Volterra residual": (resid < 1e-9, f"{resid:.1e} < 1e-9"),
            "TOE A=x": (err_x <= 1e-9, f"max error {err_x:.1e} <= 1e-9"),
            "TOE non-commuting vs 8x RK4": (err_nc <= 1e-6, f"max error {err_nc:.1e} <= 1e-6"),
            "flow property": (err_flow <= 1e-8, f"max defect {err_flow:.1e} <= 1e-8"),
        },
    )
    assert ok


def _dirac_spec(k):
    return {"domain": [0, 1], "terms": [{"order": k, "coeff": {"separable": [{"a": {"builtin": "one"}, "b": {"builtin": "one"}}]}}]}


def test_criterion_9_cli(tmp_path, capsys):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)

    def run(out, *argv):
        code = main([*argv, "--out", str(tmp_path / out)])
        path = tmp_path / out / "result.json"
        return code, (json.loads(path.read_text()) if path.exists() else None)

    def element(out, res, key="spec"):
        return parse_element(load_json(str(tmp_path / out / res["outputs"][key])))

    theta_p = write("theta.json", _dirac_spec(-1))
    d = random_element(UNIT, _rng(9), max_order=2)
    d_p = write("d.json", element_to_spec(d))
    one_p = write("one.json", _dirac_spec(0))

    # determinism: every file of two identical runs is byte-identical
    same = True
    for i, argv in enumerate((["mul", theta_p, d_p], ["inv", theta_p], ["metric", theta_p, d_p])):
        run(f"a{i}", *argv, "--seed", "5")
        run(f"b{i}", *argv, "--seed", "5")
        for f in (tmp_path / f"a{i}").iterdir():
            same &= f.read_bytes() == (tmp_path / f"b{i}" / f.name).read_bytes()

    # exit codes
    codes = {
        "ok": run("e0", "mul", theta_p, theta_p)[0],
        "user": run("e1", "mul", write("bad.json", "{oops"), theta_p)[0],
        "numeric": run("e2", "inv", write("x.json", {"domain": [0, 1], "terms": [{"order": -1, "coeff": {"separable": [{"a": {"poly": [0, 1]}, "b": {"poly": [1]}}]}}]}))[0],
    }
    codes_ok = codes == {"ok": EXIT_OK, "user": EXIT_USER, "numeric": EXIT_NUMERIC}

    # criterion 1 through serialized specs
    c1 = 0.0
    for out, (left, right, ref) in enumerate(
        [(one_p, d_p, d), (d_p, one_p, d), (theta_p, write("dp.json", _dirac_spec(1)), identity(UNIT))]
        + [(write(f"l{i}{j}.json", _dirac_spec(i)), write(f"r{i}{j}.json", _dirac_spec(j)), delta(i + j, UNIT)) for i in (-1, 1, 2) for j in (-1, 0, 1)]
    ):
        code, res = run(f"m{out}", "mul", left, right)
        c1 = max(c1, action_residual(element(f"m{out}", res), ref) if code == EXIT_OK else np.inf)
    code, res = run("tt", "mul", theta_p, theta_p)
    p = element("tt", res)
    c1 = max(c1, max(abs(p.theta_part(x, y) - (x - y)) for x, y in [(0.9, 0.1), (1.0, 0.0), (0.4, 0.4)]))

    # criterion 4 through serialized specs
    code, res = run("i1", "inv", theta_p)
    inv = element("i1", res)
    c4_theta = code == EXIT_OK and list(inv.parts) == [1] and max(res["residuals"].values()) < 1e-10
    dmt = {"domain": [0, 1], "terms": [{"order": 0, "coeff": {"separable": [{"a": {"poly": [1]}, "b": {"poly": [1]}}]}}, {"order": -1, "coeff": {"separable": [{"a": {"poly": [-1]}, "b": {"poly": [1]}}]}}]}
    code, res = run("i2", "inv", write("dmt.json", dmt))
    c4_fo = action_residual(element("i2", res), identity(UNIT) + smooth_part(_exp_kernel(UNIT))) if code == EXIT_OK else np.inf

    # criterion 8 through serialized specs
    vol = {"domain": [0, 1], "kernel": {"separable": [{"a": {"builtin": "one"}, "b": {"builtin": "one"}}]}, "forcing": {"builtin": "one"}}
    code, res = run("v", "solve-volterra", write("vol.json", vol))
    c8_v = abs(res["outputs"]["u_hi"] - np.e) if code == EXIT_OK else np.inf
    c8_r = res["residuals"]["equation"] if code == EXIT_OK else np.inf
    code, res = run("t", "toe", write("toe.json", {"domain": [0, 1], "A": [[{"poly": [0, 1]}]]}))
    c8_t = abs(np.asarray(res["outputs"]["U_hi_lo"], dtype=float).ravel()[0] - np.exp(0.5)) if code == EXIT_OK else np.inf
    capsys.readouterr()

    ok = _report(
        9,
        "CLI",
        {
            "determinism": (same, "byte-identical outputs for mul, inv, metric"),
            "exit codes": (codes_ok, f"{codes}"),
            "criterion 1 via specs": (c1 <= 1e-10, f"max residual {c1:.1e} <= 1e-10"),
            "criterion 4 via specs": (c4_theta and c4_fo <= 1e-8, f"Theta^-1 = delta': {c4_theta}, (delta - Theta)^-1 residual {c4_fo:.1e}"),
            "criterion 8 via specs": (
                c8_v <= 1e-8 and c8_r < 1e-9 and c8_t <= 1e-9,
                f"|u(1) - e| {c8_v:.1e}, residual {c8_r:.1e}, |U(1,0) - e^0.5| {c8_t:.1e}",
            ),
        },
    )
    assert ok
