"""Command-line front end.

Every subcommand writes ``result.json`` (``{"command", "residuals",
"diagnostics", "outputs"}``) plus CSV grids into ``--out`` and prints the
result to stdout. Exit codes: 0 success, 1 user or parse error, 2 numerical
or structural failure inside a computation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .discretize import Grid, convergence_probe, mat_star, sample, write_matrix
from .errors import NumericalError, StructureError
from .inverse import invert_finite_order, inversion_residual
from .kernels import Interval
from .seminorms import CompactFamily, metric, seminorm
from .serialize import (
    SpecError,
    columns_csv,
    dirac_csv,
    dumps,
    element_to_spec,
    load_json,
    parse_domain,
    parse_element,
    parse_fn,
    parse_separable,
    theta_grid_csv,
)
from .solvers import VolterraProblem, solve_volterra2, time_ordered_exp, volterra_residual
from .star import star

EXIT_OK, EXIT_USER, EXIT_NUMERIC = 0, 1, 2


def _domain_override(args) -> Interval | None:
    if args.domain is None:
        return None
    try:
        lo, hi = (float(s) for s in args.domain.split(","))
        return Interval(lo, hi)
    except ValueError as exc:
        raise SpecError("--domain", f"expected 'lo,hi' with lo < hi ({exc})") from None


def _element(path: str, args):
    spec = load_json(path)
    try:
        return parse_element(spec, _domain_override(args))
    except SpecError as exc:
        raise SpecError(f"{path}:{exc.path}", exc.message) from None


def _grid_points(domain: Interval, n: int) -> np.ndarray:
    return Grid(domain, n).points


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        self.files: list[str] = []

    def text(self, name: str, content: str) -> str:
        self.out.mkdir(parents=True, exist_ok=True)
        with open(self.out / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        self.files.append(name)
        return name


def _element_outputs(w: _Writer, stem: str, d, n: int) -> dict:
    xs = _grid_points(d.domain, n)
    out = {"spec": w.text(f"{stem}.json", dumps(element_to_spec(d))), "theta_csv": w.text(f"{stem}_theta.csv", theta_grid_csv(d, xs))}
    if d.dirac_orders():
        out["dirac_csv"] = w.text(f"{stem}_dirac.csv", dirac_csv(d, xs))
    out["orders"] = list(d.parts)
    out["ranks"] = {str(k): c.rank for k, c in d.parts.items()}
    return out


def cmd_mul(args, w: _Writer) -> dict:
    d, e = _element(args.left, args), _element(args.right, args)
    if d.domain != e.domain:
        raise SpecError("domain", f"operands live on {d.domain.as_list()} and {e.domain.as_list()}")
    p = star(d, e)
    return {"residuals": {}, "diagnostics": {}, "outputs": _element_outputs(w, "product", p, args.grid)}


def cmd_inv(args, w: _Writer) -> dict:
    d = _element(args.spec, args)
    inv = invert_finite_order(d, tol=args.tol)
    left, right = inversion_residual(d, inv, seed=args.seed)
    return {
        "residuals": {"left": left, "right": right},
        "diagnostics": {"order": d.order},
        "outputs": _element_outputs(w, "inverse", inv, args.grid),
    }


def cmd_solve_volterra(args, w: _Writer) -> dict:
    spec = load_json(args.problem)
    try:
        dom = _domain_override(args) or parse_domain(spec.get("domain") if isinstance(spec, dict) else None)
        if not isinstance(spec, dict) or "kernel" not in spec or "forcing" not in spec:
            raise SpecError("", "expected fields 'kernel' and 'forcing'")
        k = parse_separable(spec["kernel"], dom, "kernel")
        g = parse_fn(spec["forcing"], dom, "forcing")
    except SpecError as exc:
        raise SpecError(f"{args.problem}:{exc.path}", exc.message) from None
    prob = VolterraProblem(k, g)
    u = solve_volterra2(prob, tol=args.tol)
    xs = _grid_points(dom, args.grid)
    vals = u(xs)
    name = w.text("u.csv", columns_csv(["x", "re", "im"], ((x, v.real, v.imag) for x, v in zip(xs, vals))))
    u_hi = complex(u(dom.hi))
    return {
        "residuals": {"equation": volterra_residual(prob, u)},
        "diagnostics": {"degree": u.degree},
        "outputs": {"u_csv": name, "u_hi": u_hi, "u_cheb": [complex(c) for c in u.coeffs]},
    }


def cmd_toe(args, w: _Writer) -> dict:
    spec = load_json(args.problem)
    try:
        dom = _domain_override(args) or parse_domain(spec.get("domain") if isinstance(spec, dict) else None)
        a_spec = spec.get("A") if isinstance(spec, dict) else None
        if not isinstance(a_spec, list) or not a_spec or any(not isinstance(r, list) or len(r) != len(a_spec) for r in a_spec):
            raise SpecError("A", "expected a square array of function specs")
        a = [[parse_fn(f, dom, f"A[{i}][{j}]") for j, f in enumerate(row)] for i, row in enumerate(a_spec)]
    except SpecError as exc:
        raise SpecError(f"{args.problem}:{exc.path}", exc.message) from None
    res = time_ordered_exp(a, dom, tol=min(args.tol, 1e-10))
    xs = _grid_points(dom, args.grid)
    r = len(a)
    rows = []
    for xi in xs:
        for yj in xs[xs <= xi]:
            u = res(xi, yj)
            rows.extend((xi, yj, i, j, u[i, j].real, u[i, j].imag) for i in range(r) for j in range(r))
    name = w.text("U.csv", columns_csv(["x", "y", "i", "j", "re", "im"], rows))
    diag = dict(res.diagnostics)
    resid = {k: diag.pop(k) for k in ("identity_left", "identity_right") if k in diag}
    return {
        "residuals": resid,
        "diagnostics": diag,
        "outputs": {"U_csv": name, "U_hi_lo": res(dom.hi, dom.lo)},
    }


def cmd_metric(args, w: _Writer) -> dict:
    d, e = _element(args.left, args), _element(args.right, args)
    if d.domain != e.domain:
        raise SpecError("domain", f"operands live on {d.domain.as_list()} and {e.domain.as_list()}")
    fam = CompactFamily(d.domain)
    m = metric(d, e, fam, kmax=args.kmax)
    diff = d - e
    sems = {str(k): seminorm(diff, k, fam) for k in range(-1, args.kmax + 1)}
    return {
        "residuals": {},
        "diagnostics": {"kmax": args.kmax},
        "outputs": {"metric": m.value, "tail_bound": m.tail_bound, "seminorms_of_difference": sems},
    }


def cmd_discretize_check(args, w: _Writer) -> dict:
    d, e = _element(args.left, args), _element(args.right, args)
    if d.domain != e.domain:
        raise SpecError("domain", f"operands live on {d.domain.as_list()} and {e.domain.as_list()}")
    try:
        ns = [int(s) for s in args.ns.split(",")]
        if any(n < 2 for n in ns):
            raise ValueError
    except ValueError:
        raise SpecError("--ns", f"expected comma-separated grid sizes >= 2, got {args.ns!r}") from None
    table = convergence_probe(d, e, ns)
    outputs = {"table": table.as_dict()}
    outputs["table_csv"] = w.text(
        "convergence.csv", columns_csv(["N", "dx", "error"], zip(table.ns, table.dxs, table.errors))
    )
    if args.dump:
        grid = Grid(d.domain, ns[-1])
        w.out.mkdir(parents=True, exist_ok=True)
        write_matrix(w.out / args.dump, mat_star(sample(d, grid), sample(e, grid)).entries)
        w.files.append(args.dump)
        outputs["dump"] = args.dump
    return {"residuals": {}, "diagnostics": {"rate": table.rate}, "outputs": outputs}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", help="override the domain, as 'lo,hi'")
    common.add_argument("--grid", type=int, default=33, help="points per axis of output CSV grids (default 33)")
    common.add_argument("--tol", type=float, default=1e-8, help="accuracy target for checks (default 1e-8)")
    common.add_argument("--kmax", type=int, default=12, help="metric truncation depth (default 12)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--out", default="starcalc-out", help="output directory (default starcalc-out)")

    p = argparse.ArgumentParser(prog="starcalc", description="Star-product calculus on causal distributions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mul", parents=[common], help="star product of two kernel specs")
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(func=cmd_mul)

    s = sub.add_parser("inv", parents=[common], help="star inverse of a finite-order kernel spec")
    s.add_argument("spec")
    s.set_defaults(func=cmd_inv)

    s = sub.add_parser("solve-volterra", parents=[common], help="solve u = g + int K u")
    s.add_argument("problem", help="JSON with 'domain', 'kernel' {separable: ...} and 'forcing' (function spec)")
    s.set_defaults(func=cmd_solve_volterra)

    s = sub.add_parser("toe", parents=[common], help="time-ordered exponential of a matrix A(x)")
    s.add_argument("problem", help="JSON with 'domain' and 'A' (square array of function specs)")
    s.set_defaults(func=cmd_toe)

    s = sub.add_parser("metric", parents=[common], help="truncated metric between two kernel specs")
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(func=cmd_metric)

    s = sub.add_parser("discretize-check", parents=[common], help="matrix-product convergence to the star product")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--ns", default="64,128,256,512", help="comma-separated grid sizes")
    s.add_argument("--dump", help="file name (inside --out) for a STARMAT1 dump of the finest product")
    s.set_defaults(func=cmd_discretize_check)
    return p


def _thread_limit():
    raw = os.environ.get("STARCALC_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        raise SpecError("STARCALC_THREADS", f"expected a positive integer, got {raw!r}") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are user errors here
        return EXIT_USER if exc.code not in (0, None) else EXIT_OK
    w = _Writer(Path(args.out))
    try:
        if args.grid < 2:
            raise SpecError("--grid", "need at least 2 points")
        limiter = _thread_limit()
        try:
            result = args.func(args, w)
        finally:
            if limiter is not None:
                limiter.unregister()
    except SpecError as exc:
        print(f"starcalc: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except (NumericalError, StructureError) as exc:
        kind = "numerical" if isinstance(exc, NumericalError) else "structure"
        payload = {"command": args.command, "error": {"kind": kind, "message": str(exc)}}
        w.text("result.json", dumps(payload))
        print(dumps(payload), end="", file=sys.stderr)
        return EXIT_NUMERIC
    result = {"command": args.command, **result}
    w.text("result.json", dumps(result))
    sys.stdout.write(dumps(result))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
