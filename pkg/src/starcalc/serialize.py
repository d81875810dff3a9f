"""JSON kernel specs and CSV grids.

A kernel spec looks like::

    {"domain": [0, 1],
     "orientation": "causal",
     "terms": [{"order": -1,
                "coeff": {"separable": [{"a": {"poly": [0, 1]},
                                         "b": {"builtin": "exp", "affine": [-1, 0]}}]}}]}

A function spec is one of ``{"poly": [...]}`` (monomial coefficients in
``x``), ``{"cheb": [...]}`` (Chebyshev coefficients on the domain) or
``{"builtin": name, "affine": [alpha, beta]}`` meaning ``f(alpha x + beta)``
with ``name`` in ``one, exp, expneg, sin, cos``. Numbers may be real or
``[re, im]`` pairs.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np

from .kernels import Interval, SeparableFn, UnivariateFn, interpolate
from .star import Orientation, StarElement, dirac_profile

__all__ = [
    "SpecError",
    "parse_domain",
    "parse_number",
    "parse_fn",
    "parse_separable",
    "parse_element",
    "element_to_spec",
    "fn_to_spec",
    "separable_to_spec",
    "load_json",
    "dumps",
    "theta_grid_csv",
    "dirac_csv",
    "columns_csv",
    "BUILTINS",
]

BUILTIN_DEGREE = 48

BUILTINS = {
    "one": lambda t: np.ones_like(t),
    "exp": np.exp,
    "expneg": lambda t: np.exp(-t),
    "sin": np.sin,
    "cos": np.cos,
}


class SpecError(ValueError):
    """Malformed input; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path
        self.message = message


def _need(obj, key, path):
    if not isinstance(obj, dict):
        raise SpecError(path, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SpecError(path, f"missing field '{key}'")
    return obj[key]


def parse_number(v, path: str) -> complex:
    if isinstance(v, bool):
        raise SpecError(path, "expected a number")
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, list) and len(v) == 2 and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v):
        z = complex(v[0], v[1])
    else:
        raise SpecError(path, f"expected a number or [re, im], got {json.dumps(v)}")
    if not np.isfinite(z):
        raise SpecError(path, "non-finite number")
    return z


def parse_domain(v, path: str = "domain") -> Interval:
    if not (isinstance(v, list) and len(v) == 2):
        raise SpecError(path, "expected [lo, hi]")
    lo, hi = (parse_number(x, f"{path}[{i}]") for i, x in enumerate(v))
    if lo.imag or hi.imag:
        raise SpecError(path, "domain endpoints must be real")
    try:
        return Interval(lo.real, hi.real)
    except ValueError as exc:
        raise SpecError(path, str(exc)) from None


def _number_list(v, path) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise SpecError(path, "expected a non-empty list of numbers")
    return np.array([parse_number(x, f"{path}[{i}]") for i, x in enumerate(v)])


def parse_fn(v, domain: Interval, path: str) -> UnivariateFn:
    if not isinstance(v, dict) or len(v.keys() & {"poly", "cheb", "builtin"}) != 1:
        raise SpecError(path, "expected exactly one of 'poly', 'cheb', 'builtin'")
    if "poly" in v:
        return UnivariateFn.from_monomials(domain, _number_list(v["poly"], f"{path}.poly"))
    if "cheb" in v:
        return UnivariateFn(domain, _number_list(v["cheb"], f"{path}.cheb"))
    name = v["builtin"]
    if name not in BUILTINS:
        raise SpecError(f"{path}.builtin", f"unknown builtin {name!r}; expected one of {sorted(BUILTINS)}")
    alpha, beta = 1.0, 0.0
    if "affine" in v:
        aff = v["affine"]
        if not (isinstance(aff, list) and len(aff) == 2):
            raise SpecError(f"{path}.affine", "expected [alpha, beta]")
        alpha, beta = (parse_number(x, f"{path}.affine[{i}]") for i, x in enumerate(aff))
    fn = BUILTINS[name]
    if name == "one":
        return UnivariateFn.constant(domain, 1.0)
    return interpolate(lambda x: fn(alpha * x + beta), domain, BUILTIN_DEGREE)


def parse_separable(v, domain: Interval, path: str) -> SeparableFn:
    items = _need(v, "separable", path)
    if not isinstance(items, list):
        raise SpecError(f"{path}.separable", "expected a list of {a, b} terms")
    terms = []
    for i, t in enumerate(items):
        p = f"{path}.separable[{i}]"
        terms.append((parse_fn(_need(t, "a", p), domain, f"{p}.a"), parse_fn(_need(t, "b", p), domain, f"{p}.b")))
    return SeparableFn.from_terms(domain, terms)


def parse_element(spec: Any, domain: Interval | None = None) -> StarElement:
    """Build a :class:`StarElement`; ``domain`` overrides the spec's own domain."""
    if domain is None:
        domain = parse_domain(_need(spec, "domain", ""), "domain")
    orient = spec.get("orientation", "causal") if isinstance(spec, dict) else "causal"
    if orient not in ("causal", "anticausal"):
        raise SpecError("orientation", f"expected 'causal' or 'anticausal', got {orient!r}")
    terms = _need(spec, "terms", "")
    if not isinstance(terms, list):
        raise SpecError("terms", "expected a list")
    parts: dict[int, SeparableFn] = {}
    for i, t in enumerate(terms):
        p = f"terms[{i}]"
        order = _need(t, "order", p)
        if isinstance(order, bool) or not isinstance(order, int) or order < -1:
            raise SpecError(f"{p}.order", f"expected an integer >= -1, got {json.dumps(order)}")
        coeff = parse_separable(_need(t, "coeff", p), domain, f"{p}.coeff")
        parts[order] = parts[order] + coeff if order in parts else coeff
    try:
        return StarElement(domain, parts, Orientation(orient))
    except ValueError as exc:
        raise SpecError("terms", str(exc)) from None


def _num(z: complex):
    z = complex(z)
    return [z.real, z.imag] if z.imag else z.real


def fn_to_spec(f: UnivariateFn) -> dict:
    return {"cheb": [_num(c) for c in f.coeffs]}


def separable_to_spec(c: SeparableFn) -> dict:
    return {"separable": [{"a": fn_to_spec(a), "b": fn_to_spec(b)} for a, b in c.terms]}


def element_to_spec(d: StarElement) -> dict:
    out = {"domain": d.domain.as_list(), "terms": []}
    if not d.is_causal:
        out["orientation"] = d.orientation.value
    for k, c in d.parts.items():
        out["terms"].append({"order": k, "coeff": separable_to_spec(c)})
    return out


def load_json(path: str):
    """Read JSON; decoding errors become :class:`SpecError` with line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}", f"malformed JSON ({exc.msg})") from None
    except OSError as exc:
        raise SpecError(path, exc.strerror or str(exc)) from None


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (complex, np.complexfloating)):
        return _num(v)
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    return v


def dumps(obj) -> str:
    """Deterministic JSON (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _fmt(v: float) -> str:
    return "%.17g" % v


def columns_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([x if isinstance(x, str) else (str(x) if isinstance(x, (int, np.integer)) else _fmt(x)) for x in row])
    return buf.getvalue()


def theta_grid_csv(d: StarElement, xs: np.ndarray) -> str:
    """``x, y, re, im`` of the Theta part (coefficient times the step) on ``xs x xs``."""
    vals = d.theta_part.grid(xs)
    mask = xs[:, None] >= xs[None, :] if d.is_causal else xs[:, None] <= xs[None, :]
    vals = np.where(mask, vals, 0.0)
    rows = ((xs[i], xs[j], vals[i, j].real, vals[i, j].imag) for i in range(xs.size) for j in range(xs.size))
    return columns_csv(["x", "y", "re", "im"], rows)


def dirac_csv(d: StarElement, xs: np.ndarray) -> str:
    """Dirac sidecar: ``order, x, re, im`` of the normal-form profiles ``h_l(x)`` of ``sum h_l delta^(l)``."""
    rows = []
    for order, h in sorted(dirac_profile(d).items()):
        v = h(xs)
        rows.extend((order, xs[i], v[i].real, v[i].imag) for i in range(xs.size))
    return columns_csv(["order", "x", "re", "im"], rows)
