"""Fixed-step RK4 for linear matrix flows, stepped through Chebyshev nodes.

Used by the resolvent and time-ordered-exponential code: solving
``V' = A(x) V`` (and the inverse flow ``W' = -W A(x)``) at the nodes of a
Chebyshev grid lets the solution be interpolated spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError
from .kernels import DEGREE_CAP, Interval, _rows_from_values, _unit_nodes, _values_to_coeffs

MatrixField = Callable[[np.ndarray], np.ndarray]  # xs (m,) -> (m, s, s)


@dataclass(frozen=True)
class FlowSolution:
    """Node values and interpolation coefficients of ``V`` and ``W = V^-1``.

    ``v_coeffs`` and ``w_coeffs`` have shape ``(s, s, n)``: Chebyshev
    coefficients of each matrix entry on the domain.
    """

    domain: Interval
    nodes: np.ndarray
    v_values: np.ndarray
    w_values: np.ndarray
    v_coeffs: np.ndarray
    w_coeffs: np.ndarray
    steps: int
    richardson_change: float
    max_condition: float


def _step_points(domain: Interval, nodes: np.ndarray, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Step boundaries covering ``[lo, last node]`` and the index of each node in them."""
    h = domain.length / steps
    pts = [np.array([domain.lo])]
    idx = []
    count = 0
    prev = domain.lo
    for x in nodes:
        m = max(1, int(np.ceil((x - prev) / h - 1e-12)))
        pts.append(prev + (x - prev) * np.arange(1, m + 1) / m)
        count += m
        idx.append(count)
        prev = x
    return np.concatenate(pts), np.array(idx)


def _rk4(field: MatrixField, ts: np.ndarray, s: int, inverse: bool) -> np.ndarray:
    hs = np.diff(ts)
    mids = ts[:-1] + 0.5 * hs
    a0 = field(ts[:-1])
    am = field(mids)
    a1 = field(ts[1:])
    out = np.empty((ts.size, s, s), dtype=complex)
    y = np.eye(s, dtype=complex)
    out[0] = y
    if inverse:
        # W' = -W A
        for k, h in enumerate(hs):
            k1 = -y @ a0[k]
            k2 = -(y + 0.5 * h * k1) @ am[k]
            k3 = -(y + 0.5 * h * k2) @ am[k]
            k4 = -(y + h * k3) @ a1[k]
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            out[k + 1] = y
    else:
        for k, h in enumerate(hs):
            k1 = a0[k] @ y
            k2 = am[k] @ (y + 0.5 * h * k1)
            k3 = am[k] @ (y + 0.5 * h * k2)
            k4 = a1[k] @ (y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            out[k + 1] = y
    return out


def _solve_at_nodes(field, domain, nodes, steps, s):
    ts, idx = _step_points(domain, nodes, steps)
    v = _rk4(field, ts, s, inverse=False)[idx]
    w = _rk4(field, ts, s, inverse=True)[idx]
    return v, w


def solve_flow(
    field: MatrixField,
    domain: Interval,
    s: int,
    tol: float = 1e-10,
    steps: int = 512,
    degree: int = 48,
    max_steps: int = 1 << 15,
) -> FlowSolution:
    """Fundamental matrix ``V`` (``V' = A V``, ``V(lo) = I``) and its inverse flow.

    Steps are doubled until node values change by less than ``tol / 10``
    (relative to their size). The interpolation degree is doubled, up to
    the global cap, while the trailing Chebyshev coefficients exceed ``tol``.

    Raises
    ------
    NumericalError
        If step doubling does not converge or ``V`` is numerically singular.
    """
    while True:
        nodes = domain.from_unit(_unit_nodes(degree + 1))
        n_steps = steps
        v, w = _solve_at_nodes(field, domain, nodes, n_steps, s)
        change = np.inf
        while True:
            v2, w2 = _solve_at_nodes(field, domain, nodes, 2 * n_steps, s)
            size = 1.0 + max(np.max(np.abs(v2)), np.max(np.abs(w2)))
            change = max(np.max(np.abs(v2 - v)), np.max(np.abs(w2 - w))) / size
            v, w, n_steps = v2, w2, 2 * n_steps
            if change < tol / 10:
                break
            if n_steps >= max_steps:
                raise NumericalError(
                    f"RK4 did not converge: change {change:.3e} after {n_steps} steps"
                )
        n = nodes.size
        flat = np.concatenate([v.reshape(n, s * s), w.reshape(n, s * s)], axis=1)
        raw = _values_to_coeffs(n) @ flat
        scale = np.max(np.abs(raw))
        tail = np.max(np.abs(raw[-4:]))
        if tail <= tol * max(scale, 1.0) or degree >= DEGREE_CAP:
            break
        degree = min(2 * degree, DEGREE_CAP)
    vc = _rows_from_values(v.reshape(n, s * s)).reshape(s, s, -1)
    wc = _rows_from_values(w.reshape(n, s * s)).reshape(s, s, -1)
    conds = np.array([np.linalg.cond(m) for m in v])
    if not np.all(np.isfinite(conds)) or np.max(conds) > 1e14:
        worst = int(np.argmax(np.where(np.isfinite(conds), conds, np.inf)))
        raise NumericalError(f"fundamental matrix numerically singular near x = {nodes[worst]:.6g}")
    return FlowSolution(domain, nodes, v, w, vc, wc, n_steps, float(change), float(np.max(conds)))
