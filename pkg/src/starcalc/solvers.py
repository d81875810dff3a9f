"""Volterra equations of the second kind and time-ordered exponentials.

``u = g + int_lo^x K(x, t) u(t) dt`` is solved with the resolvent of ``K``:
``u = g + int_lo^x R(x, t) g(t) dt``.

For a matrix ``A(x)`` the time-ordered exponential ``U(x, y)`` solves
``d/dx U = A(x) U``, ``U(y, y) = I``. With the fundamental matrix ``V`` and
``W = V^{-1}``, ``U(x, y) = V(x) W(y)`` and ``U Theta`` satisfies

    (delta I - A(y) Theta) * U Theta = Theta I,
    U Theta * (delta I - A(x) Theta) = Theta I,

i.e. ``U Theta = Theta * (delta I - A(x) Theta)^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

import numpy as np

from .actions import clenshaw_curtis, QUAD_NODES
from .errors import NumericalError
from .inverse import volterra_resolvent
from .kernels import Interval, SeparableFn, UnivariateFn, _rows_eval, probe_points
from .odes import solve_flow
from .star import StarElement, act_left, action_residual, smooth_part, star, theta

__all__ = [
    "MatrixStarElement",
    "star_matrix_mul",
    "matrix_action_residual",
    "VolterraProblem",
    "solve_volterra2",
    "volterra_residual",
    "TOEResult",
    "time_ordered_exp",
    "toe_identity_residuals",
    "neumann_toe",
]


@dataclass(frozen=True)
class MatrixStarElement:
    """Square array of causal star elements on a shared domain."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        r = len(rows)
        if r == 0 or any(len(row) != r for row in rows):
            raise ValueError("expected a non-empty square array")
        dom = rows[0][0].domain
        for row in rows:
            for d in row:
                if d.domain != dom:
                    raise ValueError("entries live on different domains")
                if not d.is_causal:
                    raise ValueError("entries must be causal")

    @property
    def r(self) -> int:
        return len(self.entries)

    @property
    def domain(self) -> Interval:
        return self.entries[0][0].domain

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "MatrixStarElement") -> "MatrixStarElement":
        return star_matrix_mul(self, other)

    @classmethod
    def diagonal(cls, d: StarElement, r: int) -> "MatrixStarElement":
        """``d`` on the diagonal, zero elsewhere."""
        zero = StarElement(d.domain)
        return cls(tuple(tuple(d if i == j else zero for j in range(r)) for i in range(r)))


def star_matrix_mul(dm: MatrixStarElement, em: MatrixStarElement) -> MatrixStarElement:
    """Entry ``(i, j)`` is ``sum_k dm[i, k] * em[k, j]``."""
    if dm.r != em.r:
        raise ValueError(f"dimension mismatch: {dm.r} vs {em.r}")
    r = dm.r
    out = []
    for i in range(r):
        row = []
        for j in range(r):
            acc = StarElement(dm.domain)
            for k in range(r):
                acc = acc + star(dm[i, k], em[k, j])
            row.append(acc.compressed())
        out.append(tuple(row))
    return MatrixStarElement(tuple(out))


def matrix_action_residual(dm: MatrixStarElement, em: MatrixStarElement, **kw) -> float:
    """Largest entrywise :func:`action_residual`."""
    return max(action_residual(dm[i, j], em[i, j], **kw) for i in range(dm.r) for j in range(dm.r))


@dataclass(frozen=True)
class VolterraProblem:
    """``u(x) = g(x) + int_lo^x K(x, t) u(t) dt`` on ``kernel.domain``."""

    kernel: SeparableFn
    forcing: UnivariateFn

    def __post_init__(self):
        if self.kernel.domain != self.forcing.domain:
            raise ValueError("kernel and forcing live on different domains")

    @property
    def domain(self) -> Interval:
        return self.kernel.domain


def volterra_residual(p: VolterraProblem, u: UnivariateFn, n: int = QUAD_NODES) -> float:
    """``sup |u - g - int_lo^x K u|`` over ``n`` Clenshaw-Curtis nodes, scaled by ``1 + sup|u|``."""
    xs, _ = clenshaw_curtis(p.domain, n)
    lhs = u(xs)
    rhs = p.forcing(xs) + act_left(smooth_part(p.kernel), u)(xs)
    return float(np.max(np.abs(lhs - rhs))) / (1.0 + float(np.max(np.abs(lhs))))


def solve_volterra2(p: VolterraProblem, tol: float = 1e-9) -> UnivariateFn:
    """Solve the second-kind equation through the resolvent of ``p.kernel``.

    Raises
    ------
    NumericalError
        If the resolvent fails or the substituted-back residual exceeds ``tol``.
    """
    res = volterra_resolvent(p.kernel, tol=min(tol, 1e-10))
    u = p.forcing + act_left(smooth_part(res.resolvent), p.forcing)
    r = volterra_residual(p, u)
    if r > tol:
        raise NumericalError(f"Volterra residual {r:.3e} exceeds {tol:.1e}")
    return u


MatrixFn = Sequence[Sequence[UnivariateFn]]


def _matrix_field(a: MatrixFn, domain: Interval):
    r = len(a)
    if any(len(row) != r for row in a):
        raise ValueError("A must be square")
    width = max(f.coeffs.size for row in a for f in row)
    rows = np.zeros((r * r, width), dtype=complex)
    for i in range(r):
        for j in range(r):
            f = a[i][j]
            if f.domain != domain:
                raise ValueError(f"A[{i}][{j}] lives on {f.domain}, expected {domain}")
            rows[i * r + j, : f.coeffs.size] = f.coeffs

    def field(xs):
        return _rows_eval(rows, domain.to_unit(xs)).reshape(-1, r, r)

    return field


@dataclass(frozen=True)
class TOEResult:
    """Time-ordered exponential ``U(x, y) = V(x) V(y)^{-1}``.

    Attributes
    ----------
    matrix : MatrixStarElement
        ``U_ij Theta`` as rank-``r`` separable Theta kernels.
    v_coeffs, w_coeffs : ndarray, shape (r, r, n)
        Chebyshev coefficients of ``V`` and ``W = V^{-1}``.
    diagnostics : dict
    """

    domain: Interval
    matrix: MatrixStarElement
    v_coeffs: np.ndarray
    w_coeffs: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def _eval(self, coeffs, x):
        t = self.domain.to_unit(np.asarray(x, dtype=float))
        r = coeffs.shape[0]
        return _rows_eval(coeffs.reshape(r * r, -1), np.atleast_1d(t)).reshape(-1, r, r)

    def V(self, x) -> np.ndarray:
        return self._eval(self.v_coeffs, x)

    def W(self, x) -> np.ndarray:
        return self._eval(self.w_coeffs, x)

    def __call__(self, x, y) -> np.ndarray:
        """``U(x, y)``; scalar arguments give an ``r x r`` array, arrays give ``(m, r, r)``."""
        out = self.V(x) @ self.W(y)
        return out[0] if np.ndim(x) == 0 and np.ndim(y) == 0 else out


def toe_identity_residuals(a: MatrixFn, u: MatrixStarElement) -> tuple[float, float]:
    """Residuals of ``(delta - A(y) Theta) * U = Theta I`` and ``U * (delta - A(x) Theta) = Theta I``."""
    dom = u.domain
    r = u.r
    one = UnivariateFn.constant(dom, 1.0)
    ident = MatrixStarElement.diagonal(StarElement(dom, {0: SeparableFn.constant(dom, 1.0)}), r)

    def a_theta(slot):
        return MatrixStarElement(
            tuple(
                tuple(
                    smooth_part(SeparableFn.rank1(a[i][j], one) if slot == "x" else SeparableFn.rank1(one, a[i][j]))
                    for j in range(r)
                )
                for i in range(r)
            )
        )

    def minus(p, q):
        return MatrixStarElement(tuple(tuple(p[i, j] - q[i, j] for j in range(r)) for i in range(r)))

    target = MatrixStarElement.diagonal(theta(dom), r)
    left = star_matrix_mul(minus(ident, a_theta("y")), u)
    right = star_matrix_mul(u, minus(ident, a_theta("x")))
    return matrix_action_residual(left, target), matrix_action_residual(right, target)


def time_ordered_exp(a: MatrixFn, domain: Interval, tol: float = 1e-10, check: bool = True) -> TOEResult:
    """Time-ordered exponential of ``A`` through the fundamental matrix.

    Parameters
    ----------
    a : r x r nested sequence of UnivariateFn
    domain : Interval
    tol : float
        RK4 step-control target; the resolvent identities are checked at
        ``max(100 tol, 1e-8)`` when ``check`` is set.

    Raises
    ------
    NumericalError
        On RK4 failure or when a resolvent identity fails.
    """
    r = len(a)
    flow = solve_flow(_matrix_field(a, domain), domain, r, tol=tol)
    vc, wc = flow.v_coeffs, flow.w_coeffs
    entries = []
    for i in range(r):
        row = []
        for j in range(r):
            # U_ij(x, y) = sum_k V_ik(x) W_kj(y)
            terms = [(UnivariateFn(domain, vc[i, k]), UnivariateFn(domain, wc[k, j])) for k in range(r)]
            row.append(smooth_part(SeparableFn.from_terms(domain, terms)))
        entries.append(tuple(row))
    u = MatrixStarElement(tuple(entries))
    diag = {"steps": flow.steps, "max_condition": flow.max_condition, "degree": flow.nodes.size - 1}
    if check:
        left, right = toe_identity_residuals(a, u)
        diag.update(identity_left=left, identity_right=right)
        if max(left, right) > max(100 * tol, 1e-8):
            raise NumericalError(f"TOE resolvent identity residual {max(left, right):.3e}")
    return TOEResult(domain, u, vc, wc, diag)


def neumann_toe(a: MatrixFn, domain: Interval, terms: int = 12) -> tuple[MatrixStarElement, float]:
    """Truncated series ``sum_{n=0}^{terms} (A(y) Theta)^{*n} * Theta I``.

    Returns the partial sum and the remainder bound
    ``r^{terms} (M |I|)^{terms+1} / (terms+1)! * exp(r M |I|)`` with ``M = max |A_ij|``.
    """
    r = len(a)
    one = UnivariateFn.constant(domain, 1.0)
    step = MatrixStarElement(
        tuple(tuple(smooth_part(SeparableFn.rank1(one, a[i][j])) for j in range(r)) for i in range(r))
    )
    term = MatrixStarElement.diagonal(theta(domain), r)
    total = term
    for _ in range(terms):
        term = star_matrix_mul(step, term)
        total = MatrixStarElement(tuple(tuple(total[i, j] + term[i, j] for j in range(r)) for i in range(r)))
    xs = probe_points(domain)
    m = max(float(np.max(np.abs(f(xs)))) for row in a for f in row)
    ml = m * domain.length
    bound = r ** terms * ml ** (terms + 1) / factorial(terms + 1) * np.exp(r * ml)
    return total, float(bound)
