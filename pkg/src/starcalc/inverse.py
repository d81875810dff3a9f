"""Inverses: Volterra resolvents, Theta-kernel inversion and finite-order inversion.

For a separable kernel ``K(x, y) = sum_i a_i(x) b_i(y)`` the resolvent
``R = K + K * R`` is again separable. With ``B(x) = b(x) a(x)^T`` and the
fundamental matrix ``V' = B V, V(lo) = I``,

    R(x, y) = a(x)^T V(x) V(y)^{-1} b(y),

so ``R`` has the same rank as ``K``. ``V`` and ``V^{-1}`` are obtained by RK4
(see :mod:`starcalc.odes`) and interpolated at Chebyshev nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, StructureError
from .kernels import (
    DEFAULT_DEGREE,
    SeparableFn,
    UnivariateFn,
    _rows_eval,
    _rows_from_values,
    interpolate,
    probe_points,
)
from .odes import solve_flow
from .star import (
    StarElement,
    _volterra_compose,
    action_residual,
    delta,
    dirac_part,
    dirac_profile,
    identity,
    power_kernel,
    smooth_part,
    star,
)

__all__ = [
    "ResolventResult",
    "volterra_resolvent",
    "rank1_resolvent",
    "resolvent_residual",
    "invert_theta_kernel",
    "invert_finite_order",
    "inversion_residual",
    "exp_identity_check",
]


@dataclass(frozen=True)
class ResolventResult:
    """Resolvent of a Volterra kernel together with how it was obtained.

    Attributes
    ----------
    resolvent : SeparableFn
        ``R`` with ``R = K + K * R = K + R * K`` on ``y <= x``.
    fundamental : tuple of tuple of UnivariateFn
        The ``s x s`` solution basis ``V`` with ``V(lo) = I`` (empty for ``K = 0``).
    diagnostics : dict
        ``residual_left`` / ``residual_right`` (scaled sup of the two
        resolvent identities on the lower probe triangle), ``steps``,
        ``max_condition`` (largest 2-norm condition number of ``V`` on the
        nodes) and ``degree``.
    """

    resolvent: SeparableFn
    fundamental: tuple = ()
    diagnostics: dict = field(default_factory=dict)


def _lower_mask(xs):
    return xs[:, None] >= xs[None, :]


def resolvent_residual(k: SeparableFn, r: SeparableFn) -> tuple[float, float]:
    """Scaled sup of ``R - K - K*R`` and ``R - K - R*K`` over ``y <= x``."""
    xs = probe_points(k.domain)
    mask = _lower_mask(xs)
    rk = r.grid(xs) - k.grid(xs)
    scale = 1.0 + max(np.max(np.abs(r.grid(xs))), np.max(np.abs(k.grid(xs))))
    left = rk - _volterra_compose(k, r).grid(xs)
    right = rk - _volterra_compose(r, k).grid(xs)
    return (
        float(np.max(np.abs(left[mask]))) / scale,
        float(np.max(np.abs(right[mask]))) / scale,
    )


def volterra_resolvent(k: SeparableFn, tol: float = 1e-10, steps: int = 512) -> ResolventResult:
    """Resolvent of the separable Volterra kernel ``k``.

    Parameters
    ----------
    k : SeparableFn
        Kernel of rank ``s``.
    tol : float
        Target for the RK4 step control and the resolvent identities.
    steps : int
        Initial number of RK4 steps across the interval (doubled as needed).

    Returns
    -------
    ResolventResult

    Raises
    ------
    NumericalError
        If ``V`` is singular, RK4 does not converge, or a resolvent
        identity fails by more than ``max(tol, 1e-9)``.
    """
    dom = k.domain
    k = k.compress()
    s = k.rank
    if s == 0:
        zero = SeparableFn.zero(dom)
        return ResolventResult(zero, (), {"residual_left": 0.0, "residual_right": 0.0, "steps": 0})

    a_rows, b_rows = k.a_rows, k.b_rows

    def field(xs):
        a = _rows_eval(a_rows, dom.to_unit(xs))  # (m, s)
        b = _rows_eval(b_rows, dom.to_unit(xs))
        return np.einsum("mi,mj->mij", b, a)

    flow = solve_flow(field, dom, s, tol=tol, steps=steps)
    t = dom.to_unit(flow.nodes)
    a_n = _rows_eval(a_rows, t)  # (n, s)
    b_n = _rows_eval(b_rows, t)
    u_vals = np.einsum("ni,nik->nk", a_n, flow.v_values)  # u_k = sum_i a_i V_ik
    w_vals = np.einsum("nkj,nj->nk", flow.w_values, b_n)  # w_k = sum_j W_kj b_j
    r = SeparableFn(dom, _rows_from_values(u_vals), _rows_from_values(w_vals))
    left, right = resolvent_residual(k, r)
    diag = {
        "residual_left": left,
        "residual_right": right,
        "steps": flow.steps,
        "max_condition": flow.max_condition,
        "degree": flow.nodes.size - 1,
    }
    if max(left, right) > max(tol, 1e-9):
        raise NumericalError(f"resolvent identity residual {max(left, right):.3e} exceeds tolerance")
    fundamental = tuple(
        tuple(UnivariateFn(dom, flow.v_coeffs[i, j]) for j in range(s)) for i in range(s)
    )
    return ResolventResult(r, fundamental, diag)


def rank1_resolvent(a: UnivariateFn, b: UnivariateFn, degree: int = 48) -> StarElement:
    """``(delta - a(x) b(y) Theta)^{-1} = delta + a(x) b(y) exp(F(x) - F(y)) Theta``.

    ``F`` is the antiderivative of ``a b`` based at ``lo``; the exponentials
    are interpolated at ``degree``.
    """
    f = a.mul(b).antideriv()
    ef = f.compose(np.exp, degree)
    emf = f.compose(lambda v: np.exp(-v), degree)
    return identity(a.domain) + smooth_part(SeparableFn.rank1(a.mul(ef), b.mul(emf)))


def inversion_residual(d: StarElement, inv: StarElement, seed: int = 0) -> tuple[float, float]:
    """Action residuals of ``d * inv = Id`` and ``inv * d = Id``."""
    one = identity(d.domain)
    return (
        action_residual(star(d, inv), one, seed=seed),
        action_residual(star(inv, d), one, seed=seed),
    )


def invert_theta_kernel(
    e: StarElement,
    tol: float = 1e-9,
    diag_floor: float = 1e-8,
    degree: int = 64,
) -> StarElement:
    """Inverse of ``e = e~(x, y) Theta`` with ``e~(x, x)`` bounded away from zero.

    The inverse is ``delta' * (1/e~(x,x)) delta * (delta + R Theta)`` where
    ``R`` is the resolvent of ``K(x, y) = d_y e~(x, y) / e~(y, y)``.

    Raises
    ------
    StructureError
        If ``e`` has Dirac parts or its diagonal drops below ``diag_floor``.
    NumericalError
        If the product with ``e`` differs from the identity by more than ``tol``.
    """
    if e.dirac_orders() or not e.is_causal:
        raise StructureError("expected a causal pure Theta element")
    dom = e.domain
    et = e.theta_part
    diag_fn = et.diag()
    xs = np.concatenate(([dom.lo], probe_points(dom), [dom.hi]))
    dvals = diag_fn(xs)
    if np.min(np.abs(dvals)) < diag_floor:
        bad = xs[int(np.argmin(np.abs(dvals)))]
        raise StructureError(
            f"diagonal e(x, x) nearly vanishes (|e| = {np.min(np.abs(dvals)):.3e} at x = {bad:.6g})"
        )
    inv_diag = interpolate(lambda x: 1.0 / diag_fn(x), dom, degree)
    k = et.partial(0, 1).mul_y(inv_diag)
    res = volterra_resolvent(k, tol=min(tol, 1e-10)).resolvent
    one = UnivariateFn.constant(dom, 1.0)
    scale_part = dirac_part(SeparableFn.rank1(inv_diag, one), 0)
    inv = star(delta(1, dom), star(scale_part, identity(dom) + smooth_part(res)))
    left, right = inversion_residual(e, inv)
    if max(left, right) > tol:
        raise NumericalError(f"inverse check failed: residual {max(left, right):.3e} > {tol:.1e}")
    return inv


def invert_finite_order(d: StarElement, tol: float = 1e-8, dirac_tol: float = 1e-9) -> StarElement:
    """Inverse of a finite-order element of order ``k``.

    ``e = d * Theta^(k+1)`` is formed; when its Dirac parts vanish (below
    ``dirac_tol`` on the probe grid) the inverse is
    ``Theta^(k+1) * e^{-1}`` with ``e^{-1}`` from :func:`invert_theta_kernel`.

    Raises
    ------
    StructureError
        If ``d`` is zero, anticausal, or ``d * Theta^(k+1)`` keeps a Dirac part.
    NumericalError
        If the final two-sided check fails by more than ``tol``.
    """
    if d.is_zero() or not d.is_causal:
        raise StructureError("expected a non-zero causal element")
    k = d.order
    dom = d.domain
    if k == -1:
        return invert_theta_kernel(d, tol=tol)
    lift = StarElement(dom, {-1: power_kernel(k, dom)})
    e = star(d, lift)
    prof = dirac_profile(e)
    scale = 1.0 + e.theta_part.probe_sup()
    for order, h in prof.items():
        if h.sup() > dirac_tol * scale:
            raise StructureError(
                f"d * Theta^{k + 1} keeps a delta^({order}) part of size {h.sup():.3e}; "
                "the element is not invertible by this route"
            )
    e_inv = invert_theta_kernel(smooth_part(e.theta_part), tol=tol)
    inv = star(lift, e_inv)
    left, right = inversion_residual(d, inv)
    if max(left, right) > tol:
        raise NumericalError(f"inverse check failed: residual {max(left, right):.3e} > {tol:.1e}")
    return inv


def exp_identity_check(h: UnivariateFn, degree: int = DEFAULT_DEGREE) -> float:
    """Residual of ``delta' * (e^{H(x) - H(y)} Theta) * (delta - h(x) Theta) = Id``.

    ``H`` is the antiderivative of ``h`` based at ``lo``.
    """
    dom = h.domain
    big_h = h.antideriv()
    kern = SeparableFn.rank1(big_h.compose(np.exp, degree), big_h.compose(lambda v: np.exp(-v), degree))
    one = UnivariateFn.constant(dom, 1.0)
    chain = star(
        star(delta(1, dom), smooth_part(kern)),
        identity(dom) - smooth_part(SeparableFn.rank1(h, one)),
    )
    return action_residual(chain, identity(dom))
