"""Star actions on functions of one variable, inner/outer products, the
two-variable bracket and the transpose.

The left injection sends ``f`` to ``(x, y) -> f(x)`` and the right one to
``(x, y) -> f(y)``; star-multiplying an element with an injected function
gives integral operators acting on columns or rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import chebyshev as C

from .kernels import Interval, SeparableFn, UnivariateFn, _rows_mul
from .star import Orientation, StarElement, act_left

__all__ = [
    "Side",
    "InjectedFn",
    "apply_left",
    "apply_right",
    "inner",
    "hermitian_inner",
    "outer",
    "left_outer",
    "right_outer",
    "star_injected",
    "integrate_rows",
    "bracket2",
    "transpose",
    "clenshaw_curtis",
    "QUAD_NODES",
]

QUAD_NODES = 257


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class InjectedFn:
    """``f`` seen as a function of two variables: ``f(x)`` (left) or ``f(y)`` (right)."""

    f: UnivariateFn
    side: Side = Side.LEFT

    def __call__(self, x, y):
        return self.f(x) if Side(self.side) is Side.LEFT else self.f(y)


@lru_cache(maxsize=None)
def _cc_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Clenshaw-Curtis nodes and weights on [-1, 1] with ``n`` points."""
    if n < 2:
        raise ValueError("Clenshaw-Curtis needs at least 2 nodes")
    N = n - 1
    th = np.pi * np.arange(N + 1) / N
    x = np.cos(th)
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    inner_th = th[1:-1]
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N * N - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * inner_th) / (4 * k * k - 1)
        v -= np.cos(N * inner_th) / (N * N - 1)
    else:
        w[0] = w[N] = 1.0 / (N * N)
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner_th) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / N
    return x[::-1].copy(), w[::-1].copy()


def clenshaw_curtis(domain: Interval, n: int = QUAD_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``domain``; exact for polynomials of degree ``< n``."""
    t, w = _cc_unit(n)
    return domain.from_unit(t), w * (0.5 * domain.length)


def _check_domain(a: Interval, b: Interval):
    if a != b:
        raise ValueError(f"domain mismatch: {a} vs {b}")


def apply_left(g: StarElement, f: UnivariateFn) -> UnivariateFn:
    """``(g * psi_l(f))(x) = int g(x, t) f(t) dt``.

    The Theta part integrates over ``[lo, x]`` (causal) or ``[x, hi]``
    (anticausal); an order-``k`` Dirac part with coefficient ``c`` gives
    ``d^k/dt^k [c(x, t) f(t)]`` at ``t = x``.
    """
    return act_left(g, f)


def apply_right(f: UnivariateFn, g: StarElement) -> UnivariateFn:
    """``(psi_r(f) * g)(y) = int f(t) g(t, y) dt``."""
    _check_domain(f.domain, g.domain)
    dom = g.domain
    out = UnivariateFn.zero(dom)
    th = g.theta_part
    if th.rank:
        fa = _rows_mul(th.a_rows, np.broadcast_to(f.coeffs, (th.rank, f.coeffs.size)))
        prim = C.chebint(fa, lbnd=-1.0, scl=0.5 * dom.length, axis=1)
        if g.orientation is Orientation.CAUSAL:
            # int_y^hi = F(hi) - F(y)
            total = C.chebval(1.0, prim.T)
            prim = -prim
            prim[:, 0] += total
        out = out + UnivariateFn(dom, _rows_mul(th.b_rows, prim).sum(axis=0))
    for k in g.dirac_orders():
        c = g.parts[k]
        acc = UnivariateFn.zero(dom)
        for l in range(k + 1):
            acc = acc + comb(k, l) * c.partial(k - l, 0).diag().mul(f.diff(l))
        out = out + (-1) ** k * acc
    return out


def inner(h: UnivariateFn, f: UnivariateFn, n: int = QUAD_NODES) -> complex:
    """``<h, f> = int_I h f`` by Clenshaw-Curtis quadrature (bilinear, no conjugation)."""
    _check_domain(h.domain, f.domain)
    n = max(n, h.degree + f.degree + 1)
    x, w = clenshaw_curtis(h.domain, n)
    return complex(np.sum(w * h(x) * f(x)))


def hermitian_inner(h: UnivariateFn, f: UnivariateFn, n: int = QUAD_NODES) -> complex:
    """``int conj(h) f``, the chain ``psi_l(h)^* * psi_l(f)``."""
    return inner(h.conj(), f, n)


def outer(h: UnivariateFn, f: UnivariateFn) -> SeparableFn:
    """``psi_l(h) * psi_r(f) = |I| h(x) f(y)``."""
    _check_domain(h.domain, f.domain)
    return SeparableFn.rank1(h * h.domain.length, f).compress(0.0)


def left_outer(f: UnivariateFn, g: StarElement) -> SeparableFn:
    """``psi_l(f) * g = f(x) int_I g(t, y) dt``."""
    return SeparableFn.rank1(f, integrate_rows(g)).compress(0.0)


def right_outer(g: StarElement, f: UnivariateFn) -> SeparableFn:
    """``g * psi_r(f) = int_I g(x, t) dt f(y)``."""
    one = UnivariateFn.constant(g.domain, 1.0)
    return SeparableFn.rank1(apply_left(g, one), f).compress(0.0)


def star_injected(left: InjectedFn, right: InjectedFn):
    """Star product of two injected functions.

    Returns a complex number for ``psi_r(h) * psi_l(f)`` and a
    :class:`SeparableFn` otherwise. Integrals are exact Chebyshev integrals,
    independent of the quadrature used by :func:`inner`.
    """
    h, f = left.f, right.f
    _check_domain(h.domain, f.domain)
    ls, rs = Side(left.side), Side(right.side)
    one = UnivariateFn.constant(h.domain, 1.0)
    if ls is Side.RIGHT and rs is Side.LEFT:
        return h.mul(f).integral()
    if ls is Side.LEFT and rs is Side.RIGHT:
        return SeparableFn.rank1(h * h.domain.length, f)
    if ls is Side.LEFT:
        return SeparableFn.rank1(h * f.integral(), one)
    return SeparableFn.rank1(one * h.integral(), f)


def integrate_rows(g: StarElement) -> UnivariateFn:
    """``1 * g``: the function ``y -> int_I g(t, y) dt``."""
    return apply_right(UnivariateFn.constant(g.domain, 1.0), g)


def bracket2(h: StarElement, f: SeparableFn) -> complex:
    """``<h, f> = int_{I^2} h(x, y) f(x, y) dx dy`` (not a star product).

    The Theta part is integrated over the triangle ``y <= x`` (``y >= x`` when
    anticausal); an order-``k`` Dirac part with coefficient ``c`` contributes
    ``int_I d^k/dy^k [c f](x, y) at y = x dx``.
    """
    _check_domain(h.domain, f.domain)
    dom = h.domain
    total = 0j
    th = h.theta_part
    if th.rank and f.rank:
        cf = th.pointwise_mul(f)
        prim = C.chebint(cf.b_rows, lbnd=-1.0, scl=0.5 * dom.length, axis=1)
        if h.orientation is Orientation.ANTICAUSAL:
            tot = C.chebval(1.0, prim.T)
            prim = -prim
            prim[:, 0] += tot
        line = UnivariateFn(dom, _rows_mul(cf.a_rows, prim).sum(axis=0))
        total += _cc_integral(line)
    for k in h.dirac_orders():
        cf = h.parts[k].pointwise_mul(f)
        total += _cc_integral(cf.partial(0, k).diag())
    return complex(total)


def _cc_integral(u: UnivariateFn) -> complex:
    x, w = clenshaw_curtis(u.domain, max(QUAD_NODES, u.degree + 1))
    return complex(np.sum(w * u(x)))


def transpose(d: StarElement) -> StarElement:
    """``d^T(x, y) = d(y, x)``.

    The Theta coefficient swaps slots and the orientation flips; an order-``k``
    Dirac coefficient ``c(x, y)`` becomes ``(-1)^k c(y, x)`` with the support
    unchanged, since ``delta^(k)(y - x) = (-1)^k delta^(k)(x - y)``.
    """
    parts = {}
    for k, c in d.parts.items():
        swapped = c.swap()
        parts[k] = swapped if k == -1 else (-1) ** k * swapped
    flipped = Orientation.ANTICAUSAL if d.is_causal else Orientation.CAUSAL
    if -1 not in d.parts:
        flipped = d.orientation
    return StarElement(d.domain, parts, flipped)
