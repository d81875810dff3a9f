"""Causal distributions ``d = sum_i d_i(x, y) delta^(i)(x - y)`` and their
star product.

Order ``-1`` is the Heaviside step ``Theta`` (with ``Theta(0) = 1``), order
``0`` is the unit ``delta`` and order ``k > 0`` is the k-th distributional
derivative of ``delta``. Coefficients are :class:`~starcalc.kernels.SeparableFn`.

Representations of Dirac parts are not unique: ``f(x, y) delta'`` and
``f(x, x) delta' - f^(0,1)(x, x) delta`` are the same distribution. Equality
is therefore decided by action on test functions (:func:`action_equal`),
never by comparing coefficients.

The product is computed after rewriting every Dirac part with coefficients
that depend on ``x`` only,

    c(x, y) delta^(k)  ==  sum_l C(k, l) c^(0, k-l)(x, x) delta^(l),

a unique normal form in which the four kinds of term products have short
closed forms (see :func:`star`).
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb, factorial
from types import MappingProxyType
from typing import Mapping

import numpy as np
from numpy.polynomial import chebyshev as C

from .kernels import (
    Interval,
    SeparableFn,
    UnivariateFn,
    _rows_mul,
    interpolate,
    probe_points,
)

__all__ = [
    "Orientation",
    "StarElement",
    "STAR_TOL",
    "delta",
    "theta",
    "identity",
    "smooth_part",
    "dirac_part",
    "power_kernel",
    "add",
    "sub",
    "scale",
    "star",
    "star_power",
    "schwartz_left",
    "schwartz_right",
    "dprime_product_left_form",
    "dprime_product_right_form",
    "ConvolutionCheck",
    "to_convolution",
    "dirac_profile",
    "random_test_function",
    "action_residual",
    "action_equal",
]

# rank/degree compression tolerance applied after every product
STAR_TOL = 1e-12


class Orientation(str, enum.Enum):
    CAUSAL = "causal"
    ANTICAUSAL = "anticausal"


def power_kernel(m: int, domain: Interval) -> SeparableFn:
    """``(x - y)**m / m!`` as a rank ``m + 1`` separable function."""
    x = UnivariateFn.identity(domain)
    terms = []
    for k in range(m + 1):
        a = UnivariateFn.constant(domain, 1.0)
        for _ in range(k):
            a = a * x
        b = UnivariateFn.constant(domain, (-1) ** (m - k) * comb(m, k) / factorial(m))
        for _ in range(m - k):
            b = b * x
        terms.append((a, b))
    return SeparableFn.from_terms(domain, terms)


class StarElement:
    """A finite-order causal (or, after transposition, anticausal) element.

    Parameters
    ----------
    domain : Interval
        The compact interval ``I``.
    parts : mapping of int to SeparableFn
        Coefficient of each order. Orders below ``-1`` are folded into the
        ``Theta`` coefficient using ``delta^(-n) = (x-y)^(n-1)/(n-1)! Theta``.
    orientation : Orientation
        ``CAUSAL`` means the ``Theta`` part is ``Theta(x - y)``; ``ANTICAUSAL``
        means ``Theta(y - x)``. Dirac parts are the same in both.
    """

    __slots__ = ("domain", "orientation", "parts", "_multipliers")

    def __init__(
        self,
        domain: Interval,
        parts: Mapping[int, SeparableFn] | None = None,
        orientation: Orientation = Orientation.CAUSAL,
    ):
        orientation = Orientation(orientation)
        merged: dict[int, SeparableFn] = {}
        for order, coeff in (parts or {}).items():
            order = int(order)
            if coeff.domain != domain:
                raise ValueError(f"coefficient of order {order} lives on {coeff.domain}, expected {domain}")
            if order < -1:
                if orientation is not Orientation.CAUSAL:
                    raise ValueError("orders below -1 are only defined for causal elements")
                coeff = coeff.pointwise_mul(power_kernel(-order - 1, domain))
                order = -1
            if order in merged:
                coeff = merged[order] + coeff
            merged[order] = coeff
        cleaned = {k: merged[k] for k in sorted(merged) if merged[k].rank > 0}
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "orientation", orientation)
        object.__setattr__(self, "parts", MappingProxyType(cleaned))
        object.__setattr__(self, "_multipliers", None)

    def __setattr__(self, name, value):
        raise AttributeError("StarElement is immutable")

    @property
    def order(self) -> int | None:
        """Largest order with a coefficient, or ``None`` for the zero element."""
        return max(self.parts) if self.parts else None

    @property
    def is_causal(self) -> bool:
        return self.orientation is Orientation.CAUSAL

    def coefficient(self, order: int) -> SeparableFn:
        return self.parts.get(order, SeparableFn.zero(self.domain))

    @property
    def theta_part(self) -> SeparableFn:
        return self.coefficient(-1)

    def dirac_orders(self) -> list[int]:
        return [k for k in self.parts if k >= 0]

    def is_zero(self) -> bool:
        return not self.parts

    # linear structure
    def _check(self, other: "StarElement"):
        if not isinstance(other, StarElement):
            raise TypeError(f"expected StarElement, got {type(other).__name__}")
        if other.domain != self.domain:
            raise ValueError(f"domain mismatch: {self.domain} vs {other.domain}")
        if other.orientation is not self.orientation:
            raise ValueError("orientation mismatch: cannot combine causal and anticausal elements")

    def __add__(self, other: "StarElement") -> "StarElement":
        self._check(other)
        parts = dict(self.parts)
        for k, c in other.parts.items():
            parts[k] = parts[k] + c if k in parts else c
        return StarElement(self.domain, parts, self.orientation)

    def __neg__(self) -> "StarElement":
        return StarElement(self.domain, {k: -c for k, c in self.parts.items()}, self.orientation)

    def __sub__(self, other: "StarElement") -> "StarElement":
        return self + (-other)

    def __mul__(self, s) -> "StarElement":
        if isinstance(s, StarElement):
            raise TypeError("use star(d, e) or d @ e for the star product")
        return StarElement(self.domain, {k: c * s for k, c in self.parts.items()}, self.orientation)

    __rmul__ = __mul__

    def __matmul__(self, other: "StarElement") -> "StarElement":
        return star(self, other)

    def compressed(self, tol: float = STAR_TOL) -> "StarElement":
        """Compress every coefficient; parts that vanish to ``tol`` are pruned."""
        return StarElement(
            self.domain, {k: c.compress(tol) for k, c in self.parts.items()}, self.orientation
        )

    def __repr__(self):
        body = ", ".join(f"{k}: rank {c.rank}" for k, c in self.parts.items())
        return f"StarElement([{self.domain.lo}, {self.domain.hi}], {self.orientation.value}, {{{body}}})"


# constructors


def delta(k: int, domain: Interval) -> StarElement:
    """``delta^(k)``; ``k = 0`` is the unit, ``k = -1`` is ``Theta``, ``k < -1`` a Theta power."""
    return StarElement(domain, {k: SeparableFn.constant(domain, 1.0)})


def identity(domain: Interval) -> StarElement:
    return delta(0, domain)


def theta(domain: Interval) -> StarElement:
    return delta(-1, domain)


def smooth_part(f: SeparableFn) -> StarElement:
    """``f(x, y) Theta(x - y)``."""
    return StarElement(f.domain, {-1: f})


def dirac_part(f: SeparableFn, k: int) -> StarElement:
    """``f(x, y) delta^(k)(x - y)``."""
    return StarElement(f.domain, {k: f})


def add(d: StarElement, e: StarElement) -> StarElement:
    return d + e


def sub(d: StarElement, e: StarElement) -> StarElement:
    return d - e


def scale(s: complex, d: StarElement) -> StarElement:
    return d * s


# normal form and product


def dirac_profile(d: StarElement) -> dict[int, UnivariateFn]:
    """Dirac parts rewritten as ``sum_l h_l(x) delta^(l)``; returns ``{l: h_l}``."""
    out: dict[int, UnivariateFn] = {}
    for k in d.dirac_orders():
        c = d.parts[k]
        for l in range(k + 1):
            h = comb(k, l) * c.partial(0, k - l).diag()
            out[l] = out[l] + h if l in out else h
    return {l: h for l, h in out.items() if not h.is_zero()}


def _volterra_compose(p: SeparableFn, q: SeparableFn) -> SeparableFn:
    """``int_y^x p(x, t) q(t, y) dt`` in separable form.

    For each term pair ``a(x) b(t) * c(t) e(y)`` the integral is
    ``a(x) e(y) (B(x) - B(y))`` with ``B`` the antiderivative of ``b c``,
    which contributes two rank-1 terms.
    """
    r1, r2 = p.rank, q.rank
    bc = _rows_mul(np.repeat(p.b_rows, r2, axis=0), np.tile(q.a_rows, (r1, 1)))
    big_b = C.chebint(bc, lbnd=-1.0, scl=0.5 * p.domain.length, axis=1)
    a_rep = np.repeat(p.a_rows, r2, axis=0)
    e_rep = np.tile(q.b_rows, (r1, 1))
    first = SeparableFn(p.domain, _rows_mul(a_rep, big_b), e_rep)
    second = SeparableFn(p.domain, -a_rep, _rows_mul(big_b, e_rep))
    return first + second


def _is_unit(d: StarElement) -> bool:
    if d.orientation is not Orientation.CAUSAL or list(d.parts) != [0]:
        return False
    prof = dirac_profile(d)
    return list(prof) == [0] and prof[0].coeffs.size == 1 and prof[0].coeffs[0] == 1.0


def star(d: StarElement, e: StarElement, tol: float = STAR_TOL) -> StarElement:
    """The star product ``(d * e)(x, y) = int d(x, t) e(t, y) dt``.

    With ``d = P Theta + sum_p h_p(x) delta^(p)`` and
    ``e = Q Theta + sum_m g_m(x) delta^(m)`` in normal form, the bilinear
    expansion uses

    * ``P Theta * Q Theta = [int_y^x P(x,t) Q(t,y) dt] Theta``;
    * ``h delta^(p) * g delta^(m) = sum_l C(p,l) h g^(p-l) delta^(m+l)``;
    * ``h delta^(p) * Q Theta = h Q^(p,0) Theta
      + sum_{q<p} sum_l C(p-1-q, l) h D_q^(p-1-q-l) delta^(l)``
      with ``D_q(x) = Q^(q,0)(x, x)``;
    * ``P Theta * g delta^(m) = (-1)^m G^(0,m) Theta
      + sum_{r<m} (-1)^r G^(0,r)(x, x) delta^(m-1-r)`` with ``G = P(x,t) g(t)``.

    Every coefficient is compressed at ``tol`` afterwards.
    """
    d._check(e)
    if not d.is_causal:
        raise ValueError("star product is defined on causal elements only")
    if _is_unit(d):
        return e
    if _is_unit(e):
        return d
    dom = d.domain
    big_p, big_q = d.theta_part, e.theta_part
    hd, ge = dirac_profile(d), dirac_profile(e)

    theta_terms: list[SeparableFn] = []
    dirac_terms: dict[int, list[UnivariateFn]] = defaultdict(list)

    if big_p.rank and big_q.rank:
        theta_terms.append(_volterra_compose(big_p, big_q))

    for p, h in hd.items():
        for m, g in ge.items():
            for l in range(p + 1):
                dirac_terms[m + l].append(comb(p, l) * h.mul(g.diff(p - l)))
        if big_q.rank:
            theta_terms.append(big_q.partial(p, 0).mul_x(h))
            for q in range(p):
                dq = big_q.partial(q, 0).diag()
                n = p - 1 - q
                for l in range(n + 1):
                    dirac_terms[l].append(comb(n, l) * h.mul(dq.diff(n - l)))

    if big_p.rank:
        for m, g in ge.items():
            big_g = big_p.mul_y(g)
            theta_terms.append((-1) ** m * big_g.partial(0, m))
            for r in range(m):
                dirac_terms[m - 1 - r].append((-1) ** r * big_g.partial(0, r).diag())

    one = UnivariateFn.constant(dom, 1.0)
    parts: dict[int, SeparableFn] = {}
    if theta_terms:
        acc = theta_terms[0]
        for t in theta_terms[1:]:
            acc = acc + t
        parts[-1] = acc.compress(tol)
    for k in sorted(dirac_terms):
        h = dirac_terms[k][0]
        for t in dirac_terms[k][1:]:
            h = h + t
        parts[k] = SeparableFn.rank1(h, one).compress(tol)
    return StarElement(dom, parts)


def _pure_delta_order(d: StarElement) -> int | None:
    """``k`` if ``d`` is exactly ``delta^(k)`` (constant-1 coefficient), else ``None``."""
    if len(d.parts) != 1 or not d.is_causal:
        return None
    (k, c), = d.parts.items()
    xs = probe_points(d.domain, 16)
    if np.allclose(c.grid(xs), 1.0, rtol=0, atol=1e-14):
        return k
    return None


def star_power(d: StarElement, n: int) -> StarElement:
    """``d`` star-multiplied with itself ``n`` times.

    Negative ``n`` is accepted only for pure ``delta^(k)``, for which
    ``delta^(k)^(*n) = delta^(k n)``; other inverses go through
    :func:`starcalc.inverse.invert_finite_order`.
    """
    k = _pure_delta_order(d)
    if k is not None:
        return delta(k * n, d.domain)
    if n < 0:
        raise ValueError("negative star powers are only supported for pure delta^(k)")
    result = identity(d.domain)
    base = d
    while n:
        if n & 1:
            result = star(result, base)
        n >>= 1
        if n:
            base = star(base, base)
    return result


# independent closed forms used as cross-checks


def _accumulate(parts: dict[int, SeparableFn], order: int, coeff: SeparableFn):
    parts[order] = parts[order] + coeff if order in parts else coeff


def schwartz_left(j: int, f: SeparableFn, i: int) -> StarElement:
    """``delta^(j) * (f delta^(i))`` in closed form.

    For ``i = -1``: ``f^(j,0)(x,y) Theta + sum_{k=1..j} f^(j-k,0)(y,y) delta^(k-1)``,
    with the diagonal traces taken at ``(y, y)``. For ``i >= 0`` the
    y-trace form does not hold and the Leibniz expansion
    ``sum_{k=0..j} C(j,k) f^(j-k,0)(x,y) delta^(i+k)`` is returned instead.
    ``j = -1`` is supported for ``i = -1`` only (Volterra integral
    ``int_y^x f(t, y) dt``).
    """
    dom = f.domain
    if j == -1:
        if i != -1:
            raise ValueError("schwartz_left with j = -1 requires i = -1")
        big_f = f.antideriv_x()
        return StarElement(dom, {-1: big_f - big_f.freeze("x")})
    if j < -1 or i < -1:
        raise ValueError("orders must be >= -1")
    parts: dict[int, SeparableFn] = {}
    if i == -1:
        _accumulate(parts, i, f.partial(j, 0))
        for k in range(1, j + 1):
            _accumulate(parts, i + k, f.partial(j - k, 0).freeze("x"))
    else:
        for k in range(j + 1):
            _accumulate(parts, i + k, comb(j, k) * f.partial(j - k, 0))
    return StarElement(dom, parts)


def schwartz_right(f: SeparableFn, i: int, j: int) -> StarElement:
    """``(f delta^(i)) * delta^(j)`` in closed form.

    For ``i = -1``: ``(-1)^j f^(0,j)(x,y) Theta + sum_{k=1..j} (-1)^(j+k) f^(0,j-k)(x,x) delta^(k-1)``.
    For ``i >= 0``: ``sum_{k=0..j} (-1)^(j+k) C(j,k) f^(0,j-k)(x,y) delta^(i+k)``.
    ``j = -1`` is supported for ``i = -1`` only.
    """
    dom = f.domain
    if j == -1:
        if i != -1:
            raise ValueError("schwartz_right with j = -1 requires i = -1")
        big_f = f.antideriv_y()
        return StarElement(dom, {-1: big_f.freeze("y") - big_f})
    if j < -1 or i < -1:
        raise ValueError("orders must be >= -1")
    parts: dict[int, SeparableFn] = {}
    if i == -1:
        _accumulate(parts, i, (-1) ** j * f.partial(0, j))
        for k in range(1, j + 1):
            _accumulate(parts, i + k, (-1) ** (j + k) * f.partial(0, j - k).freeze("y"))
    else:
        for k in range(j + 1):
            _accumulate(parts, i + k, (-1) ** (j + k) * comb(j, k) * f.partial(0, j - k))
    return StarElement(dom, parts)


def dprime_product_left_form(f: SeparableFn, g: SeparableFn) -> StarElement:
    """``(f delta') * (g delta')`` expanded through the action of the left ``delta'``."""
    fd = f.diag()
    f01d = f.partial(0, 1).diag()
    d1 = g.mul_x(f01d) + g.partial(1, 0).mul_x(fd)
    return StarElement(f.domain, {1: d1, 2: g.mul_x(fd)})


def dprime_product_right_form(f: SeparableFn, g: SeparableFn) -> StarElement:
    """``(f delta') * (g delta')`` expanded through the action of the right ``delta'``."""
    gd = g.diag()
    g10d = g.partial(1, 0).diag()
    d1 = -(f.partial(0, 1).mul_y(gd)) - f.mul_y(g10d)
    return StarElement(f.domain, {1: d1, 2: f.mul_y(gd)})


@dataclass(frozen=True)
class ConvolutionCheck:
    """Result of :func:`to_convolution`.

    ``profiles`` maps each order to ``D_i(u)`` on ``[0, |I|]`` when the element
    is difference-stationary; otherwise ``reason`` explains which order failed.
    """

    stationary: bool
    profiles: dict = field(default_factory=dict)
    reason: str = ""


def to_convolution(d: StarElement, tol: float = 1e-9, degree: int = 32) -> ConvolutionCheck:
    """Check ``d_i(x, y) = D_i(x - y)`` for every coefficient and return the profiles.

    Shift invariance ``d_i(x + s, y + s) = d_i(x, y)`` is tested for several
    shifts ``s`` on a probe grid of the square that stays inside the domain.
    """
    if not d.is_causal:
        raise ValueError("to_convolution expects a causal element")
    dom = d.domain
    L = dom.length
    profiles = {}
    for k, c in d.parts.items():
        scale_ = 1.0 + c.probe_sup()
        for s in (0.125 * L, 0.25 * L, 0.5 * L):
            pts = np.linspace(dom.lo, dom.hi - s, 24)
            base = c.grid(pts)
            shifted = c.grid(pts + s)
            err = float(np.max(np.abs(shifted - base)))
            if err > tol * scale_:
                return ConvolutionCheck(
                    False, reason=f"not difference-stationary: order {k} shift {s:g} deviates by {err:.3e}"
                )
        lo = dom.lo
        profiles[k] = _profile(c, lo, L, degree)
    return ConvolutionCheck(True, profiles)


def _profile(c: SeparableFn, lo: float, L: float, degree: int) -> UnivariateFn:
    return interpolate(lambda u: c(lo + u, np.full_like(u, lo)), Interval(0.0, L), degree)


# action on test functions


def random_test_function(
    domain: Interval,
    rng: np.random.Generator,
    degree: int = 8,
    vanish_lo: int = 0,
    vanish_hi: int = 0,
) -> UnivariateFn:
    """Random polynomial ``(x-lo)^vanish_lo (hi-x)^vanish_hi q(x)`` with Chebyshev-normal ``q``."""
    q = UnivariateFn(domain, rng.standard_normal(degree + 1))
    x = UnivariateFn.identity(domain)
    for _ in range(vanish_lo):
        q = q * ((x - domain.lo) * (1.0 / domain.length))
    for _ in range(vanish_hi):
        q = q * ((domain.hi - x) * (1.0 / domain.length))
    return q


def act_left(d: StarElement, phi: UnivariateFn) -> UnivariateFn:
    """``(d * psi_l(phi))(x) = int d(x, t) phi(t) dt`` from the representation."""
    if phi.domain != d.domain:
        raise ValueError(f"domain mismatch: {phi.domain} vs {d.domain}")
    dom = d.domain
    out = UnivariateFn.zero(dom)
    th = d.theta_part
    if th.rank:
        bphi = _rows_mul(th.b_rows, np.broadcast_to(phi.coeffs, (th.rank, phi.coeffs.size)))
        prim = C.chebint(bphi, lbnd=-1.0, scl=0.5 * dom.length, axis=1)
        if not d.is_causal:
            total = C.chebval(1.0, prim.T)
            prim = -prim
            prim[:, 0] += total
        out = out + UnivariateFn(dom, _rows_mul(th.a_rows, prim).sum(axis=0))
    for l, m in _dirac_multipliers(d).items():
        out = out + m.mul(phi.diff(l))
    return out


def _dirac_multipliers(d: StarElement) -> dict[int, UnivariateFn]:
    """``M_l(x) = sum_{k >= l} C(k, l) d_y^{k-l} c_k(x, x)``, so that the Dirac
    parts act as ``sum_l M_l phi^(l)``; computed once per element."""
    if d._multipliers is None:
        mult: dict[int, UnivariateFn] = {}
        for k in d.dirac_orders():
            c = d.parts[k]
            for l in range(k + 1):
                term = comb(k, l) * c.partial(0, k - l).diag()
                mult[l] = mult[l] + term if l in mult else term
        object.__setattr__(d, "_multipliers", MappingProxyType(mult))
    return d._multipliers


def action_residual(
    d: StarElement,
    e: StarElement,
    trials: int = 20,
    seed: int = 0,
    degree: int = 8,
    vanish_lo: int = 0,
) -> float:
    """Largest scaled discrepancy ``|d*phi - e*phi| / (1 + max(|d*phi|, |e*phi|))``
    over ``trials`` random polynomial test functions on the probe grid."""
    if d.domain != e.domain:
        raise ValueError(f"domain mismatch: {d.domain} vs {e.domain}")
    if d.orientation is not e.orientation:
        raise ValueError("orientation mismatch")
    rng = np.random.default_rng(seed)
    xs = probe_points(d.domain)
    worst = 0.0
    for _ in range(trials):
        phi = random_test_function(d.domain, rng, degree, vanish_lo)
        a = act_left(d, phi)(xs)
        b = act_left(e, phi)(xs)
        scale_ = 1.0 + max(np.max(np.abs(a)), np.max(np.abs(b)))
        worst = max(worst, float(np.max(np.abs(a - b))) / scale_)
    return worst


def action_equal(
    d: StarElement,
    e: StarElement,
    trials: int = 20,
    tol: float = 1e-10,
    seed: int = 0,
) -> bool:
    """Equality of elements through their action on random polynomial test functions."""
    return action_residual(d, e, trials, seed) <= tol
