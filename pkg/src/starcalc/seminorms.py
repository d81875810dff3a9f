"""Seminorms ``p_k``, the induced metric and the submultiplicativity probe.

``p_k(d)`` is the largest sup norm of ``d_x^a d_y^b`` applied to a
coefficient ``d_i`` over ``-1 <= i <= k`` and ``a + b <= k + 1``, taken over
the square ``K_{k+1}`` of a compact family. Sups are sampled: a 64 x 64
uniform grid refined once by halving the spacing, keeping the larger value.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .kernels import Interval, SeparableFn
from .star import StarElement, star

__all__ = [
    "CompactFamily",
    "seminorm",
    "MetricValue",
    "metric",
    "SubmultResult",
    "submult_probe",
    "submult_constant",
    "cauchy_element",
    "cauchy_table",
    "PROBE_SIDE",
]

PROBE_SIDE = 64
DIFF_TOL = 1e-14

Square = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class CompactFamily:
    """Nested squares ``K_{-1} <= K_0 <= K_1 <= ...`` inside ``I^2``.

    Parameters
    ----------
    domain : Interval
    squares : tuple of ((x_lo, x_hi), (y_lo, y_hi)), optional
        ``squares[j]`` is ``K_{j-1}``; indices past the end reuse the last
        square. Empty means ``K_k = I^2`` for every ``k``.
    """

    domain: Interval
    squares: tuple = ()

    def __post_init__(self):
        lo, hi = self.domain.lo, self.domain.hi
        prev = None
        for sq in self.squares:
            (xl, xh), (yl, yh) = sq
            if not (lo <= xl < xh <= hi and lo <= yl < yh <= hi):
                raise ValueError(f"square {sq} is not inside the domain square")
            if prev is not None:
                (pxl, pxh), (pyl, pyh) = prev
                if not (xl <= pxl and pxh <= xh and yl <= pyl and pyh <= yh):
                    raise ValueError(f"squares are not nested at {sq}")
            prev = sq

    def square(self, k: int) -> Square:
        """``K_k`` for ``k >= -1``."""
        if k < -1:
            raise ValueError(f"family index must be >= -1, got {k}")
        if not self.squares:
            return ((self.domain.lo, self.domain.hi), (self.domain.lo, self.domain.hi))
        return self.squares[min(k + 1, len(self.squares) - 1)]

    def area(self, k: int) -> float:
        (xl, xh), (yl, yh) = self.square(k)
        return (xh - xl) * (yh - yl)


def _default_family(d: StarElement, family: CompactFamily | None) -> CompactFamily:
    return family if family is not None else CompactFamily(d.domain)


def _sampled_sup(c: SeparableFn, sq: Square, side: int = PROBE_SIDE) -> float:
    (xl, xh), (yl, yh) = sq
    best = 0.0
    for n in (side, 2 * side - 1):
        xs, ys = np.linspace(xl, xh, n), np.linspace(yl, yh, n)
        best = max(best, float(np.max(np.abs(c.grid(xs, ys)))))
    return best


def _coefficient_sup(c: SeparableFn, k: int, sq: Square, cache: dict) -> float:
    """``max_{a+b <= k+1} sup |d_x^a d_y^b c|`` over ``sq``, memoised per derivative."""
    best = 0.0
    for total in range(k + 2):
        for a in range(total + 1):
            key = (id(c), a, total - a, sq)
            if key not in cache:
                cache[key] = _sampled_sup(c.partial(a, total - a), sq) if c.rank else 0.0
            best = max(best, cache[key])
    return best


def seminorm(d: StarElement, k: int, family: CompactFamily | None = None, _cache: dict | None = None) -> float:
    """``p_k(d)`` with sampled sups; ``k >= -1``."""
    if k < -1:
        raise ValueError(f"seminorm index must be >= -1, got {k}")
    family = _default_family(d, family)
    sq = family.square(k + 1)
    cache = {} if _cache is None else _cache
    best = 0.0
    for i, c in d.parts.items():
        if i <= k:
            best = max(best, _coefficient_sup(c, k, sq, cache))
    return best


@dataclass(frozen=True)
class MetricValue:
    """Truncated metric and a bound on the omitted tail."""

    value: float
    tail_bound: float
    kmax: int

    def __float__(self):
        return self.value


def metric(d: StarElement, e: StarElement, family: CompactFamily | None = None, kmax: int = 12) -> MetricValue:
    """``sum_{k=-1}^{kmax} 2^{-(k+1)} p_k(d - e) / (1 + p_k(d - e))``.

    The weights sum to 2 over all ``k >= -1``; the omitted tail is below
    ``2^{-(kmax+1)}``. The difference is recompressed at ``1e-14`` relative
    to the operands so that equal representations give exactly 0.
    """
    if d.domain != e.domain or d.orientation is not e.orientation:
        raise ValueError("metric needs a shared domain and orientation")
    scale = 1.0 + max((c.probe_sup() for x in (d, e) for c in x.parts.values()), default=0.0)
    diff = (d - e).compressed(DIFF_TOL * scale)
    family = _default_family(d, family)
    cache: dict = {}
    total = 0.0
    for k in range(-1, kmax + 1):
        p = seminorm(diff, k, family, cache)
        total += 2.0 ** (-(k + 1)) * p / (1.0 + p)
    return MetricValue(total, 2.0 ** (-(kmax + 1)), kmax)


@dataclass(frozen=True)
class SubmultResult:
    lhs: float
    rhs: float
    constant: float
    passed: bool


def submult_constant(k: int, family: CompactFamily) -> float:
    """``3^{k+1} + |K_{k+1}|``."""
    return 3.0 ** (k + 1) + family.area(k + 1)


def submult_probe(
    d: StarElement, e: StarElement, k: int, family: CompactFamily | None = None, rel: float = 1e-6
) -> SubmultResult:
    """Check ``p_k(d * e) <= (3^{k+1} + |K_{k+1}|) p_k(d) p_k(e)`` with sampled sups."""
    family = _default_family(d, family)
    for name, x in (("d", d), ("e", e)):
        if x.order is not None and x.order > k:
            raise ValueError(f"{name} has order {x.order} > k = {k}")
    c = submult_constant(k, family)
    lhs = seminorm(star(d, e), k, family)
    rhs = c * seminorm(d, k, family) * seminorm(e, k, family)
    return SubmultResult(lhs, rhs, c, lhs <= rhs * (1.0 + rel))


def _default_decay(i: int) -> float:
    return 1.0 / factorial(i + 2)


def cauchy_element(m: int, domain: Interval, decay=_default_decay) -> StarElement:
    """Partial sum ``sum_{i=-1}^{m} decay(i) delta^(i)``."""
    one = SeparableFn.constant(domain, 1.0)
    return StarElement(domain, {i: one * decay(i) for i in range(-1, m + 1)})


def cauchy_table(ms, domain: Interval, decay=_default_decay, kmax: int = 12) -> np.ndarray:
    """Matrix of ``metric(d_m, d_n)`` over the partial sums ``d_m``."""
    elems = [cauchy_element(m, domain, decay) for m in ms]
    out = np.zeros((len(ms), len(ms)))
    for a in range(len(ms)):
        for b in range(a + 1, len(ms)):
            out[a, b] = out[b, a] = metric(elems[a], elems[b], kmax=kmax).value
    return out

