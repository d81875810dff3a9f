"""Coefficient algebra: Chebyshev interpolants on an interval and finite-rank
separable bivariate functions built from them.

Every smooth coefficient of a star-algebra element lives here. A
:class:`UnivariateFn` stores Chebyshev coefficients on its own interval; a
:class:`SeparableFn` stores two coefficient matrices whose rows are the
``a_i`` and ``b_i`` factors of ``f(x, y) = sum_i a_i(x) b_i(y)``.

All values are immutable and every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isfinite
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C

__all__ = [
    "Interval",
    "UnivariateFn",
    "SeparableFn",
    "DEFAULT_DEGREE",
    "DEGREE_CAP",
    "PROBE_POINTS",
    "interpolate",
    "probe_points",
    "uni_eval",
    "uni_add",
    "uni_mul",
    "uni_scale",
    "uni_diff",
    "uni_antideriv",
    "sep_add",
    "sep_scale",
    "sep_pointwise_mul",
    "sep_partial",
    "sep_diag",
    "sep_freeze",
    "sep_compress",
]

DEFAULT_DEGREE = 32
DEGREE_CAP = 128
PROBE_POINTS = 100

# relative size below which trailing Chebyshev coefficients are dropped
_CHOP = 2.0 ** -52


@dataclass(frozen=True)
class Interval:
    """Compact interval ``[lo, hi]`` with ``lo < hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (isfinite(lo) and isfinite(hi)):
            raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if not lo < hi:
            raise ValueError(f"interval requires lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def to_unit(self, x):
        return (2.0 * np.asarray(x, dtype=float) - (self.lo + self.hi)) / self.length

    def from_unit(self, t):
        return 0.5 * (self.lo + self.hi) + 0.5 * self.length * np.asarray(t, dtype=float)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.lo), abs(self.hi))
        return bool(np.all((x >= self.lo - slack) & (x <= self.hi + slack)))

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


@lru_cache(maxsize=None)
def _unit_nodes(n: int) -> np.ndarray:
    """Ascending first-kind Chebyshev points on [-1, 1]."""
    k = np.arange(n)
    return np.cos(np.pi * (2 * k + 1) / (2 * n))[::-1].copy()


@lru_cache(maxsize=None)
def _values_to_coeffs(n: int) -> np.ndarray:
    """Matrix M with coeffs = M @ values for values at ``_unit_nodes(n)``."""
    t = _unit_nodes(n)
    m = C.chebvander(t, n - 1).T * (2.0 / n)
    m[0] *= 0.5
    return m


def probe_points(domain: Interval, n: int = PROBE_POINTS) -> np.ndarray:
    """The fixed probe grid: ``n`` first-kind Chebyshev points mapped to ``domain``."""
    return domain.from_unit(_unit_nodes(n))


def _chop(c: np.ndarray, rel: float = _CHOP) -> np.ndarray:
    """Drop trailing coefficients below ``rel`` times the largest."""
    if c.size <= 1:
        return c
    mags = np.abs(c) if c.ndim == 1 else np.abs(c).max(axis=0)
    scale = mags.max()
    if scale == 0.0:
        return c[..., :1] * 0
    keep = np.nonzero(mags > rel * scale)[0]
    n = int(keep[-1]) + 1
    return c[..., :n]


def _rows_eval(rows: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluate each coefficient row at unit points ``t``; shape ``(len(t), r)``."""
    return C.chebvander(t, rows.shape[1] - 1) @ rows.T


def _rows_from_values(values: np.ndarray) -> np.ndarray:
    """Interpolate columns of ``values`` sampled at ``_unit_nodes(n)``; returns rows.

    Rounding in the transform leaves a noise floor of about ``n`` ulps on the
    trailing coefficients; it is chopped so that derivatives stay clean.
    """
    n = values.shape[0]
    return _chop((_values_to_coeffs(n) @ values).T, n * _CHOP)


def _rows_mul(r1: np.ndarray, r2: np.ndarray, cap: int = DEGREE_CAP) -> np.ndarray:
    """Elementwise products of matching rows; exact up to degree ``cap``."""
    deg = min(r1.shape[1] + r2.shape[1] - 2, cap)
    n = deg + 1
    t = _unit_nodes(n)
    return _rows_from_values(_rows_eval(r1, t) * _rows_eval(r2, t))


def _pad_rows(rows: np.ndarray, n: int) -> np.ndarray:
    if rows.shape[1] >= n:
        return rows
    out = np.zeros((rows.shape[0], n), dtype=complex)
    out[:, : rows.shape[1]] = rows
    return out


class UnivariateFn:
    """A complex function on an interval stored as Chebyshev coefficients.

    Supports ``+``, ``-``, ``*`` (by scalars or other functions on the same
    domain) and evaluation by calling.
    """

    __slots__ = ("domain", "coeffs")

    def __init__(self, domain: Interval, coeffs):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise ValueError("Chebyshev coefficients must be finite")
        c = _chop(c)
        c.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("UnivariateFn is immutable")

    # constructors
    @classmethod
    def constant(cls, domain: Interval, value: complex = 1.0) -> "UnivariateFn":
        return cls(domain, [value])

    @classmethod
    def zero(cls, domain: Interval) -> "UnivariateFn":
        return cls(domain, [0.0])

    @classmethod
    def identity(cls, domain: Interval) -> "UnivariateFn":
        """The function ``x -> x``."""
        return cls(domain, [0.5 * (domain.lo + domain.hi), 0.5 * domain.length])

    @classmethod
    def from_monomials(cls, domain: Interval, coeffs: Sequence[complex]) -> "UnivariateFn":
        """Build ``sum_k coeffs[k] x**k`` exactly (up to roundoff)."""
        coeffs = list(coeffs) or [0.0]
        x = cls.identity(domain)
        out = cls.constant(domain, coeffs[-1])
        for c in reversed(coeffs[:-1]):
            out = out * x + c
        return out

    # basic properties
    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        t = self.domain.to_unit(x)
        return C.chebval(t, self.coeffs)

    def values(self, n: int) -> np.ndarray:
        """Values at the ``n`` first-kind Chebyshev nodes of the domain."""
        return C.chebval(_unit_nodes(n), self.coeffs)

    def sup(self, n: int = PROBE_POINTS) -> float:
        return float(np.max(np.abs(self(probe_points(self.domain, n)))))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    # arithmetic
    def _check(self, other: "UnivariateFn"):
        if other.domain != self.domain:
            raise ValueError(f"domain mismatch: {self.domain} vs {other.domain}")

    def __add__(self, other):
        if isinstance(other, UnivariateFn):
            self._check(other)
            n = max(self.coeffs.size, other.coeffs.size)
            c = np.zeros(n, dtype=complex)
            c[: self.coeffs.size] += self.coeffs
            c[: other.coeffs.size] += other.coeffs
            return UnivariateFn(self.domain, c)
        c = self.coeffs.copy()
        c[0] += complex(other)
        return UnivariateFn(self.domain, c)

    __radd__ = __add__

    def __neg__(self):
        return UnivariateFn(self.domain, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, UnivariateFn):
            return self.mul(other)
        return UnivariateFn(self.domain, self.coeffs * complex(other))

    __rmul__ = __mul__

    def mul(self, other: "UnivariateFn", cap: int = DEGREE_CAP) -> "UnivariateFn":
        """Pointwise product; re-interpolated at degree ``cap`` if it would exceed it."""
        self._check(other)
        if self.degree + other.degree <= cap:
            return UnivariateFn(self.domain, C.chebmul(self.coeffs, other.coeffs))
        row = _rows_mul(self.coeffs[None, :], other.coeffs[None, :], cap)
        return UnivariateFn(self.domain, row[0])

    def conj(self) -> "UnivariateFn":
        return UnivariateFn(self.domain, np.conj(self.coeffs))

    # calculus
    def diff(self, order: int = 1) -> "UnivariateFn":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order == 0 or self.degree == 0:
            return self if order == 0 else UnivariateFn.zero(self.domain)
        scl = 2.0 / self.domain.length
        return UnivariateFn(self.domain, C.chebder(self.coeffs, m=order, scl=scl))

    def antideriv(self, base: float | None = None) -> "UnivariateFn":
        """Antiderivative vanishing at ``base`` (default: the left endpoint)."""
        base = self.domain.lo if base is None else float(base)
        if not self.domain.contains(base):
            raise ValueError(f"base point {base} outside {self.domain}")
        tb = float(self.domain.to_unit(base))
        c = C.chebint(self.coeffs, lbnd=tb, scl=0.5 * self.domain.length)
        return UnivariateFn(self.domain, c)

    def integral(self) -> complex:
        """Integral over the whole domain."""
        c = C.chebint(self.coeffs, lbnd=-1.0, scl=0.5 * self.domain.length)
        return complex(C.chebval(1.0, c))

    def compose(self, fn: Callable[[np.ndarray], np.ndarray], degree: int = DEFAULT_DEGREE) -> "UnivariateFn":
        """Interpolant of ``fn(self(x))``, e.g. ``exp`` of an antiderivative."""
        return interpolate(lambda x: fn(self(x)), self.domain, degree)

    def __repr__(self):
        return f"UnivariateFn(domain=[{self.domain.lo}, {self.domain.hi}], degree={self.degree})"


def interpolate(sampler: Callable, domain: Interval, degree: int = DEFAULT_DEGREE) -> UnivariateFn:
    """Interpolate ``sampler`` at ``degree + 1`` first-kind Chebyshev points.

    Raises
    ------
    ValueError
        If ``degree < 1`` or the sampler returns a non-finite value; the
        message names the offending point.
    """
    if degree < 1:
        raise ValueError("interpolation degree must be >= 1")
    n = degree + 1
    x = domain.from_unit(_unit_nodes(n))
    vals = np.asarray(sampler(x), dtype=complex)
    if vals.shape != x.shape:
        vals = np.array([complex(sampler(float(xi))) for xi in x])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise ValueError(f"non-finite sample at x = {x[np.argmax(bad)]!r}")
    return UnivariateFn(domain, _rows_from_values(vals[:, None])[0])


class SeparableFn:
    """``f(x, y) = sum_i a_i(x) b_i(y)`` with Chebyshev-coefficient factors.

    ``a_rows`` and ``b_rows`` are ``(rank, n)`` complex arrays; row ``i`` holds
    the coefficients of ``a_i`` (resp. ``b_i``). A rank-0 function is zero.
    """

    __slots__ = ("domain", "a_rows", "b_rows")

    def __init__(self, domain: Interval, a_rows, b_rows):
        a = np.array(a_rows, dtype=complex, ndmin=2)
        b = np.array(b_rows, dtype=complex, ndmin=2)
        if a.shape[0] != b.shape[0]:
            raise ValueError("a and b factor counts differ")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("separable factors must be finite")
        if a.shape[0] == 0 or a.shape[1] == 0 or b.shape[1] == 0:
            a = np.zeros((0, 1), dtype=complex)
            b = np.zeros((0, 1), dtype=complex)
        else:
            a, b = _chop(a), _chop(b)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "a_rows", a)
        object.__setattr__(self, "b_rows", b)

    def __setattr__(self, name, value):
        raise AttributeError("SeparableFn is immutable")

    # constructors
    @classmethod
    def zero(cls, domain: Interval) -> "SeparableFn":
        return cls(domain, np.zeros((0, 1)), np.zeros((0, 1)))

    @classmethod
    def from_terms(cls, domain: Interval, terms: Iterable[tuple[UnivariateFn, UnivariateFn]]) -> "SeparableFn":
        terms = list(terms)
        if not terms:
            return cls.zero(domain)
        for a, b in terms:
            if a.domain != domain or b.domain != domain:
                raise ValueError("all factors must share the separable function's domain")
        na = max(a.coeffs.size for a, _ in terms)
        nb = max(b.coeffs.size for _, b in terms)
        A = np.zeros((len(terms), na), dtype=complex)
        B = np.zeros((len(terms), nb), dtype=complex)
        for i, (a, b) in enumerate(terms):
            A[i, : a.coeffs.size] = a.coeffs
            B[i, : b.coeffs.size] = b.coeffs
        return cls(domain, A, B)

    @classmethod
    def rank1(cls, a: UnivariateFn, b: UnivariateFn) -> "SeparableFn":
        return cls.from_terms(a.domain, [(a, b)])

    @classmethod
    def constant(cls, domain: Interval, value: complex = 1.0) -> "SeparableFn":
        one = UnivariateFn.constant(domain, 1.0)
        return cls.rank1(UnivariateFn.constant(domain, value), one)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
        domain: Interval,
        degree: int = DEFAULT_DEGREE,
        tol: float = 1e-13,
    ) -> "SeparableFn":
        """Separable approximation of a general smooth ``fn(x, y)``.

        Tensor Chebyshev interpolation followed by an SVD of the coefficient
        matrix, truncated at ``tol`` relative to the largest singular value.
        """
        n = degree + 1
        x = domain.from_unit(_unit_nodes(n))
        vals = np.asarray(fn(x[:, None], x[None, :]), dtype=complex)
        vals = np.broadcast_to(vals, (n, n))
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite sample in bivariate function")
        m = _values_to_coeffs(n)
        coef = m @ vals @ m.T
        u, s, vh = np.linalg.svd(coef)
        if s.size == 0 or s[0] == 0.0:
            return cls.zero(domain)
        k = int(np.sum(s > tol * s[0]))
        return cls(domain, (u[:, :k] * s[:k]).T, vh[:k])

    # properties
    @property
    def rank(self) -> int:
        return self.a_rows.shape[0]

    @property
    def terms(self) -> list[tuple[UnivariateFn, UnivariateFn]]:
        return [
            (UnivariateFn(self.domain, a), UnivariateFn(self.domain, b))
            for a, b in zip(self.a_rows, self.b_rows)
        ]

    def is_zero(self) -> bool:
        return self.rank == 0

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        if self.rank == 0:
            return np.zeros(x.shape, dtype=complex)
        tx, ty = self.domain.to_unit(x.ravel()), self.domain.to_unit(y.ravel())
        va = _rows_eval(self.a_rows, tx)
        vb = _rows_eval(self.b_rows, ty)
        return np.sum(va * vb, axis=1).reshape(x.shape)

    def grid(self, xs, ys=None) -> np.ndarray:
        """Matrix of values ``f(xs[i], ys[j])``."""
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        if self.rank == 0:
            return np.zeros((xs.size, ys.size), dtype=complex)
        va = _rows_eval(self.a_rows, self.domain.to_unit(xs))
        vb = _rows_eval(self.b_rows, self.domain.to_unit(ys))
        return va @ vb.T

    def probe_sup(self, n: int = PROBE_POINTS) -> float:
        if self.rank == 0:
            return 0.0
        return float(np.max(np.abs(self.grid(probe_points(self.domain, n)))))

    # arithmetic
    def _check(self, other: "SeparableFn"):
        if other.domain != self.domain:
            raise ValueError(f"domain mismatch: {self.domain} vs {other.domain}")

    def __add__(self, other: "SeparableFn") -> "SeparableFn":
        self._check(other)
        if other.rank == 0:
            return self
        if self.rank == 0:
            return other
        na = max(self.a_rows.shape[1], other.a_rows.shape[1])
        nb = max(self.b_rows.shape[1], other.b_rows.shape[1])
        A = np.vstack([_pad_rows(self.a_rows, na), _pad_rows(other.a_rows, na)])
        B = np.vstack([_pad_rows(self.b_rows, nb), _pad_rows(other.b_rows, nb)])
        return SeparableFn(self.domain, A, B)

    def __neg__(self):
        return SeparableFn(self.domain, -self.a_rows, self.b_rows)

    def __sub__(self, other: "SeparableFn") -> "SeparableFn":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SeparableFn):
            return self.pointwise_mul(other)
        if isinstance(other, UnivariateFn):
            raise TypeError("use mul_x or mul_y to multiply by a univariate function")
        s = complex(other)
        if s == 0:
            return SeparableFn.zero(self.domain)
        return SeparableFn(self.domain, self.a_rows * s, self.b_rows)

    __rmul__ = __mul__

    def pointwise_mul(self, other: "SeparableFn") -> "SeparableFn":
        """All pairwise term products; rank ``r_f * r_g``."""
        self._check(other)
        if self.rank == 0 or other.rank == 0:
            return SeparableFn.zero(self.domain)
        r1, r2 = self.rank, other.rank
        A = _rows_mul(np.repeat(self.a_rows, r2, axis=0), np.tile(other.a_rows, (r1, 1)))
        B = _rows_mul(np.repeat(self.b_rows, r2, axis=0), np.tile(other.b_rows, (r1, 1)))
        return SeparableFn(self.domain, A, B)

    def mul_x(self, u: UnivariateFn) -> "SeparableFn":
        """Multiply by ``u(x)``."""
        if self.rank == 0:
            return self
        rows = _rows_mul(self.a_rows, np.broadcast_to(u.coeffs, (self.rank, u.coeffs.size)))
        return SeparableFn(self.domain, rows, self.b_rows)

    def mul_y(self, u: UnivariateFn) -> "SeparableFn":
        """Multiply by ``u(y)``."""
        if self.rank == 0:
            return self
        rows = _rows_mul(self.b_rows, np.broadcast_to(u.coeffs, (self.rank, u.coeffs.size)))
        return SeparableFn(self.domain, self.a_rows, rows)

    # calculus and traces
    def partial(self, kx: int = 0, ky: int = 0) -> "SeparableFn":
        """``d^kx/dx^kx d^ky/dy^ky f``, term by term."""
        if kx < 0 or ky < 0:
            raise ValueError("derivative orders must be nonnegative")
        if self.rank == 0 or (kx == 0 and ky == 0):
            return self
        scl = 2.0 / self.domain.length
        A, B = self.a_rows, self.b_rows
        if kx:
            A = C.chebder(A, m=kx, scl=scl, axis=1) if A.shape[1] > kx else np.zeros((self.rank, 1))
        if ky:
            B = C.chebder(B, m=ky, scl=scl, axis=1) if B.shape[1] > ky else np.zeros((self.rank, 1))
        if not (np.any(A) and np.any(B)):
            return SeparableFn.zero(self.domain)
        return SeparableFn(self.domain, A, B)

    def antideriv_x(self) -> "SeparableFn":
        """Antiderivative in ``x`` vanishing at ``x = lo``."""
        if self.rank == 0:
            return self
        A = C.chebint(self.a_rows, lbnd=-1.0, scl=0.5 * self.domain.length, axis=1)
        return SeparableFn(self.domain, A, self.b_rows)

    def antideriv_y(self) -> "SeparableFn":
        """Antiderivative in ``y`` vanishing at ``y = lo``."""
        if self.rank == 0:
            return self
        B = C.chebint(self.b_rows, lbnd=-1.0, scl=0.5 * self.domain.length, axis=1)
        return SeparableFn(self.domain, self.a_rows, B)

    def diag(self) -> UnivariateFn:
        """The trace ``x -> f(x, x)``."""
        if self.rank == 0:
            return UnivariateFn.zero(self.domain)
        rows = _rows_mul(self.a_rows, self.b_rows)
        return UnivariateFn(self.domain, rows.sum(axis=0))

    def freeze(self, slot: str) -> "SeparableFn":
        """Evaluate one slot at the other variable.

        ``slot='x'`` gives ``(x, y) -> f(y, y)`` as the rank-1 term ``(1, diag)``;
        ``slot='y'`` gives ``(x, y) -> f(x, x)`` as ``(diag, 1)``.
        """
        one = UnivariateFn.constant(self.domain, 1.0)
        d = self.diag()
        if d.is_zero():
            return SeparableFn.zero(self.domain)
        if slot == "x":
            return SeparableFn.rank1(one, d)
        if slot == "y":
            return SeparableFn.rank1(d, one)
        raise ValueError(f"slot must be 'x' or 'y', got {slot!r}")

    def swap(self) -> "SeparableFn":
        """``(x, y) -> f(y, x)``."""
        return SeparableFn(self.domain, self.b_rows, self.a_rows)

    def conj(self) -> "SeparableFn":
        return SeparableFn(self.domain, np.conj(self.a_rows), np.conj(self.b_rows))

    def compress(self, tol: float = 1e-12) -> "SeparableFn":
        """Reduce rank by truncated SVD of the coefficient matrix.

        The returned function has rank <= ``self.rank`` and deviates from
        ``self`` by at most ``tol * (1 + probe sup)`` on the probe grid: the
        dropped singular mass is bounded in Frobenius norm, and a Chebyshev
        series is bounded by the 1-norm of its coefficients.
        """
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.rank == 0:
            return self
        qa, ra = np.linalg.qr(self.a_rows.T)
        qb, rb = np.linalg.qr(self.b_rows.T)
        u, s, vh = np.linalg.svd(ra @ rb.T)
        if s.size == 0 or s[0] == 0.0:
            return SeparableFn.zero(self.domain)
        na, nb = self.a_rows.shape[1], self.b_rows.shape[1]
        budget = tol * (1.0 + self.probe_sup()) / np.sqrt(na * nb)
        # tail[k] = Frobenius mass of singular values k, k+1, ...
        tail = np.sqrt(np.cumsum((s ** 2)[::-1])[::-1])
        keep = s.size
        while keep > 0 and tail[keep - 1] <= budget:
            keep -= 1
        keep = min(keep, self.rank)
        if keep == 0:
            return SeparableFn.zero(self.domain)
        A = (qa @ (u[:, :keep] * s[:keep])).T
        B = vh[:keep] @ qb.T
        return SeparableFn(self.domain, A, B)

    def __repr__(self):
        return (
            f"SeparableFn(domain=[{self.domain.lo}, {self.domain.hi}], rank={self.rank}, "
            f"degrees=({self.a_rows.shape[1] - 1}, {self.b_rows.shape[1] - 1}))"
        )


# functional aliases matching the operation names used throughout the package


def uni_eval(f: UnivariateFn, x):
    return f(x)


def uni_add(f: UnivariateFn, g: UnivariateFn) -> UnivariateFn:
    return f + g


def uni_mul(f: UnivariateFn, g: UnivariateFn, cap: int = DEGREE_CAP) -> UnivariateFn:
    return f.mul(g, cap)


def uni_scale(f: UnivariateFn, s: complex) -> UnivariateFn:
    return f * s


def uni_diff(f: UnivariateFn, order: int = 1) -> UnivariateFn:
    return f.diff(order)


def uni_antideriv(f: UnivariateFn, base: float | None = None) -> UnivariateFn:
    return f.antideriv(base)


def sep_add(f: SeparableFn, g: SeparableFn) -> SeparableFn:
    return f + g


def sep_scale(f: SeparableFn, s: complex) -> SeparableFn:
    return f * s


def sep_pointwise_mul(f: SeparableFn, g: SeparableFn) -> SeparableFn:
    return f.pointwise_mul(g)


def sep_partial(f: SeparableFn, kx: int, ky: int) -> SeparableFn:
    return f.partial(kx, ky)


def sep_diag(f: SeparableFn) -> UnivariateFn:
    return f.diag()


def sep_freeze(f: SeparableFn, slot: str) -> SeparableFn:
    return f.freeze(slot)


def sep_compress(f: SeparableFn, tol: float = 1e-12) -> SeparableFn:
    return f.compress(tol)
