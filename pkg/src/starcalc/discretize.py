"""Lower-triangular matrix oracle for the star product.

On a uniform grid ``x_i = lo + i dx`` a causal element becomes a lower
triangular matrix and the star product becomes ``(F @ G) * dx``. A
``Theta`` part is sampled entrywise (``Theta(0) = 1``). Dirac parts use
``delta^(k) -> H^{-k} / dx^(k+1)``, with ``H`` the all-ones lower-triangular
matrix, so that ``delta -> I / dx`` is the unit of the scaled product and
``delta' * Theta = delta`` holds exactly on the grid.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import factorial

import numpy as np

from .kernels import Interval
from .star import StarElement, star

__all__ = [
    "Grid",
    "TriangularSample",
    "sample",
    "dirac_matrix",
    "ones_lower",
    "mat_star",
    "mat_transpose",
    "grid_inner",
    "ConvergenceTable",
    "convergence_probe",
    "write_matrix",
    "read_matrix",
    "MAGIC",
]

MAGIC = b"STARMAT1"


@dataclass(frozen=True)
class Grid:
    """Uniform inclusive grid with ``n`` ascending points on ``domain``."""

    domain: Interval
    n: int

    def __post_init__(self):
        if int(self.n) < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.n}")

    @property
    def dx(self) -> float:
        return self.domain.length / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.domain.lo + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class TriangularSample:
    grid: Grid
    entries: np.ndarray

    def __post_init__(self):
        m = self.entries
        if m.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"expected {self.grid.n}x{self.grid.n} entries, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite matrix entry")


def ones_lower(n: int) -> np.ndarray:
    """``H``: ones on and below the diagonal."""
    return np.tril(np.ones((n, n)))


def _lower_inverse_power(n: int, k: int) -> np.ndarray:
    """``H^{-k}`` for ``k >= 0``; ``H^{-1}`` is the backward difference ``I - S``."""
    d = np.eye(n) - np.eye(n, k=-1)
    return np.linalg.matrix_power(d, k)


def dirac_matrix(k: int, grid: Grid) -> np.ndarray:
    """Grid image of ``delta^(k)`` for any integer ``k``: ``H^{-k} / dx^(k+1)``.

    For ``k <= -1`` this is ``H^{|k|} dx^{|k|-1}``, the discrete counterpart
    of ``(x - y)^(|k|-1) / (|k|-1)! Theta``.
    """
    n, dx = grid.n, grid.dx
    if k >= 0:
        return _lower_inverse_power(n, k) / dx ** (k + 1)
    return np.linalg.matrix_power(ones_lower(n), -k) * dx ** (-k - 1)


def sample(d: StarElement, grid: Grid) -> TriangularSample:
    """Sample ``d`` on ``grid``.

    The order-``k`` Dirac coefficient ``c`` contributes the Hadamard product
    of ``c(x_i, x_j)`` with ``H^{-k} / dx^(k+1)``. Anticausal input is
    sampled as its transpose would be and then transposed back.
    """
    if d.domain != grid.domain:
        raise ValueError(f"domain mismatch: {d.domain} vs {grid.domain}")
    xs = grid.points
    n = grid.n
    out = np.zeros((n, n), dtype=complex)
    th = d.theta_part
    if th.rank:
        vals = th.grid(xs)
        out += np.tril(vals) if d.is_causal else np.triu(vals)
    for k in d.dirac_orders():
        pattern = dirac_matrix(k, grid)
        out += d.parts[k].grid(xs) * (pattern if d.is_causal or k == 0 else (-1) ** k * pattern.T)
    return TriangularSample(grid, out)


def _check_lower(m: np.ndarray, what: str):
    scale = 1.0 + np.max(np.abs(m))
    if np.max(np.abs(np.triu(m, 1))) > 1e-14 * scale:
        raise ValueError(f"{what} is not lower-triangular")


def mat_star(f: TriangularSample, g: TriangularSample) -> TriangularSample:
    """``(F @ G) * dx``; both factors and the product must be lower-triangular."""
    if f.grid != g.grid:
        raise ValueError("samples live on different grids")
    _check_lower(f.entries, "left factor")
    _check_lower(g.entries, "right factor")
    prod = (f.entries @ g.entries) * f.grid.dx
    _check_lower(prod, "product")
    return TriangularSample(f.grid, np.tril(prod))


def mat_transpose(f: TriangularSample) -> np.ndarray:
    """Plain transpose (upper-triangular for causal samples)."""
    return f.entries.T.copy()


def grid_inner(h: np.ndarray, f: np.ndarray, grid: Grid) -> complex:
    """Rectangle-rule pairing ``sum_i h_i f_i dx``."""
    return complex(np.sum(h * f) * grid.dx)


@dataclass(frozen=True)
class ConvergenceTable:
    """Sup errors of the matrix product against ``star`` per grid size.

    ``rate`` is the least-squares slope of ``log(error)`` against ``log(dx)``
    (``nan`` when fewer than two errors are positive).
    """

    ns: tuple
    dxs: tuple
    errors: tuple
    rate: float

    def as_dict(self) -> dict:
        return {"N": list(self.ns), "dx": list(self.dxs), "error": list(self.errors), "rate": self.rate}


def convergence_probe(d: StarElement, e: StarElement, ns=(64, 128, 256, 512)) -> ConvergenceTable:
    """Compare ``mat_star(sample d, sample e)`` with ``sample(star(d, e))``.

    Errors are sup norms over the grid of the difference; when Dirac parts
    are present the matrices are multiplied by ``dx`` first so that the unit
    sample ``I / dx`` has size one.
    """
    prod = star(d, e)
    weighted = bool(d.dirac_orders() or e.dirac_orders() or prod.dirac_orders())
    errs, dxs = [], []
    for n in ns:
        grid = Grid(d.domain, int(n))
        m = mat_star(sample(d, grid), sample(e, grid)).entries
        ref = sample(prod, grid).entries
        w = grid.dx if weighted else 1.0
        errs.append(float(np.max(np.abs(m - ref))) * w)
        dxs.append(grid.dx)
    errs_a, dxs_a = np.array(errs), np.array(dxs)
    pos = errs_a > 0
    if pos.sum() >= 2:
        rate = float(np.polyfit(np.log(dxs_a[pos]), np.log(errs_a[pos]), 1)[0])
    else:
        rate = float("nan")
    return ConvergenceTable(tuple(int(n) for n in ns), tuple(dxs), tuple(errs), rate)


def theta_power_sample(n_power: int, grid: Grid) -> np.ndarray:
    """``(x_i - x_j)^(n-1) / (n-1)!`` on and below the diagonal (exact ``Theta^{*n}``)."""
    xs = grid.points
    diff = xs[:, None] - xs[None, :]
    return np.tril(diff ** (n_power - 1) / factorial(n_power - 1))


def write_matrix(path, m: np.ndarray) -> None:
    """Binary dump: ``STARMAT1``, u32 ``N``, u32 reserved, then ``N*N`` little-endian complex128, row-major."""
    m = np.asarray(m, dtype="<c16")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<II", m.shape[0], 0))
        fh.write(np.ascontiguousarray(m).tobytes())


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16 or head[:8] != MAGIC:
            raise ValueError(f"{path}: not a STARMAT1 file")
        (n, _) = struct.unpack("<II", head[8:])
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {data.size}")
    return data.reshape(n, n).astype(complex)
