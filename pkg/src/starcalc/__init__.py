"""Star-product algebra of causal distributions on a compact interval.

Elements are finite sums ``d = sum_{i >= -1} d_i(x, y) delta^(i)(x - y)``
with ``delta^(-1) = Theta`` and smooth separable coefficients ``d_i``.
"""

__version__ = "0.1.0"

from .errors import NumericalError, StructureError
from .kernels import Interval, SeparableFn, UnivariateFn, interpolate, probe_points
from .star import (
    Orientation,
    StarElement,
    action_equal,
    action_residual,
    delta,
    dirac_part,
    identity,
    smooth_part,
    star,
    star_power,
    theta,
)
from .actions import apply_left, apply_right, bracket2, inner, transpose
from .inverse import invert_finite_order, invert_theta_kernel, rank1_resolvent, volterra_resolvent
from .discretize import Grid, convergence_probe, mat_star, sample
from .seminorms import CompactFamily, metric, seminorm, submult_probe
from .solvers import (
    MatrixStarElement,
    VolterraProblem,
    solve_volterra2,
    star_matrix_mul,
    time_ordered_exp,
)

__all__ = [
    "NumericalError",
    "StructureError",
    "Interval",
    "SeparableFn",
    "UnivariateFn",
    "interpolate",
    "probe_points",
    "Orientation",
    "StarElement",
    "action_equal",
    "action_residual",
    "delta",
    "dirac_part",
    "identity",
    "smooth_part",
    "star",
    "star_power",
    "theta",
    "apply_left",
    "apply_right",
    "bracket2",
    "inner",
    "transpose",
    "invert_finite_order",
    "invert_theta_kernel",
    "rank1_resolvent",
    "volterra_resolvent",
    "Grid",
    "convergence_probe",
    "mat_star",
    "sample",
    "CompactFamily",
    "metric",
    "seminorm",
    "submult_probe",
    "MatrixStarElement",
    "VolterraProblem",
    "solve_volterra2",
    "star_matrix_mul",
    "time_ordered_exp",
]
