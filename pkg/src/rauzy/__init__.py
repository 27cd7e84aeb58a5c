"""Certified upper bounds on the Hausdorff dimension of the Rauzy gasket.

The bound 1 + delta_m comes from a renewal-type condition combining a finite
transition matrix B (indexed by prefix classes of depth m) with an explicit
tail series; :func:`rauzy.solver.solve_delta` finds the smallest certified
delta by bisection.  :mod:`rauzy.oracle` checks the underlying triangle
inequalities exhaustively at small depth.
"""

from rauzy.geometry import Triangle, area_ratio, diameter, triangle_of, word_matrix
from rauzy.kernels import BACKEND
from rauzy.series import SeriesParams, second_factor
from rauzy.solver import BoundConfig, BoundReport, condition_lhs, dimension_bound, solve_delta
from rauzy.transition import build_B, first_factor
from rauzy.words import canonicalize, classify, enumerate_V, successor

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundConfig",
    "BoundReport",
    "SeriesParams",
    "Triangle",
    "area_ratio",
    "build_B",
    "canonicalize",
    "classify",
    "condition_lhs",
    "diameter",
    "dimension_bound",
    "enumerate_V",
    "first_factor",
    "second_factor",
    "solve_delta",
    "successor",
    "triangle_of",
    "word_matrix",
]
