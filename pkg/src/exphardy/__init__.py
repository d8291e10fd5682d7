"""Numerical verification toolkit for sharp exponential-weight Hardy-type
inequalities, their extremal family, and the Onofri inequality on the
2-sphere."""

from .constants import (
    BlissParams,
    bliss_constant,
    c_n,
    moser_bound,
    rough_constants,
    sharp_coefficient,
    sphere_volume,
)
from .errors import ComputationError
from .extremals import (
    ExtremalParams,
    closed_energy,
    extremal_deficit,
    extremal_eval,
    graded_grid,
    lambda_from_mass,
    mass_from_lambda,
    sample_extremal,
)
from .quadrature import IntegralResult, QuadratureSpec, cumulative, integrate, integrate_halfline
from .radial import (
    DeficitReport,
    Grid,
    RadialFunction,
    Statement,
    bliss_ratio,
    deficit,
    deficit_n1,
    energy,
    moser_functional,
    random_admissible,
    tail_bound,
    weighted_mass,
)

__version__ = "0.1.0"
