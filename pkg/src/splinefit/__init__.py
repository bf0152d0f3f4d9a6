"""Least-squares B-spline approximation of plane contours."""

from .contour import Contour, GrayImage, binarize, load_image, load_points_csv, trace_boundary
from .errors import (
    ArgumentError,
    DomainError,
    ExtractionError,
    FitInfeasibleError,
    InputError,
    RankDeficientError,
    SplineError,
)
from .evaluate import BasisRow, basis_row, basis_value, eval_bform, eval_deboor, find_span, sample_curve
from .geometry import (
    FitReport,
    KnotVector,
    ParameterVector,
    ParamMethod,
    Point2,
    SplineCurve,
    SplineSpace,
    clamped_knots,
    validate_space,
)
from .lsq import CollocationMatrix, collocation_matrix, fit_parametric_curve, fit_scalar, solve_normal
from .parametrize import (
    centripetal_params,
    chord_length_params,
    knots_from_params,
    parametrize,
    uniform_literal_params,
    uniform_params,
)

__version__ = "0.1.0"
