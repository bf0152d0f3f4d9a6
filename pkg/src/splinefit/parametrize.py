"""Parameter assignment for ordered data points and knot vector construction."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError, FitInfeasibleError
from .geometry import KnotVector, ParameterVector, ParamMethod, SplineSpace, as_xy, validate_space


def uniform_params(points) -> ParameterVector:
    """Equally spaced parameters (k - 1) / (m - 1) on [0, 1]."""
    m = len(as_xy(points))
    if m < 2:
        raise ArgumentError(f"need at least 2 points, got {m}")
    return ParameterVector(np.arange(m) / (m - 1))


def uniform_literal_params(points) -> ParameterVector:
    """t_1 = 0 and t_i = i / m for i = 2..m (1-based), so the first gap is doubled."""
    m = len(as_xy(points))
    if m < 2:
        raise ArgumentError(f"need at least 2 points, got {m}")
    t = np.arange(1, m + 1) / m
    t[0] = 0.0
    return ParameterVector(t)


def _cumulative(increments: np.ndarray) -> ParameterVector:
    total = increments.sum()
    if not total > 0:
        raise ArgumentError("all points coincide; total chord length is zero")
    t = np.concatenate([[0.0], np.cumsum(increments / total)])
    # cumulative rounding can leave the last value a few ulps off 1
    t[-1] = 1.0
    return ParameterVector(np.minimum(t, 1.0))


def _chords(points) -> np.ndarray:
    xy = as_xy(points)
    if len(xy) < 2:
        raise ArgumentError(f"need at least 2 points, got {len(xy)}")
    return np.hypot(*np.diff(xy, axis=0).T)


def chord_length_params(points) -> ParameterVector:
    """Parameters proportional to accumulated polyline length, normalized to [0, 1]."""
    return _cumulative(_chords(points))


def centripetal_params(points) -> ParameterVector:
    """Like chord length, with each chord replaced by its square root."""
    return _cumulative(np.sqrt(_chords(points)))


_METHODS = {
    ParamMethod.UNIFORM: uniform_params,
    ParamMethod.UNIFORM_LITERAL: uniform_literal_params,
    ParamMethod.CHORD_LENGTH: chord_length_params,
    ParamMethod.CENTRIPETAL: centripetal_params,
}


def parametrize(points, method: ParamMethod | str) -> ParameterVector:
    return _METHODS[ParamMethod(method)](points)


def knots_from_params(params: ParameterVector, n: int, d: int) -> KnotVector:
    """Clamped knot vector of length n + d + 1 adapted to the parameter values.

    The end knots repeat the first and last parameter d + 1 times. The
    n - d - 1 interior knots sit at the empirical quantiles j / (n - d),
    j = 1..n-d-1, of the parameters (linear interpolation between order
    statistics). Raises FitInfeasibleError when the resulting space fails
    the gap condition knots[i + d + 1] > knots[i].
    """
    t = params.values if isinstance(params, ParameterVector) else np.asarray(params, dtype=float)
    m = t.size
    if d < 0 or n < d + 1:
        raise ArgumentError(f"need n >= d + 1 >= 1, got n={n}, d={d}")
    if m <= n:
        raise ArgumentError(f"least squares needs more points than basis functions (m > n), got m={m}, n={n}")
    levels = np.arange(1, n - d) / (n - d)
    interior = np.quantile(t, levels) if levels.size else np.empty(0)
    knots = KnotVector(np.concatenate([[t[0]] * (d + 1), interior, [t[-1]] * (d + 1)]))
    gaps = [v for v in validate_space(SplineSpace(d, knots)).violations if v.kind == "gap"]
    if gaps:
        raise FitInfeasibleError(
            f"knot gap condition fails at index {gaps[0].index}: {gaps[0].message}", index=gaps[0].index
        )
    return knots
