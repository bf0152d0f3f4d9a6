"""B-spline basis functions and spline curve evaluation.

Indices are 0-based throughout: a space of degree d with knots t[0..n+d] has
basis functions B_0..B_{n-1} and evaluation domain [t[d], t[n]]. Spans are
half-open, t[i] <= t < t[i+1], except that the domain's right end belongs to
the last nonempty span inside the domain. Any fraction with a zero denominator
contributes 0, whatever its numerator.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, DomainError
from .geometry import KnotVector, Point2, SplineCurve, SplineSpace


class BasisRow(NamedTuple):
    """Nonzero basis values at one parameter.

    ``values[r]`` is B_{span_index - d + r, d}(t) for r = 0..d.
    """

    span_index: int
    values: tuple[float, ...]

    @property
    def first(self) -> int:
        return self.span_index - (len(self.values) - 1)


def _ratio(num: float, den: float) -> float:
    return num / den if den != 0.0 else 0.0


def _span(t: tuple, d: int, n: int, x: float) -> int:
    lo, hi = t[d], t[n]
    if not lo <= x <= hi:
        raise DomainError(f"parameter {x!r} outside evaluation domain [{lo!r}, {hi!r}]", (lo, hi))
    if x == hi:
        for i in range(n - 1, d - 1, -1):
            if t[i] < t[i + 1]:
                return i
        raise DomainError(f"evaluation domain [{lo!r}, {hi!r}] is empty", (lo, hi))
    return bisect_right(t, x) - 1


def find_span(knots: KnotVector, d: int, t: float) -> int:
    """Index i of the knot span containing `t`, with knots[i] <= t < knots[i+1].

    Raises DomainError when `t` is outside [knots[d], knots[n]].
    """
    kv = knots.values
    n = len(kv) - d - 1
    if n < 1:
        raise ArgumentError(f"{len(kv)} knots leave no basis functions for degree {d}")
    return _span(kv, d, n, float(t))


def _active_span(space: SplineSpace, x: float) -> int | None:
    # The one degree-0 function equal to 1 at x, or None. Inside the domain this
    # is find_span; elsewhere plain half-open spans with the final nonempty
    # span closed on the right.
    t = space.knots.values
    lo, hi = space.domain
    if space.dimension >= 1 and lo <= x <= hi and lo < hi:
        return _span(t, space.degree, space.dimension, x)
    if x < t[0] or x > t[-1]:
        return None
    if x == t[-1]:
        for i in range(len(t) - 2, -1, -1):
            if t[i] < t[i + 1]:
                return i
        return None
    return bisect_right(t, x) - 1


def basis_value(space: SplineSpace, i: int, j: int, t: float) -> float:
    """B_{i,j}(t) by direct recursion on the degree.

    `j` may differ from ``space.degree``; only the knots of `space` are used,
    plus its domain to decide which degree-0 function is active at `t`.
    The cost is exponential in `j`, so this serves as a reference for
    `basis_row` rather than a production path.
    """
    t_ = space.knots.values
    if j < 0 or not 0 <= i <= len(t_) - j - 2:
        raise IndexError(f"B_{{{i},{j}}} undefined for {len(t_)} knots")
    x = float(t)
    return _basis_rec(t_, i, j, x, _active_span(space, x))


def _basis_rec(t: tuple, i: int, j: int, x: float, active: int | None) -> float:
    if j == 0:
        return 1.0 if i == active else 0.0
    left = _ratio(x - t[i], t[i + j] - t[i])
    right = _ratio(t[i + j + 1] - x, t[i + j + 1] - t[i + 1])
    val = 0.0
    if left != 0.0:
        val += left * _basis_rec(t, i, j - 1, x, active)
    if right != 0.0:
        val += right * _basis_rec(t, i + 1, j - 1, x, active)
    return val


def _row(t: tuple, d: int, span: int, x: float) -> list[float]:
    # Triangular Cox-de Boor scheme, O(d^2).
    vals = [1.0] + [0.0] * d
    left = [0.0] * (d + 1)
    right = [0.0] * (d + 1)
    for j in range(1, d + 1):
        left[j] = x - t[span + 1 - j]
        right[j] = t[span + j] - x
        saved = 0.0
        for r in range(j):
            den = right[r + 1] + left[j - r]
            if den == 0.0:
                vals[r] = saved
                saved = 0.0
                continue
            # separate divisions keep x/x == 1 exact at knots
            v = vals[r]
            vals[r] = saved + right[r + 1] / den * v
            saved = left[j - r] / den * v
        vals[j] = saved
    return vals


def basis_row(space: SplineSpace, t: float) -> BasisRow:
    """The d+1 basis values that can be nonzero at `t`."""
    x = float(t)
    kv = space.knots.values
    span = _span(kv, space.degree, space.dimension, x)
    return BasisRow(span, tuple(_row(kv, space.degree, span, x)))


def eval_bform(curve: SplineCurve, t: float) -> Point2:
    """Evaluate the curve as a combination of control points weighted by B-splines."""
    x, y = _bform(curve.space, curve.control, float(t))
    return Point2(x, y)


def _bform(space: SplineSpace, control: np.ndarray, x: float) -> tuple[float, float]:
    kv = space.knots.values
    d = space.degree
    span = _span(kv, d, space.dimension, x)
    vals = _row(kv, d, span, x)
    pts = control[span - d : span + 1].tolist()
    px = py = 0.0
    for w, (cx, cy) in zip(vals, pts):
        px += w * cx
        py += w * cy
    return px, py


def eval_deboor(curve: SplineCurve, t: float) -> Point2:
    """Evaluate the curve by repeated convex combination of control points.

    Level j replaces control point k by
    ``(t[k+d-j+1] - t) / den * p[k-1] + (t - t[k]) / den * p[k]`` with
    ``den = t[k+d-j+1] - t[k]``, for the points active on the span of `t`.
    """
    kv = curve.space.knots.values
    d = curve.space.degree
    x = float(t)
    span = _span(kv, d, curve.space.dimension, x)
    px, py = _deboor_xy(kv, d, span, curve.control[span - d : span + 1].tolist(), x)
    return Point2(px, py)


def _deboor_xy(t: tuple, d: int, span: int, pts: list, x: float) -> tuple[float, float]:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    base = span - d
    for j in range(1, d + 1):
        for k in range(span, base + j - 1, -1):
            r = k - base
            hi = t[k + d - j + 1]
            den = hi - t[k]
            a = _ratio(hi - x, den)
            b = _ratio(x - t[k], den)
            xs[r] = a * xs[r - 1] + b * xs[r]
            ys[r] = a * ys[r - 1] + b * ys[r]
    return xs[d], ys[d]


def deboor_values(space: SplineSpace, coefficients, params) -> np.ndarray:
    """Evaluate a spline with scalar or 2-vector coefficients at many parameters.

    Uses the control-point recursion, so it shares no code with the collocation
    matrix; the fitting module relies on that to recompute residuals.
    """
    coef = np.asarray(coefficients, dtype=np.float64)
    flat = coef.ndim == 1
    if flat:
        coef = np.column_stack([coef, np.zeros_like(coef)])
    elif coef.ndim != 2 or coef.shape[1] != 2:
        raise ArgumentError(f"coefficients must have shape (n,) or (n, 2), got {coef.shape}")
    kv = space.knots.values
    d = space.degree
    n = space.dimension
    rows = coef.tolist()
    out = np.empty((len(params), 2))
    for k, x in enumerate(np.asarray(params, dtype=np.float64).tolist()):
        span = _span(kv, d, n, x)
        out[k] = _deboor_xy(kv, d, span, rows[span - d : span + 1], x)
    return out[:, 0] if flat else out


def sample_curve(curve: SplineCurve, count: int) -> np.ndarray:
    """`count` curve points at equally spaced parameters over the whole domain.

    Returns an array of shape (count, 2); both domain endpoints are included.
    """
    if int(count) != count or count < 2:
        raise ArgumentError(f"sample count must be an integer >= 2, got {count!r}")
    lo, hi = curve.space.domain
    ts = np.linspace(lo, hi, int(count))
    ts[-1] = hi
    return np.array([_bform(curve.space, curve.control, x) for x in ts.tolist()])
