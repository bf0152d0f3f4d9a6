"""Least-squares spline fitting through the normal equations.

The collocation matrix B (entry (k, i) = B_i(t_k)) is stored by rows: each row
has at most d + 1 contiguous nonzeros starting at column ``first[k]``. The
normal matrix BᵗB is assembled directly in LAPACK upper band storage and
factored with a banded Cholesky decomposition. When that factorization fails or
the normal matrix is too ill conditioned, the least-squares problem is solved
on B itself with a rank-revealing orthogonal factorization.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ArgumentError, DomainError, FitInfeasibleError, RankDeficientError
from .evaluate import _row, _span, deboor_values
from .geometry import FitReport, ParameterVector, ParamMethod, SplineCurve, SplineSpace, as_xy, validate_space
from .parametrize import knots_from_params, parametrize

log = logging.getLogger(__name__)

COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class CollocationMatrix:
    rows: int
    cols: int
    degree: int
    first: np.ndarray  # (m,) column of the first stored entry in each row
    values: np.ndarray  # (m, d + 1)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        k = np.arange(self.rows)
        for a in range(self.degree + 1):
            out[k, self.first + a] = self.values[:, a]
        return out

    def matvec(self, c) -> np.ndarray:
        """B @ c for c of shape (n,) or (n, k)."""
        c = np.asarray(c, dtype=np.float64)
        out = np.zeros((self.rows,) + c.shape[1:])
        for a in range(self.degree + 1):
            w = self.values[:, a]
            out += w.reshape((-1,) + (1,) * (c.ndim - 1)) * c[self.first + a]
        return out

    def rmatvec(self, y) -> np.ndarray:
        """Bᵗ @ y for y of shape (m,) or (m, k)."""
        y = np.asarray(y, dtype=np.float64)
        y2 = y.reshape(self.rows, -1)
        out = np.zeros((self.cols, y2.shape[1]))
        for a in range(self.degree + 1):
            cols = self.first + a
            for j in range(y2.shape[1]):
                out[:, j] += np.bincount(cols, weights=self.values[:, a] * y2[:, j], minlength=self.cols)
        return out[:, 0] if y.ndim == 1 else out

    def normal_band(self) -> np.ndarray:
        """BᵗB in upper band storage: ``ab[d + i - j, j] = (BᵗB)[i, j]`` for i <= j."""
        d = self.degree
        ab = np.zeros((d + 1, self.cols))
        for a in range(d + 1):
            for b in range(a, d + 1):
                ab[d - (b - a)] += np.bincount(
                    self.first + b, weights=self.values[:, a] * self.values[:, b], minlength=self.cols
                )
        return ab


def collocation_matrix(space: SplineSpace, params) -> CollocationMatrix:
    t = params.values if isinstance(params, ParameterVector) else np.asarray(params, dtype=np.float64)
    kv = space.knots.values
    d = space.degree
    n = space.dimension
    if n < 1:
        raise ArgumentError(f"space has no basis functions (n={n})")
    lo, hi = space.domain
    first = np.empty(t.size, dtype=np.intp)
    values = np.empty((t.size, d + 1))
    for k, x in enumerate(t.tolist()):
        try:
            span = _span(kv, d, n, x)
        except DomainError as exc:
            raise DomainError(
                f"parameter {k} = {x!r} outside evaluation domain [{lo!r}, {hi!r}]", exc.interval, index=k
            ) from None
        first[k] = span - d
        values[k] = _row(kv, d, span, x)
    first.setflags(write=False)
    values.setflags(write=False)
    return CollocationMatrix(t.size, n, d, first, values)


def _empty_support(B: CollocationMatrix) -> list[int]:
    # basis functions that vanish at every data parameter
    diag = B.normal_band()[B.degree]
    return [int(i) for i in np.flatnonzero(diag == 0.0)]


def solve_normal(B: CollocationMatrix, y) -> np.ndarray:
    """Least-squares coefficients for one or several right-hand sides.

    `y` has shape (m,) or (m, k); all columns share one factorization of BᵗB.
    Raises RankDeficientError if BᵗB is singular to working precision.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != B.rows:
        raise ArgumentError(f"right-hand side has {y.shape[0]} rows, collocation matrix has {B.rows}")
    n = B.cols
    empty = _empty_support(B)
    if empty:
        raise RankDeficientError(
            f"normal matrix singular: basis functions {empty} have no data in their support",
            rank=n - len(empty),
            empty_support=empty,
        )
    ab = B.normal_band()
    rhs = B.rmatvec(y)
    try:
        factor = scipy.linalg.cholesky_banded(ab, lower=False)
    except np.linalg.LinAlgError:
        log.debug("banded Cholesky failed; switching to orthogonal factorization")
        return _solve_orthogonal(B, y)
    eig = scipy.linalg.eigvals_banded(ab, lower=False)
    cond = eig[-1] / eig[0] if eig[0] > 0 else np.inf
    if not cond <= COND_LIMIT:
        log.debug("normal matrix condition %.3g exceeds %.0e; switching to orthogonal factorization", cond, COND_LIMIT)
        return _solve_orthogonal(B, y)
    return scipy.linalg.cho_solve_banded((factor, False), rhs)


def _solve_orthogonal(B: CollocationMatrix, y: np.ndarray) -> np.ndarray:
    dense = B.to_dense()
    c, _, rank, _ = scipy.linalg.lstsq(dense, y, cond=1e-13, lapack_driver="gelsy")
    if rank < B.cols:
        raise RankDeficientError(
            f"collocation matrix has numerical rank {rank} < {B.cols}",
            rank=int(rank),
            empty_support=_empty_support(B),
        )
    return c


def fit_scalar(space: SplineSpace, data) -> tuple[np.ndarray, float]:
    """Spline function in `space` closest to the samples (x_k, y_k) in least squares.

    Returns the B-spline coefficients and the sum of squared residuals, the
    latter recomputed by evaluating the fitted spline at every x_k.
    """
    xy = as_xy(data)
    n = space.dimension
    if xy.shape[0] <= n:
        raise ArgumentError(f"least squares needs more data than basis functions (m > n), got m={xy.shape[0]}, n={n}")
    _require_valid(space)
    B = collocation_matrix(space, xy[:, 0])
    c = solve_normal(B, xy[:, 1])
    resid = xy[:, 1] - deboor_values(space, c, xy[:, 0])
    return c, float(resid @ resid)


def _require_valid(space: SplineSpace) -> None:
    bad = validate_space(space).violations
    if bad:
        raise FitInfeasibleError(f"spline space unusable: {bad[0].message}", index=bad[0].index)


def fit_parametric_curve(
    points,
    n: int,
    d: int,
    method: ParamMethod | str = ParamMethod.CHORD_LENGTH,
    close: bool = False,
) -> FitReport:
    """Fit a plane spline curve with n control points of degree d to ordered points.

    The x and y coordinates are fitted as two right-hand sides of one normal
    system. With ``close=True`` the first point is appended when it differs
    from the last, so the fitted curve returns to its start.
    """
    start = time.perf_counter()
    xy = as_xy(points)
    if close and len(xy) and not np.array_equal(xy[0], xy[-1]):
        xy = np.vstack([xy, xy[:1]])
    m = len(xy)
    if d < 0 or n < d + 1:
        raise ArgumentError(f"need n >= d + 1 >= 1, got n={n}, d={d}")
    if m <= n:
        raise ArgumentError(f"least squares needs more points than control points (m > n), got m={m}, n={n}")
    method = ParamMethod(method)
    params = parametrize(xy, method)
    space = SplineSpace(d, knots_from_params(params, n, d))
    B = collocation_matrix(space, params)
    control = solve_normal(B, xy)
    resid = xy - deboor_values(space, control, params.values)
    lse = float(np.sum(resid * resid))
    ortho = float(np.linalg.norm(B.rmatvec(resid)))
    return FitReport(
        curve=SplineCurve(space, control),
        lse=lse,
        residual_orthogonality=ortho,
        params_method=method,
        n_points=m,
        wall_time=time.perf_counter() - start,
        params=params,
    )
