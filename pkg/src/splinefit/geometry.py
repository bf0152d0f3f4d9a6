"""Value types shared across the package.

All types are frozen after construction. Array fields are stored as read-only
float64 numpy arrays so instances can be shared freely.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ArgumentError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains NaN or infinite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ArgumentError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def as_xy(points) -> np.ndarray:
    """Convert a sequence of `Point2` or an (m, 2) array-like to a finite float array."""
    if isinstance(points, np.ndarray):
        arr = np.array(points, dtype=np.float64)
    else:
        arr = np.array([tuple(p) for p in points], dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ArgumentError(f"points must have shape (m, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError("points contain NaN or infinite coordinates")
    return arr


class ParamMethod(enum.Enum):
    UNIFORM = "uniform"
    CHORD_LENGTH = "chord_length"
    CENTRIPETAL = "centripetal"
    # t_1 = 0, t_i = i/m taken literally; kept for comparison with UNIFORM
    UNIFORM_LITERAL = "uniform_literal"


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Parameter values assigned to the m data points."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, 1, "parameter vector")
        if arr.size < 2:
            raise ArgumentError("a parameter vector needs at least 2 values")
        if arr[0] != 0.0:
            raise ArgumentError(f"parameter vector must start at 0, got {arr[0]!r}")
        if np.any(np.diff(arr) < 0):
            raise ArgumentError("parameter vector must be nondecreasing")
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Nondecreasing sequence of finite knots, stored in full (length n + d + 1)."""

    knots: np.ndarray
    # plain-float copy for the scalar evaluation paths, which are faster on tuples
    values: tuple = field(init=False, repr=False)

    def __post_init__(self):
        arr = _frozen_array(self.knots, 1, "knot vector")
        if arr.size < 2:
            raise ArgumentError("a knot vector needs at least 2 knots")
        bad = np.flatnonzero(np.diff(arr) < 0)
        if bad.size:
            i = int(bad[0])
            raise ArgumentError(
                f"knot vector must be nondecreasing: knots[{i}]={arr[i]!r} > knots[{i + 1}]={arr[i + 1]!r}"
            )
        object.__setattr__(self, "knots", arr)
        object.__setattr__(self, "values", tuple(float(v) for v in arr))

    def __len__(self):
        return self.knots.size

    def __getitem__(self, k):
        return self.knots[k]

    def __eq__(self, other):
        if not isinstance(other, KnotVector):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(self.values)


@dataclass(frozen=True)
class SplineSpace:
    """Degree plus knot vector.

    Construction only checks the degree and the knot vector itself; whether the
    space is usable for least squares is answered by `validate_space`.
    """

    degree: int
    knots: KnotVector

    def __post_init__(self):
        if not isinstance(self.knots, KnotVector):
            object.__setattr__(self, "knots", KnotVector(self.knots))
        if isinstance(self.degree, bool) or int(self.degree) != self.degree or self.degree < 0:
            raise ArgumentError(f"degree must be a nonnegative integer, got {self.degree!r}")
        object.__setattr__(self, "degree", int(self.degree))

    @property
    def dimension(self) -> int:
        """Number of B-splines n = len(knots) - d - 1."""
        return len(self.knots) - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        """Evaluation domain [knots[d], knots[n]] (0-based)."""
        t = self.knots.values
        return t[self.degree], t[self.dimension]

    def interior_knots(self) -> np.ndarray:
        """The knot vector without its first and last entry."""
        return self.knots.knots[1:-1]


@dataclass(frozen=True, eq=False)
class SplineCurve:
    """A plane spline curve; `control` holds the n control points as an (n, 2) array."""

    space: SplineSpace
    control: np.ndarray

    def __post_init__(self):
        ctrl = as_xy(self.control)
        ctrl.setflags(write=False)
        if ctrl.shape[0] != self.space.dimension:
            raise ArgumentError(
                f"curve needs {self.space.dimension} control points, got {ctrl.shape[0]}"
            )
        object.__setattr__(self, "control", ctrl)

    @property
    def degree(self) -> int:
        return self.space.degree

    @property
    def knots(self) -> KnotVector:
        return self.space.knots

    @property
    def points(self) -> tuple[Point2, ...]:
        return tuple(Point2(float(x), float(y)) for x, y in self.control)


@dataclass(frozen=True, eq=False)
class FitReport:
    curve: SplineCurve
    lse: float
    residual_orthogonality: float
    params_method: ParamMethod
    n_points: int
    wall_time: float  # seconds
    params: ParameterVector | None = None

    def __post_init__(self):
        if not (math.isfinite(self.lse) and self.lse >= 0):
            raise ArgumentError(f"lse must be finite and nonnegative, got {self.lse!r}")

    @property
    def n(self) -> int:
        return self.curve.space.dimension

    @property
    def d(self) -> int:
        return self.curve.space.degree


class Violation(NamedTuple):
    kind: str
    index: int | None
    message: str


@dataclass(frozen=True)
class Validity:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_space(space: SplineSpace) -> Validity:
    """Check that `space` can be used as the target of a least-squares fit.

    Reports every violation found instead of raising: an unordered knot
    sequence, a dimension below d+1, and each index i (0-based) for which
    knots[i + d + 1] > knots[i] fails.
    """
    t = space.knots.values
    d = space.degree
    n = space.dimension
    found: list[Violation] = []
    for i in range(len(t) - 1):
        if t[i] > t[i + 1]:
            found.append(Violation("order", i, f"knots[{i}]={t[i]!r} > knots[{i + 1}]={t[i + 1]!r}"))
    if n < d + 1:
        found.append(
            Violation("dimension", None, f"dimension n={n} is below d+1={d + 1} for {len(t)} knots")
        )
    for i in range(max(n, 0)):
        if not t[i + d + 1] > t[i]:
            found.append(
                Violation("gap", i, f"knots[{i + d + 1}]={t[i + d + 1]!r} must exceed knots[{i}]={t[i]!r}")
            )
    return Validity(tuple(found))


def clamped_knots(breaks: Sequence[float] | Iterable[float], degree: int) -> KnotVector:
    """Knot vector with `breaks` as distinct breakpoints and d+1 fold end knots."""
    b = [float(v) for v in breaks]
    return KnotVector([b[0]] * degree + b + [b[-1]] * degree)
