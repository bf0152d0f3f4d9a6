"""Silhouette images to ordered contour points.

Images are portable graymaps (P2 or P5, max value <= 255). Pixel coordinates
are (x, y) with y increasing downward.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ExtractionError, InputError

AUTO = "AUTO"

# Moore neighbourhood as (dx, dy), clockwise on screen starting west.
_RING = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_DIR = {v: k for k, v in enumerate(_RING)}


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray  # (height, width), row-major
    max_value: int = 255

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.uint8 if self.max_value <= 255 else np.uint16)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"image must be a nonempty 2-D array, got shape {px.shape}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class Contour:
    points: np.ndarray  # (k, 2) of (x, y)
    closed: bool

    def __len__(self):
        return len(self.points)


class _Reader:
    """Byte cursor over a netpbm file that reports offsets on failure."""

    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def fail(self, what, at=None):
        at = self.pos if at is None else at
        raise InputError(f"{self.path}: {what} at byte offset {at}", offset=at)

    def skip_space(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos]
            if c == ord("#"):
                while self.pos < len(data) and data[self.pos] not in b"\r\n":
                    self.pos += 1
            elif c in b" \t\r\n\v\f":
                self.pos += 1
            else:
                return

    def integer(self, what):
        self.skip_space()
        start = self.pos
        while self.pos < len(self.data) and chr(self.data[self.pos]).isdigit():
            self.pos += 1
        if self.pos == start:
            if start >= len(self.data):
                self.fail(f"unexpected end of file reading {what}", start)
            self.fail(f"expected integer for {what}", start)
        return int(self.data[start : self.pos])


def load_image(path) -> GrayImage:
    """Decode a P2 (ASCII) or P5 (binary) graymap and rescale it to 0..255."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read image: {exc.strerror or exc}") from exc
    r = _Reader(data, path)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        r.fail(f"unsupported magic number {magic!r} (expected P2 or P5)", 0)
    r.pos = 2
    if r.pos < len(data) and data[r.pos] not in b" \t\r\n\v\f#":
        r.fail("expected whitespace after magic number")
    width = r.integer("width")
    height = r.integer("height")
    maxval = r.integer("max value")
    if width <= 0 or height <= 0:
        r.fail(f"image dimensions must be positive, got {width}x{height}")
    if not 0 < maxval <= 255:
        r.fail(f"max value must be in 1..255, got {maxval}")
    count = width * height
    if magic == b"P5":
        if r.pos >= len(data) or data[r.pos] not in b" \t\r\n\v\f":
            r.fail("expected single whitespace before raster")
        r.pos += 1
        raster = data[r.pos : r.pos + count]
        if len(raster) < count:
            r.fail(f"truncated raster: {len(raster)} of {count} bytes present", len(data))
        values = np.frombuffer(raster, dtype=np.uint8).astype(np.int64)
        bad = np.flatnonzero(values > maxval)
        if bad.size:
            r.fail(f"pixel value {values[bad[0]]} exceeds max value {maxval}", r.pos + int(bad[0]))
    else:
        values = np.empty(count, dtype=np.int64)
        for k in range(count):
            r.skip_space()
            at = r.pos
            v = r.integer(f"pixel {k}")
            if v > maxval:
                r.fail(f"pixel value {v} exceeds max value {maxval}", at)
            values[k] = v
    if maxval != 255:
        values = np.rint(values * (255.0 / maxval)).astype(np.int64)
    return GrayImage(values.reshape(height, width))


def otsu_threshold(img: GrayImage) -> int:
    """Threshold maximizing between-class variance; foreground is ``pixel < threshold``.

    When several cut points tie, the middle of the tied range is used.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(hist.size)
    w0 = np.cumsum(hist)
    w1 = total - w0
    s0 = np.cumsum(hist * levels)
    mu0 = np.divide(s0, w0, out=np.zeros_like(s0), where=w0 > 0)
    mu1 = np.divide(s0[-1] - s0, w1, out=np.zeros_like(s0), where=w1 > 0)
    between = w0 * w1 * (mu0 - mu1) ** 2
    best = between.max()
    if best <= 0:
        # single intensity: nothing is darker than it
        return int(img.pixels.min())
    ties = np.flatnonzero(between >= best * (1 - 1e-12))
    # cut k puts levels <= k in the dark class
    k = (int(ties[0]) + int(ties[-1])) // 2
    return k + 1


def binarize(img: GrayImage, threshold=AUTO) -> GrayImage:
    """Map dark pixels (intensity < threshold) to 1 and the rest to 0."""
    if isinstance(threshold, str):
        if threshold.upper() != AUTO:
            raise ValueError(f"threshold must be an intensity or {AUTO!r}, got {threshold!r}")
        threshold = otsu_threshold(img)
    return GrayImage((img.pixels < threshold).astype(np.uint8), max_value=1)


def largest_component(mask: np.ndarray) -> np.ndarray:
    """Boolean mask of the largest 8-connected foreground component.

    Ties go to the component reached first in raster order.
    """
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        raise ExtractionError("image has no foreground pixels")
    sizes = np.bincount(labels.ravel())[1:]
    return labels == int(np.argmax(sizes)) + 1


def trace_boundary(binary: GrayImage) -> Contour:
    """Ordered closed boundary of the largest 8-connected foreground component.

    Moore-neighbour tracing from the first foreground pixel in raster order,
    stopped when the opening move from the start pixel repeats (Jacob's
    criterion). When a move cuts a corner diagonally and the pixel inside the
    corner is foreground, that pixel is emitted in between, so every pixel of
    the component with a background 8-neighbour on the outside is visited and
    consecutive points stay 8-adjacent. The loop has positive signed area in
    image coordinates (clockwise as displayed with y pointing down); the
    start point is not repeated at the end.
    """
    comp = largest_component(np.asarray(binary.pixels) != 0)
    grid = np.pad(comp, 1)
    ys, xs = np.nonzero(grid)
    start = (int(xs[0]), int(ys[0]))

    def move(p, back):
        for i in range(1, 9):
            k = (back + i) % 8
            dx, dy = _RING[k]
            q = (p[0] + dx, p[1] + dy)
            if grid[q[1], q[0]]:
                bx, by = _RING[(k - 1) % 8]
                return q, k, _DIR[(p[0] + bx - q[0], p[1] + by - q[1])]
        return None, None, None

    first, k0, back = move(start, 0)
    if first is None:
        raise ExtractionError("largest component is a single pixel; it has no boundary curve")
    out = []
    p, q, k = start, first, k0
    limit = 8 * len(xs) + 8
    while True:
        out.append(p)
        if k % 2:
            cx, cy = _RING[(k + 1) % 8]
            corner = (p[0] + cx, p[1] + cy)
            if grid[corner[1], corner[0]]:
                out.append(corner)
        p = q
        q, k, back = move(p, back)
        if p == start and q == first:
            break
        if len(out) > limit:
            raise ExtractionError("boundary tracing did not close")
    if len(out) < 4:
        raise ExtractionError(f"largest component is too small to trace ({len(out)} boundary points)")
    pts = np.array(out, dtype=np.float64) - 1.0
    return Contour(pts, closed=True)


def load_points_csv(path) -> Contour:
    """Read "x,y" lines (optional header) into an open or closed contour."""
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: cannot read points: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 at byte offset {exc.start}", offset=exc.start) from exc
    pts = []
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not f.strip() for f in row):
            continue
        fields = [f.strip() for f in row]
        if len(fields) != 2:
            raise InputError(f"{path}:{lineno}: expected 2 columns, got {len(fields)}", line=lineno)
        try:
            x, y = float(fields[0]), float(fields[1])
        except ValueError:
            if lineno == 1 and not any(_is_number(f) for f in fields):
                continue
            raise InputError(f"{path}:{lineno}: malformed point {','.join(row)!r}", line=lineno) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InputError(f"{path}:{lineno}: non-finite coordinate", line=lineno)
        pts.append((x, y))
    if not pts:
        raise InputError(f"{path}: no points")
    arr = np.array(pts, dtype=np.float64)
    closed = len(arr) > 1 and bool(np.array_equal(arr[0], arr[-1]))
    return Contour(arr, closed=closed)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True
