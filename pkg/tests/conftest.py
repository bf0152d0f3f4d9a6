from collections import deque

import numpy as np
import pytest

from splinefit import KnotVector, SplineCurve, SplineSpace, clamped_knots


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_knots(rng, n, d, clamped=None):
    """Random knot vector of length n + d + 1 passing the gap condition."""
    if clamped is None:
        clamped = rng.random() < 0.5
    while True:
        if clamped:
            inner = np.sort(rng.random(n - d - 1))
            # occasional repeated interior knot, multiplicity at most d
            if d >= 2 and inner.size >= 2 and rng.random() < 0.3:
                inner[1] = inner[0]
            kv = np.asarray(clamped_knots([0.0, *inner, 1.0], d).knots)
        else:
            kv = np.sort(rng.uniform(-1, 2, n + d + 1))
        if all(kv[i + d + 1] > kv[i] for i in range(n)) and kv[n] > kv[d]:
            return KnotVector(kv)


def random_curve(rng, n, d, clamped=None, scale=10.0):
    space = SplineSpace(d, random_knots(rng, n, d, clamped))
    return SplineCurve(space, rng.uniform(-scale, scale, (n, 2)))


def domain_params(rng, space, count):
    lo, hi = space.domain
    ts = rng.uniform(lo, hi, count)
    ts[:2] = lo, hi
    return ts


def bumpy_ellipse(m=2700, a=200.0, b=120.0, bumps=5, amplitude=0.15):
    """Closed test contour: ellipse whose radius carries sinusoidal bumps."""
    th = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
    r = 1.0 + amplitude * np.sin(bumps * th)
    return np.column_stack([a * r * np.cos(th), b * r * np.sin(th)])


def bfs_largest_component(mask):
    """Largest 8-connected component by breadth-first search; ties go to raster order."""
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    best = []
    for y in range(h):
        for x in range(w):
            if mask[y, x] and not seen[y, x]:
                comp = []
                queue = deque([(y, x)])
                seen[y, x] = True
                while queue:
                    cy, cx = queue.popleft()
                    comp.append((cy, cx))
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            ny, nx = cy + dy, cx + dx
                            if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                                seen[ny, nx] = True
                                queue.append((ny, nx))
                if len(comp) > len(best):
                    best = comp
    out = np.zeros_like(mask, dtype=bool)
    for y, x in best:
        out[y, x] = True
    return out


def boundary_pixels(comp):
    """(x, y) of component pixels with a background 8-neighbour, outside the image counting as background."""
    pad = np.pad(comp, 1)
    return {
        (int(x), int(y))
        for y, x in zip(*np.nonzero(comp))
        if not pad[y : y + 3, x : x + 3].all()
    }


def random_blob_image(rng, size=32):
    """Union of random ellipses with holes filled, plus a few isolated specks."""
    from scipy import ndimage

    yy, xx = np.mgrid[:size, :size]
    img = np.zeros((size, size), dtype=bool)
    for _ in range(rng.integers(1, 5)):
        cx, cy = rng.uniform(4, size - 4, 2)
        rx, ry = rng.uniform(2, size / 3.5, 2)
        img |= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    img = ndimage.binary_fill_holes(img)
    specks = rng.random((size, size)) < 0.01
    return img | (specks & ~ndimage.binary_dilation(img, np.ones((3, 3)), iterations=2))


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per acceptance criterion; printed after the run."""

    def record(criterion, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
