"""Command line pipeline: contour extraction, spline fit, report and plot.

    splinefit fit --input horse.pgm --n 100 --d 2 --param chord

writes ``<prefix>.coef.csv``, ``<prefix>.report.txt`` and, unless
``--plot off``, ``<prefix>.svg``.

Exit status: 0 success, 2 bad arguments, 3 unreadable input or no contour,
4 infeasible or rank-deficient fit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from xml.sax.saxutils import quoteattr

import numpy as np

from .contour import AUTO, Contour, binarize, load_image, load_points_csv, trace_boundary
from .errors import ArgumentError, ExtractionError, FitInfeasibleError, InputError
from .evaluate import sample_curve
from .geometry import FitReport, KnotVector, ParamMethod, SplineCurve, SplineSpace
from .lsq import fit_parametric_curve

PARAM_CHOICES = {
    "uniform": ParamMethod.UNIFORM,
    "chord": ParamMethod.CHORD_LENGTH,
    "centripetal": ParamMethod.CENTRIPETAL,
    "uniform-literal": ParamMethod.UNIFORM_LITERAL,
}
IMAGE_SUFFIXES = {".pgm", ".pnm"}
CSV_SUFFIXES = {".csv", ".txt"}
PLOT_SAMPLES = 1000

REPORT_FIELDS = ("n", "d", "method", "m", "lse", "residual_orthogonality", "wall_time_ms")


def emit_report(report: FitReport, path) -> None:
    """Write the key=value report; floats use shortest round-trip repr."""
    values = {
        "n": report.n,
        "d": report.d,
        "method": report.params_method.value,
        "m": report.n_points,
        "lse": repr(report.lse),
        "residual_orthogonality": repr(report.residual_orthogonality),
        "wall_time_ms": repr(report.wall_time * 1000.0),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in REPORT_FIELDS:
            fh.write(f"{key}={values[key]}\n")


def read_report(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition("=")
            if key in ("n", "d", "m"):
                out[key] = int(value)
            elif key == "method":
                out[key] = value
            elif key:
                out[key] = float(value)
    return out


def write_coefficients(curve: SplineCurve, path) -> None:
    """Control points as "cx,cy" rows, preceded by degree and knot comment lines."""
    knots = ",".join(repr(float(t)) for t in curve.knots.knots)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# degree {curve.degree}\n")
        fh.write(f"# knots {knots}\n")
        fh.write("cx,cy\n")
        for x, y in curve.control.tolist():
            fh.write(f"{x!r},{y!r}\n")


def read_coefficients(path) -> SplineCurve:
    degree = knots = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# degree "):
                degree = int(line[len("# degree ") :])
            elif line.startswith("# knots "):
                knots = [float(v) for v in line[len("# knots ") :].split(",")]
            elif line and not line.startswith("#") and line != "cx,cy":
                x, y = line.split(",")
                rows.append((float(x), float(y)))
    if degree is None or knots is None:
        raise InputError(f"{path}: missing degree or knot lines")
    return SplineCurve(SplineSpace(degree, KnotVector(knots)), np.array(rows))


def emit_plot(curve: SplineCurve, contour: Contour, path, y_down: bool = True) -> None:
    """SVG overlay of the contour points and the sampled spline.

    SVG user space has y pointing down. Raster coordinates (``y_down``) are
    drawn as they are; otherwise y is negated so the picture is upright.
    """
    flip = 1.0 if y_down else -1.0
    curve_xy = sample_curve(curve, PLOT_SAMPLES) * [1.0, flip]
    data_xy = np.asarray(contour.points, dtype=np.float64) * [1.0, flip]
    both = np.vstack([curve_xy, data_xy])
    lo = both.min(axis=0)
    hi = both.max(axis=0)
    size = np.maximum(hi - lo, 1e-9)
    margin = 0.05 * size
    x0, y0 = lo - margin
    w, h = size + 2 * margin
    dot = 0.004 * max(w, h)
    stroke = 0.002 * max(w, h)
    poly = " ".join(f"{x:.4f},{y:.4f}" for x, y in curve_xy.tolist())
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.4f} {y0:.4f} {w:.4f} {h:.4f}" '
        f'width="800" height="{800 * h / w:.1f}">',
        '<g id="contour" fill="#9ab8d8" fill-opacity="0.6">',
    ]
    lines += [f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{dot:.4f}"/>' for x, y in data_xy.tolist()]
    lines.append("</g>")
    title = f"n={curve.space.dimension} d={curve.degree}"
    lines.append(
        f'<polyline id="spline" fill="none" stroke="#c0392b" stroke-width="{stroke:.4f}" '
        f"points={quoteattr(poly)}><title>{title}</title></polyline>"
    )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected on or off, got {value!r}")
    return value == "on"


def _threshold(value: str):
    if value.upper() == AUTO:
        return AUTO
    try:
        t = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected AUTO or an integer 0..255, got {value!r}") from None
    if not 0 <= t <= 255:
        raise argparse.ArgumentTypeError(f"threshold must be in 0..255, got {t}")
    return t


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="splinefit", description="Approximate a plane contour by a B-spline curve.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fit = sub.add_parser("fit", help="fit a spline curve to an image silhouette or a point list")
    fit.add_argument("--input", required=True, type=Path, help="silhouette .pgm/.pnm or point list .csv")
    fit.add_argument("--n", required=True, type=int, help="number of control points (patches)")
    fit.add_argument("--d", required=True, type=int, help="polynomial degree")
    fit.add_argument("--param", choices=sorted(PARAM_CHOICES), default="chord")
    fit.add_argument("--threshold", type=_threshold, default=AUTO, help="AUTO (Otsu) or intensity 0..255")
    fit.add_argument("--out-prefix", type=Path, help="output path prefix (default: input path without suffix)")
    fit.add_argument("--plot", type=_on_off, default=True, metavar="{on,off}")
    fit.add_argument("--close-contour", type=_on_off, default=True, metavar="{on,off}")
    return parser


def load_contour(path: Path, threshold=AUTO) -> Contour:
    suffix = path.suffix.lower()
    if suffix in IMAGE_SUFFIXES:
        return trace_boundary(binarize(load_image(path), threshold))
    if suffix in CSV_SUFFIXES:
        return load_points_csv(path)
    raise ArgumentError(f"cannot infer input format from suffix {path.suffix!r} (use .pgm, .pnm or .csv)")


def _fit(args) -> int:
    contour = load_contour(args.input, args.threshold)
    report = fit_parametric_curve(
        contour.points, args.n, args.d, PARAM_CHOICES[args.param], close=args.close_contour and contour.closed
    )
    prefix = args.out_prefix or args.input.with_suffix("")
    write_coefficients(report.curve, f"{prefix}.coef.csv")
    emit_report(report, f"{prefix}.report.txt")
    if args.plot:
        y_down = args.input.suffix.lower() in IMAGE_SUFFIXES
        emit_plot(report.curve, contour, f"{prefix}.svg", y_down=y_down)
    print(f"n={report.n} d={report.d} m={report.n_points} lse={report.lse!r}")
    return 0


def run_fit(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _fit(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (InputError, ExtractionError, OSError) as exc:
        status, msg = 3, exc
    except FitInfeasibleError as exc:
        status, msg = 4, exc
    except ValueError as exc:
        status, msg = 2, exc
    print(f"splinefit: error: {str(msg).splitlines()[0] if str(msg) else type(msg).__name__}", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run_fit())


if __name__ == "__main__":
    main()
