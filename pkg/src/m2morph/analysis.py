"""
Verification and reporting: error tables, bound and symmetry checks,
isocontour export.

The mean relative error of an approximation rho against a solved exact
field d~ is the plain average of |rho_i - d~_i| / d~_i over grid nodes,
excluding nodes whose d~ is below one metric cell (the exact distance
vanishes at the source node, and the relative error is meaningless within
one cell of it).  For the diagonal left-invariant metric the Riemannian
volume is a constant multiple of the grid measure, so the plain average
equals the measure-weighted one.

verify_bounds checks the sandwich l <= d~ <= min(u1, u2) and the ratio
bounds d~/zeta <= rho_b <= zeta d~ up to a relative slack plus one metric
cell, on the inner part of the spatial domain (the outflow boundary layer
is excluded).  verify_symmetries measures the worst deviation of a
distance under the 8 fundamental symmetries, either for a closed form
(machine precision expected) or for a solved grid via interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .approx import ApproxKind, approx_distance, rho_b
from .group import apply_symmetry
from .grid import GridSpec, ScalarField, sample_field
from .metric import MetricParams, lower_bound_l, upper_bound_u1, upper_bound_u2

__all__ = [
    "BoundReport",
    "ErrorReport",
    "SymmetryReport",
    "isocontour_export",
    "mean_relative_error",
    "verify_bounds",
    "verify_symmetries",
]


@dataclass(frozen=True)
class ErrorReport:
    kind: ApproxKind
    w: MetricParams
    spec: GridSpec
    mean_rel_err: float
    max_rel_err: float
    n_excluded: int

    def __post_init__(self):
        if self.mean_rel_err > self.max_rel_err:
            raise ValueError("mean relative error cannot exceed the max")


def mean_relative_error(approx: ApproxKind, d_field: ScalarField,
                        w: MetricParams | None = None,
                        nu: float | None = None) -> ErrorReport:
    """Mean relative error of a closed-form approximation against d~.

    Nodes with d~ below one metric cell are excluded and counted.  Raises
    on fields not produced by a converged solve.
    """
    if not d_field.converged:
        raise ValueError("error table requires a converged exact-distance field")
    if not np.all(np.isfinite(d_field.values)):
        raise ValueError("distance field contains non-finite values")
    if w is None:
        if d_field.w is None:
            raise ValueError("no metric attached to the field; pass w explicitly")
        w = d_field.w
    spec = d_field.spec
    rho = approx_distance(approx, spec.points(), w, nu=nu)
    d = d_field.values
    keep = d >= spec.metric_cell(w)
    rel = np.abs(rho[keep] - d[keep]) / d[keep]
    return ErrorReport(
        kind=approx,
        w=w,
        spec=spec,
        mean_rel_err=float(rel.mean()),
        max_rel_err=float(rel.max()),
        n_excluded=int((~keep).sum()),
    )


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    n_checked: int
    n_lower_violations: int
    n_upper_violations: int
    n_ratio_violations: int
    worst_lower: float
    worst_upper: float
    worst_ratio: float
    worst_node: tuple[int, int, int] | None

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: checked {self.n_checked} nodes, "
            f"violations lower={self.n_lower_violations} "
            f"upper={self.n_upper_violations} ratio={self.n_ratio_violations}, "
            f"worst margins l={self.worst_lower:.3e} u={self.worst_upper:.3e} "
            f"ratio={self.worst_ratio:.3e}"
            + (f", worst node {self.worst_node}" if self.worst_node else "")
        )


def verify_bounds(d_field: ScalarField, w: MetricParams | None = None,
                  slack: float = 0.03, inner: float = 0.95) -> BoundReport:
    """Check l <= d~ <= min(u1,u2) and d~/zeta <= rho_b <= zeta d~.

    ``slack`` is the allowed relative violation, with one metric cell of
    absolute headroom on top; ``inner`` restricts to the central fraction
    of the spatial domain.
    """
    if w is None:
        w = d_field.w
    if w is None:
        raise ValueError("no metric attached to the field; pass w explicitly")
    spec = d_field.spec
    pts = spec.points()
    d = d_field.values
    cell = spec.metric_cell(w)
    zeta = w.zeta()

    margin_x = 0.5 * (1.0 - inner) * (spec.n_x - 1)
    margin_y = 0.5 * (1.0 - inner) * (spec.n_y - 1)
    ii = np.arange(spec.n_x)[:, None, None]
    jj = np.arange(spec.n_y)[None, :, None]
    keep = (
        (ii >= margin_x) & (ii <= spec.n_x - 1 - margin_x)
        & (jj >= margin_y) & (jj <= spec.n_y - 1 - margin_y)
    )
    keep = np.broadcast_to(keep, d.shape)

    l = lower_bound_l(pts, w)
    u = np.minimum(upper_bound_u1(pts, w), upper_bound_u2(pts, w))
    rb = rho_b(pts, w)

    # positive margin = violation size beyond slack
    lower_margin = (l * (1.0 - slack) - cell) - d
    upper_margin = d - (u * (1.0 + slack) + cell)
    ratio_low = (d / zeta) * (1.0 - slack) - cell - rb
    ratio_high = rb - (zeta * d * (1.0 + slack) + cell)
    ratio_margin = np.maximum(ratio_low, ratio_high)

    lower_margin = np.where(keep, lower_margin, -np.inf)
    upper_margin = np.where(keep, upper_margin, -np.inf)
    ratio_margin = np.where(keep, ratio_margin, -np.inf)

    n_lower = int((lower_margin > 0).sum())
    n_upper = int((upper_margin > 0).sum())
    n_ratio = int((ratio_margin > 0).sum())
    worst = np.maximum(np.maximum(lower_margin, upper_margin), ratio_margin)
    worst_node = None
    if n_lower + n_upper + n_ratio > 0:
        worst_node = tuple(int(v) for v in np.unravel_index(np.argmax(worst), d.shape))
    return BoundReport(
        passed=(n_lower + n_upper + n_ratio) == 0,
        n_checked=int(keep.sum()),
        n_lower_violations=n_lower,
        n_upper_violations=n_upper,
        n_ratio_violations=n_ratio,
        worst_lower=float(lower_margin.max()),
        worst_upper=float(upper_margin.max()),
        worst_ratio=float(ratio_margin.max()),
        worst_node=worst_node,
    )


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    max_deviation: float
    tol: float
    n_points: int
    per_symmetry: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}: max deviation {self.max_deviation:.3e} "
                f"(tol {self.tol:.1e}) over {self.n_points} points")


def _sample_points(n: int, radius: float, seed: int) -> np.ndarray:
    """Random points with spatial part in the disc of the given radius.

    The symmetries preserve the spatial norm, so mapped points stay inside
    the same disc (needed for grid-field checks).
    """
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    phi = rng.uniform(-np.pi, np.pi, n)
    theta = rng.uniform(-np.pi, np.pi, n)
    return np.stack([r * np.cos(phi), r * np.sin(phi), theta], axis=-1)


def verify_symmetries(target, w: MetricParams | None = None, n_points: int = 100_000,
                      seed: int = 0, tol: float | None = None,
                      nu: float | None = None, min_cells: float = 7.0) -> SymmetryReport:
    """Max deviation of a distance under the 8 fundamental symmetries.

    ``target`` is an ApproxKind (requires w), a callable p -> values, or a
    solved ScalarField (checked by interpolation, relative deviation).
    Closed forms default to tol 1e-10, grid fields to 2e-2.

    For grid fields, points with d~ below ``min_cells`` metric cells are
    skipped: both compared values carry first-order discretisation and
    interpolation error at the one-cell scale, so the relative measure is
    meaningful only a handful of cells away from the source.
    """
    if isinstance(target, ScalarField):
        if w is None:
            w = target.w
        if w is None:
            raise ValueError("no metric attached to the field; pass w explicitly")
        spec = target.spec
        tol = 0.02 if tol is None else tol
        pts = _sample_points(n_points, 0.95 * spec.x_max, seed)
        base = sample_field(target, pts)
        floor = min_cells * spec.metric_cell(w)
        keep = base > floor
        per = {}
        worst = 0.0
        for i in range(8):
            mapped = sample_field(target, apply_symmetry(i, pts))
            dev = np.abs(mapped[keep] - base[keep]) / base[keep]
            per[i] = float(dev.max()) if dev.size else 0.0
            worst = max(worst, per[i])
        return SymmetryReport(worst <= tol, worst, tol, int(keep.sum()), per)

    if isinstance(target, ApproxKind):
        if w is None:
            raise ValueError("closed-form check requires metric parameters")
        func = lambda p: approx_distance(target, p, w, nu=nu)  # noqa: E731
    elif callable(target):
        func = target
    else:
        raise TypeError(f"cannot verify symmetries of {target!r}")

    tol = 1e-10 if tol is None else tol
    pts = _sample_points(n_points, 3.0, seed)
    base = func(pts)
    per = {}
    worst = 0.0
    for i in range(8):
        dev = np.abs(func(apply_symmetry(i, pts)) - base)
        per[i] = float(dev.max())
        worst = max(worst, per[i])
    return SymmetryReport(worst <= tol, worst, tol, n_points, per)


def isocontour_export(target, level: float, theta_slices, spec: GridSpec | None = None,
                      w: MetricParams | None = None, nu: float | None = None):
    """Closed isocontour polylines {value = level} per theta slice.

    ``target`` is an ApproxKind (evaluated on the grid spec) or a
    ScalarField.  Returns a list of rows (slice_theta, segment_id, x, y)
    from marching squares on each slice; an empty contour yields no rows.
    """
    from skimage import measure

    if not level > 0.0:
        raise ValueError(f"contour level must be positive, got {level}")
    if isinstance(target, ScalarField):
        spec = target.spec
        values = target.values
    else:
        if spec is None or w is None:
            raise ValueError("closed-form contour needs a grid spec and metric")
        values = approx_distance(target, spec.points(), w, nu=nu)

    theta_axis = spec.theta_axis()
    rows = []
    for theta in theta_slices:
        k = int(np.argmin(np.abs(theta_axis - theta)))
        plane = values[:, :, k]
        if level >= plane.max() or level <= plane.min():
            continue
        contours = measure.find_contours(plane, level)
        for seg_id, contour in enumerate(contours):
            xs = -spec.x_max + contour[:, 0] * spec.spacing_x
            ys = -spec.x_max + contour[:, 1] * spec.spacing_y
            for x, y in zip(xs, ys):
                rows.append((float(theta_axis[k]), seg_id, float(x), float(y)))
    return rows


def write_contours_csv(rows, path) -> None:
    """Write isocontour rows as CSV: slice_theta,segment_id,x,y."""
    import os
    import tempfile

    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write("slice_theta,segment_id,x,y\n")
            for theta, seg, x, y in rows:
                handle.write(f"{theta:.17g},{seg},{x:.17g},{y:.17g}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
