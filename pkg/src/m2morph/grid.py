"""
Regular (x, y, theta) grids on M2, scalar fields on them, interpolation,
and field file I/O.

The spatial axes span [-x_max, x_max] with an odd number of nodes so that
x = y = 0 is a node; the angular axis covers the circle with n_theta equal
cells of size 2 pi / n_theta, placed so that theta = 0 is always a node
(for even n_theta the axis starts at -pi, for odd n_theta the nodes sit at
multiples of the spacing symmetric around 0).  The reference point
(0, 0, 0) is therefore always a grid node.

Field files use the "MG1" format: a single text header line

    MG1 <n_x> <n_y> <n_theta> <x_max> <w1> <w2> <w3> <kind>

terminated by a newline, followed by raw little-endian float64 values in
row-major order with theta fastest.  CSV export writes columns
x,y,theta,value with 17 significant digits.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .group import wrap_angle
from .metric import MetricParams

__all__ = [
    "GridSpec",
    "ScalarField",
    "read_mg1",
    "sample_field",
    "write_csv",
    "write_mg1",
]


@dataclass(frozen=True)
class GridSpec:
    """Regular grid over [-x_max, x_max]^2 x S^1.

    n_x and n_y must be odd (node at the spatial origin) and n_theta >= 3.
    """

    n_x: int
    n_y: int
    n_theta: int
    x_max: float = 3.0

    def __post_init__(self):
        if self.n_x < 3 or self.n_y < 3 or self.n_theta < 3:
            raise ValueError("grid needs at least 3 nodes per axis")
        if self.n_x % 2 == 0 or self.n_y % 2 == 0:
            raise ValueError("n_x and n_y must be odd so that the origin is a node")
        if not self.x_max > 0:
            raise ValueError(f"x_max must be positive, got {self.x_max}")

    @property
    def spacing_x(self) -> float:
        return 2.0 * self.x_max / (self.n_x - 1)

    @property
    def spacing_y(self) -> float:
        return 2.0 * self.x_max / (self.n_y - 1)

    @property
    def spacing_theta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    def x_axis(self) -> np.ndarray:
        return np.linspace(-self.x_max, self.x_max, self.n_x)

    def y_axis(self) -> np.ndarray:
        return np.linspace(-self.x_max, self.x_max, self.n_y)

    def theta_axis(self) -> np.ndarray:
        return (np.arange(self.n_theta) - self.n_theta // 2) * self.spacing_theta

    @property
    def origin_index(self) -> tuple[int, int, int]:
        """Index of the reference-point node (0, 0, 0)."""
        return (self.n_x - 1) // 2, (self.n_y - 1) // 2, self.n_theta // 2

    def points(self) -> np.ndarray:
        """All grid nodes as an array of shape (n_x, n_y, n_theta, 3)."""
        x, y, t = np.meshgrid(
            self.x_axis(), self.y_axis(), self.theta_axis(), indexing="ij"
        )
        return np.stack([x, y, t], axis=-1)

    def metric_cell(self, w: MetricParams) -> float:
        """Metric length of one grid cell diagonal."""
        return float(
            np.sqrt(
                (w.w1 * self.spacing_x) ** 2
                + (w.w2 * self.spacing_y) ** 2
                + (w.w3 * self.spacing_theta) ** 2
            )
        )


@dataclass
class ScalarField:
    """Values on a GridSpec, shape (n_x, n_y, n_theta), theta axis periodic.

    ``w`` and ``kind`` are carried as metadata for file round-trips and for
    operations that need to know which metric produced a distance field.
    """

    spec: GridSpec
    values: np.ndarray
    w: MetricParams | None = None
    kind: str = "unknown"
    converged: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = (self.spec.n_x, self.spec.n_y, self.spec.n_theta)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != expected:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {expected}"
            )

    def copy_with(self, values: np.ndarray, kind: str | None = None) -> "ScalarField":
        return ScalarField(
            spec=self.spec,
            values=values,
            w=self.w,
            kind=self.kind if kind is None else kind,
            converged=self.converged,
        )


def sample_field(f: ScalarField, p, mode: str = "error"):
    """Trilinear interpolation of a field at point(s) p, periodic in theta.

    ``mode`` controls spatial out-of-domain queries: "error" raises (no
    extrapolation for distance fields), "replicate" clamps to the boundary.
    """
    if mode not in ("error", "replicate"):
        raise ValueError(f"unknown sampling mode {mode!r}")
    p = np.asarray(p, dtype=float)
    spec = f.spec
    x = p[..., 0]
    y = p[..., 1]
    t = wrap_angle(p[..., 2])

    eps = 1e-12 * max(1.0, spec.x_max)
    if mode == "error":
        if np.any(np.abs(x) > spec.x_max + eps) or np.any(np.abs(y) > spec.x_max + eps):
            raise ValueError("spatial query outside the field domain")

    fx = np.clip((x + spec.x_max) / spec.spacing_x, 0.0, spec.n_x - 1.0)
    fy = np.clip((y + spec.x_max) / spec.spacing_y, 0.0, spec.n_y - 1.0)
    # theta axis node j sits at (j - n_theta//2) * spacing; wrap makes the
    # fractional index periodic.
    ft = t / spec.spacing_theta + spec.n_theta // 2
    ft = np.mod(ft, spec.n_theta)

    i0 = np.minimum(np.floor(fx).astype(np.int64), spec.n_x - 2)
    j0 = np.minimum(np.floor(fy).astype(np.int64), spec.n_y - 2)
    k0 = np.floor(ft).astype(np.int64) % spec.n_theta
    wx = fx - i0
    wy = fy - j0
    wt = ft - k0
    i1 = i0 + 1
    j1 = j0 + 1
    k1 = (k0 + 1) % spec.n_theta

    v = f.values
    out = np.zeros(np.broadcast_shapes(fx.shape, fy.shape, ft.shape))
    for di, wi in ((i0, 1.0 - wx), (i1, wx)):
        for dj, wj in ((j0, 1.0 - wy), (j1, wy)):
            for dk, wk in ((k0, 1.0 - wt), (k1, wt)):
                out = out + wi * wj * wk * v[di, dj, dk]
    return out


_MAGIC = "MG1"


def write_mg1(f: ScalarField, path) -> None:
    """Write a field to an MG1 file (atomic temp-then-rename)."""
    w = f.w if f.w is not None else MetricParams(1.0, 1.0, 1.0)
    kind = f.kind.replace(" ", "_") or "unknown"
    header = (
        f"{_MAGIC} {f.spec.n_x} {f.spec.n_y} {f.spec.n_theta} "
        f"{f.spec.x_max!r} {w.w1!r} {w.w2!r} {w.w3!r} {kind}\n"
    )
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".mg1.tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(header.encode("ascii"))
            handle.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def read_mg1(path) -> ScalarField:
    """Read a field from an MG1 file."""
    with open(path, "rb") as handle:
        header = handle.readline().decode("ascii").strip()
        parts = header.split()
        if len(parts) != 9 or parts[0] != _MAGIC:
            raise ValueError(f"not an MG1 file: bad header {header!r}")
        n_x, n_y, n_theta = int(parts[1]), int(parts[2]), int(parts[3])
        x_max = float(parts[4])
        w = MetricParams(float(parts[5]), float(parts[6]), float(parts[7]))
        kind = parts[8]
        raw = handle.read()
    count = n_x * n_y * n_theta
    values = np.frombuffer(raw, dtype="<f8", count=count).reshape(n_x, n_y, n_theta)
    spec = GridSpec(n_x=n_x, n_y=n_y, n_theta=n_theta, x_max=x_max)
    return ScalarField(spec=spec, values=values.copy(), w=w, kind=kind)


def write_csv(f: ScalarField, path) -> None:
    """Write a field as CSV rows x,y,theta,value (17 significant digits, LF)."""
    pts = f.spec.points().reshape(-1, 3)
    vals = f.values.reshape(-1)
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write("x,y,theta,value\n")
            for (x, y, t), v in zip(pts, vals):
                handle.write(f"{x:.17g},{y:.17g},{t:.17g},{v:.17g}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
