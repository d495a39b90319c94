"""
Left-invariant metrics on M2 and the analytic global distance bounds.

The metric is diagonal in the left-invariant frame
A1 = cos(theta) dx + sin(theta) dy (forward), A2 = -sin(theta) dx +
cos(theta) dy (sideways), A3 = dtheta (angular), with positive weights
(w1, w2, w3) and the convention w2 >= w1.  The spatial anisotropy
zeta = w2 / w1 controls how much sideways motion costs relative to forward
motion; zeta >> 1 approaches sub-Riemannian geometry.

The exact distance d(p0, .) induced by this metric is sandwiched between
closed-form bounds:

    l  = sqrt((w1 x)^2 + (w1 y)^2 + (w3 theta)^2)  <=  d,
    d <= u1 = sqrt((w2 x)^2 + (w2 y)^2 + (w3 theta)^2),
    d <= u2 = w1 sqrt(x^2 + y^2) + w3 pi.

At zeta = 1 the lower bound l and upper bound u1 coincide, so both equal d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .group import wrap_angle

__all__ = [
    "FrameVector",
    "MetricParams",
    "coordinate_to_frame",
    "dual_norm",
    "frame_norm",
    "intersection_y",
    "lower_bound_l",
    "upper_bound_u1",
    "upper_bound_u2",
]


@dataclass(frozen=True)
class MetricParams:
    """Weights (w1, w2, w3) of the diagonal left-invariant metric.

    Requires w2 >= w1 > 0 and w3 > 0.  The constructor rejects w2 < w1
    instead of swapping: swapping would silently relabel the forward and
    sideways frame axes and corrupt the sub-Riemannian approximations.
    """

    w1: float
    w2: float
    w3: float

    def __post_init__(self):
        w1, w2, w3 = float(self.w1), float(self.w2), float(self.w3)
        if not (w1 > 0.0 and w2 > 0.0 and w3 > 0.0):
            raise ValueError(f"metric weights must be positive, got {(w1, w2, w3)}")
        if w2 < w1:
            raise ValueError(
                f"sideways weight w2={w2} must be >= forward weight w1={w1}"
            )
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "w3", w3)

    def zeta(self) -> float:
        """Spatial anisotropy w2 / w1 >= 1."""
        return self.w2 / self.w1

    def scaled(self, factor: float) -> "MetricParams":
        return MetricParams(self.w1 * factor, self.w2 * factor, self.w3 * factor)


@dataclass(frozen=True)
class FrameVector:
    """Components (a1, a2, a3) of a (co)tangent vector in the frame A1, A2, A3."""

    a1: float
    a2: float
    a3: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.a1, self.a2, self.a3], dtype=dtype or float)

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))


def frame_norm(v, w: MetricParams):
    """Metric norm sqrt((w1 a1)^2 + (w2 a2)^2 + (w3 a3)^2) of tangent vector(s)."""
    v = np.asarray(v, dtype=float)
    return np.sqrt(
        (w.w1 * v[..., 0]) ** 2 + (w.w2 * v[..., 1]) ** 2 + (w.w3 * v[..., 2]) ** 2
    )


def dual_norm(cov, w: MetricParams):
    """Dual norm sqrt((a1/w1)^2 + (a2/w2)^2 + (a3/w3)^2) of covector(s).

    Closed form of sup <v, cov> / ||v|| for the diagonal metric.
    """
    cov = np.asarray(cov, dtype=float)
    return np.sqrt(
        (cov[..., 0] / w.w1) ** 2
        + (cov[..., 1] / w.w2) ** 2
        + (cov[..., 2] / w.w3) ** 2
    )


def coordinate_to_frame(p, dx, dy, dtheta):
    """Rotate coordinate components (dx, dy, dtheta) at point(s) p into the frame.

    a1 = dx cos(theta) + dy sin(theta), a2 = -dx sin(theta) + dy cos(theta),
    a3 = dtheta.
    """
    p = np.asarray(p, dtype=float)
    c, s = np.cos(p[..., 2]), np.sin(p[..., 2])
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    dtheta = np.asarray(dtheta, dtype=float)
    out = np.empty(np.broadcast_shapes(p[..., 2].shape, dx.shape, dy.shape, dtheta.shape) + (3,))
    out[..., 0] = dx * c + dy * s
    out[..., 1] = -dx * s + dy * c
    out[..., 2] = dtheta
    return out


def _xyt(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1], wrap_angle(p[..., 2])


def lower_bound_l(p, w: MetricParams):
    """Global lower bound l = sqrt((w1 x)^2 + (w1 y)^2 + (w3 theta)^2) <= d."""
    x, y, t = _xyt(p)
    return np.sqrt((w.w1 * x) ** 2 + (w.w1 * y) ** 2 + (w.w3 * t) ** 2)


def upper_bound_u1(p, w: MetricParams):
    """Global upper bound u1 = sqrt((w2 x)^2 + (w2 y)^2 + (w3 theta)^2) >= d."""
    x, y, t = _xyt(p)
    return np.sqrt((w.w2 * x) ** 2 + (w.w2 * y) ** 2 + (w.w3 * t) ** 2)


def upper_bound_u2(p, w: MetricParams):
    """Global upper bound u2 = w1 sqrt(x^2 + y^2) + w3 pi >= d.

    Cost of turning toward the target, driving straight, and turning to the
    final orientation; the total turn never exceeds pi.  Independent of w2,
    hence also an upper bound for the sub-Riemannian distance.  Not tight at
    the reference point, where it evaluates to w3 pi.
    """
    x, y, _ = _xyt(p)
    return w.w1 * np.hypot(x, y) + w.w3 * np.pi


def intersection_y(w: MetricParams) -> float:
    """|y| at which rho_b and rho_c on the y-axis cross the upper bound u2.

    Equals w3 pi / (w2 - w1); returns inf when w2 = w1 (the approximations
    are then exact and never cross).  Small values mean the half-angle and
    log approximations deteriorate close to the reference point.
    """
    if w.w2 == w.w1:
        return math.inf
    return w.w3 * math.pi / (w.w2 - w.w1)
