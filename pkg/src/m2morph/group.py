"""
Group structure of SE(2) acting on the space M2 of planar positions and
orientations.

Points of M2 are triples (x, y, theta) with theta an angle in [-pi, pi).
Identifying a point with the rigid motion that maps the reference point
(0, 0, 0) onto it, M2 carries the SE(2) product, inverse, exponential and
logarithm.  On top of those this module provides the half-angle coordinates
(the log coordinates with the sinc factor stripped) and the eight
reflectional symmetries of the reference point, which every distance in
this package is invariant under.

All functions accept a single point ``(3,)`` or a batch ``(..., 3)`` and
are vectorised; they return ndarrays of the same shape.  Angles are always
reduced to [-pi, pi) on output.  At the seam theta = -pi the half-angle and
log coordinates of the two representatives +/-pi differ by a sign flip in
the first two components; everything downstream squares them, so no seam
handling is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "IDENTITY",
    "PointM2",
    "apply_symmetry",
    "classify_relation",
    "exp_map",
    "group_product",
    "half_angle",
    "inverse",
    "log_map",
    "sinc",
    "wrap_angle",
]

# Relation test tolerance for classify_relation (|c^i| below this counts as 0).
RELATION_TOL = 1e-9

# Taylor guard: below this |x| evaluate sinc by series to avoid cancellation.
_SINC_GUARD = 1e-4


def wrap_angle(theta):
    """Reduce an angle (array) to the canonical interval [-pi, pi)."""
    theta = np.asarray(theta, dtype=float)
    return theta - 2.0 * np.pi * np.floor((theta + np.pi) / (2.0 * np.pi))


def sinc(x):
    """Unnormalised sinc(x) = sin(x)/x with a series guard near 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SINC_GUARD
    # sin(x)/x = 1 - x^2/6 + x^4/120 - ...
    series = 1.0 - x * x / 6.0
    safe = np.where(small, 1.0, x)
    return np.where(small, series, np.sin(safe) / safe)


@dataclass(frozen=True)
class PointM2:
    """A point (x, y, theta) of M2; theta is canonicalised to [-pi, pi)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.theta], dtype=dtype or float)

    def __iter__(self):
        return iter((self.x, self.y, self.theta))


IDENTITY = PointM2(0.0, 0.0, 0.0)


def _as_points(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError(f"expected point array with last axis 3, got shape {p.shape}")
    return p


def group_product(g1, g2):
    """SE(2) product g1 g2; the output angle is reduced to [-pi, pi)."""
    g1 = _as_points(g1)
    g2 = _as_points(g2)
    c, s = np.cos(g1[..., 2]), np.sin(g1[..., 2])
    out = np.empty(np.broadcast_shapes(g1.shape, g2.shape), dtype=float)
    out[..., 0] = g1[..., 0] + c * g2[..., 0] - s * g2[..., 1]
    out[..., 1] = g1[..., 1] + s * g2[..., 0] + c * g2[..., 1]
    out[..., 2] = wrap_angle(g1[..., 2] + g2[..., 2])
    return out


def inverse(g):
    """Group inverse; equals the symmetry with index 5 (Lie algebra inversion)."""
    g = _as_points(g)
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    out = np.empty_like(g)
    out[..., 0] = -(c * g[..., 0] + s * g[..., 1])
    out[..., 1] = s * g[..., 0] - c * g[..., 1]
    out[..., 2] = wrap_angle(-g[..., 2])
    return out


def exp_map(c):
    """Group exponential of log coordinates (c1, c2, c3) -> point (x, y, theta)."""
    c = _as_points(c)
    half = 0.5 * c[..., 2]
    co, si, sc = np.cos(half), np.sin(half), sinc(half)
    out = np.empty_like(c)
    out[..., 0] = (c[..., 0] * co - c[..., 1] * si) * sc
    out[..., 1] = (c[..., 0] * si + c[..., 1] * co) * sc
    out[..., 2] = wrap_angle(c[..., 2])
    return out


def log_map(g):
    """Group logarithm, returning log coordinates (c1, c2, c3) with c3 = theta.

    sinc(theta/2) has no zero on [-pi, pi], so the map is defined everywhere;
    only exp(log(g)) = g requires theta in the open interval (-pi, pi).
    """
    g = _as_points(g)
    theta = wrap_angle(g[..., 2])
    half = 0.5 * theta
    co, si, sc = np.cos(half), np.sin(half), sinc(half)
    out = np.empty_like(g)
    out[..., 0] = (g[..., 0] * co + g[..., 1] * si) / sc
    out[..., 1] = (-g[..., 0] * si + g[..., 1] * co) / sc
    out[..., 2] = theta
    return out


def half_angle(g):
    """Half-angle coordinates (b1, b2, b3).

    These are the log coordinates without the sinc factor:
    b1 = c1 sinc(theta/2), b2 = c2 sinc(theta/2), b3 = c3 = theta, and the
    spatial norm is preserved: b1^2 + b2^2 = x^2 + y^2.
    """
    g = _as_points(g)
    theta = wrap_angle(g[..., 2])
    half = 0.5 * theta
    co, si = np.cos(half), np.sin(half)
    out = np.empty_like(g)
    out[..., 0] = g[..., 0] * co + g[..., 1] * si
    out[..., 1] = -g[..., 0] * si + g[..., 1] * co
    out[..., 2] = theta
    return out


# Sign pattern of each symmetry on the (b1, b2, b3) (equivalently (c1, c2, c3))
# coordinates, indexed by symmetry 0..7.  Used by tests as an independent
# oracle; the implementations below work in (x, y, theta).
SIGN_FLIPS = np.array(
    [
        [+1, +1, +1],
        [+1, -1, +1],
        [-1, +1, +1],
        [-1, -1, +1],
        [-1, +1, -1],
        [-1, -1, -1],
        [+1, +1, -1],
        [+1, -1, -1],
    ],
    dtype=float,
)


def _sym1(g):
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    out = np.empty_like(g)
    out[..., 0] = g[..., 0] * c + g[..., 1] * s
    out[..., 1] = g[..., 0] * s - g[..., 1] * c
    out[..., 2] = g[..., 2]
    return out


def _sym2(g):
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    out = np.empty_like(g)
    out[..., 0] = -g[..., 0] * c - g[..., 1] * s
    out[..., 1] = -g[..., 0] * s + g[..., 1] * c
    out[..., 2] = g[..., 2]
    return out


def _sym6(g):
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    out = np.empty_like(g)
    out[..., 0] = g[..., 0] * c + g[..., 1] * s
    out[..., 1] = -g[..., 0] * s + g[..., 1] * c
    out[..., 2] = wrap_angle(-g[..., 2])
    return out


def apply_symmetry(i, p):
    """Apply the i-th fundamental symmetry (i in 0..7) to point(s) p.

    Indices 1, 2 and 6 are the generating reflections; 3, 4, 5 and 7 are their
    compositions (3 = 2 o 1, 4 = 2 o 6, 7 = 1 o 6, 5 = 2 o 1 o 6).  Each is an
    involution, and on b/c coordinates acts by the sign pattern SIGN_FLIPS.
    """
    i = int(i)
    p = _as_points(p)
    if i == 0:
        return p.copy()
    if i == 1:
        return _sym1(p)
    if i == 2:
        return _sym2(p)
    if i == 6:
        return _sym6(p)
    if i == 3:
        return _sym2(_sym1(p))
    if i == 4:
        return _sym2(_sym6(p))
    if i == 7:
        return _sym1(_sym6(p))
    if i == 5:
        return _sym2(_sym1(_sym6(p)))
    raise ValueError(f"symmetry index must be in 0..7, got {i}")


def classify_relation(p, tol=RELATION_TOL):
    """Geometric relation of point(s) p to the reference point.

    Returns a dict of boolean arrays:
      coradial   -- c1 = 0: orientations normal to a common circle,
      cocircular -- c2 = 0: orientations tangent to a common circle
                    (equivalently the double-angle relation theta = 2 phi),
      parallel   -- c3 = 0: equal orientations.

    Each relation holds iff the corresponding symmetry (2, 1, 6) fixes p.
    """
    c = log_map(p)
    return {
        "coradial": np.abs(c[..., 0]) <= tol,
        "cocircular": np.abs(c[..., 1]) <= tol,
        "parallel": np.abs(c[..., 2]) <= tol,
    }
