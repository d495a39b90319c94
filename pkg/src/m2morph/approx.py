"""
Closed-form approximations of the exact left-invariant distance d(p0, .)
on M2, and the morphological kernels built from them.

Riemannian approximations evaluate the metric norm on either the log
coordinates c^i (rho_c) or the half-angle coordinates b^i (rho_b).  They are
accurate for low spatial anisotropy zeta but overestimate sideways motion
when zeta >> 1, where the geometry is effectively sub-Riemannian.  The
sub-Riemannian approximations price sideways displacement |c2| by a
square-root term; the older variants use a coefficient (nu w1^2 w3^2)^(1/4)
that collapses as w3 -> 0, the newer one uses nu (w1 + w3), which stays
bounded below by nu w1.  The combined approximation

    rho_com = max(l, min(rho_sr, rho))

switches automatically between the regimes and is clamped from below by the
exact lower bound l.

The morphological kernel of a distance rho is k(p) = (t/beta) (rho(p)/t)^beta
with 1/alpha + 1/beta = 1; infimal convolution with it solves the erosion
PDE of order alpha (see the morphology module).

Every function takes point(s) of shape (..., 3) and is vectorised.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .group import half_angle, log_map, sinc
from .metric import MetricParams, lower_bound_l, upper_bound_u1, upper_bound_u2

__all__ = [
    "ApproxKind",
    "EXACT_FIELD",
    "KernelParams",
    "NU_NEW_DEFAULT",
    "NU_OLD_DEFAULT",
    "approx_distance",
    "dual_norm_grad_rho_b",
    "kernel_profile",
    "local_error_epsilon",
    "morph_kernel",
    "rho_b",
    "rho_c",
    "rho_com",
    "rho_sr_new",
    "rho_sr_old",
    "tolerance_region_radius",
]

# Empirical defaults: nu ~ 1.6 for the new sub-Riemannian estimate (tight for
# 0 < nu < 2 sqrt(2)), nu ~ 44 for the older variants.
NU_NEW_DEFAULT = 1.6
NU_OLD_DEFAULT = 44.0

NU_MAX_NEW = 2.0 * np.sqrt(2.0)


class ApproxKind(enum.Enum):
    """Selector for the closed-form distance approximations and bounds."""

    RHO_C = "rho-c"
    RHO_B = "rho-b"
    RHO_C_SR = "rho-c-sr"
    RHO_B_SR = "rho-b-sr"
    RHO_B_SR_OLD1 = "rho-b-sr-old1"
    RHO_B_SR_OLD2 = "rho-b-sr-old2"
    RHO_C_COM = "rho-c-com"
    RHO_B_COM = "rho-b-com"
    L = "l"
    U1 = "u1"
    U2 = "u2"

    @property
    def needs_nu(self) -> bool:
        return self in _SR_KINDS

    @property
    def default_nu(self) -> float | None:
        if self in (ApproxKind.RHO_B_SR_OLD1, ApproxKind.RHO_B_SR_OLD2):
            return NU_OLD_DEFAULT
        if self in _SR_KINDS:
            return NU_NEW_DEFAULT
        return None


_SR_KINDS = frozenset(
    {
        ApproxKind.RHO_C_SR,
        ApproxKind.RHO_B_SR,
        ApproxKind.RHO_B_SR_OLD1,
        ApproxKind.RHO_B_SR_OLD2,
        ApproxKind.RHO_C_COM,
        ApproxKind.RHO_B_COM,
    }
)


class _ExactField:
    """Sentinel kernel source: interpolate a solved exact-distance grid."""

    def __repr__(self):
        return "EXACT_FIELD"


EXACT_FIELD = _ExactField()


def _coords(p, which: str):
    return half_angle(p) if which == "b" else log_map(p)


def _weighted_norm(c, w: MetricParams):
    return np.sqrt(
        (w.w1 * c[..., 0]) ** 2 + (w.w2 * c[..., 1]) ** 2 + (w.w3 * c[..., 2]) ** 2
    )


def rho_c(p, w: MetricParams):
    """Log-coordinate approximation sqrt((w1 c1)^2 + (w2 c2)^2 + (w3 c3)^2).

    The metric length of the exponential curve from the reference point to p.
    Satisfies sinc(theta/2) rho_c <= rho_b <= rho_c.
    """
    return _weighted_norm(log_map(p), w)


def rho_b(p, w: MetricParams):
    """Half-angle approximation sqrt((w1 b1)^2 + (w2 b2)^2 + (w3 b3)^2).

    Sandwiched by the global bounds, l <= rho_b <= u1, hence exact when
    zeta = 1.
    """
    return _weighted_norm(half_angle(p), w)


def rho_sr_old(p, w: MetricParams, nu: float = NU_OLD_DEFAULT, variant: int = 2,
               coords: str = "c"):
    """Older sub-Riemannian approximations (two smoothing variants).

    variant 1: sqrt(sqrt(nu w1^2 w3^2) |c2| + (w1 c1)^2 + (w3 c3)^2)
    variant 2: ((nu w1^2 w3^2) |c2|^2 + ((w1 c1)^2 + (w3 c3)^2)^2)^(1/4)

    ``coords="b"`` substitutes the half-angle coordinates.  Both variants
    break down as w3 -> 0: the |c2| coefficient vanishes and sideways motion
    becomes free, which the exact distance never allows.
    """
    if variant not in (1, 2):
        raise ValueError(f"variant must be 1 or 2, got {variant}")
    c = _coords(p, coords)
    main = (w.w1 * c[..., 0]) ** 2 + (w.w3 * c[..., 2]) ** 2
    lateral = np.abs(c[..., 1])
    coeff = nu * w.w1**2 * w.w3**2
    if variant == 1:
        return np.sqrt(np.sqrt(coeff) * lateral + main)
    return (coeff * lateral**2 + main**2) ** 0.25


def rho_sr_new(p, w: MetricParams, nu: float = NU_NEW_DEFAULT, coords: str = "c"):
    """New sub-Riemannian approximation.

    ((nu (w1 + w3))^4 |c2|^2 + ((w1 c1)^2 + (w3 c3)^2)^2)^(1/4)

    Derived from the Zassenhaus formula: sideways displacement is realised by
    commutating forward and angular motion, at cost ~ nu (w1 + w3) sqrt(|c2|).
    Stays bounded below as w3 -> 0, unlike the older variants.
    """
    c = _coords(p, coords)
    main = (w.w1 * c[..., 0]) ** 2 + (w.w3 * c[..., 2]) ** 2
    lateral2 = c[..., 1] ** 2
    return ((nu * (w.w1 + w.w3)) ** 4 * lateral2 + main**2) ** 0.25


def rho_com(p, w: MetricParams, nu: float = NU_NEW_DEFAULT, coords: str = "b"):
    """Combined approximation max(l, min(rho_sr, rho)).

    Uses the Riemannian estimate near the reference point, the sub-Riemannian
    one at moderate range, and never drops below the exact lower bound l.
    Defaults to half-angle coordinates, the variant that performs best.
    """
    riem = rho_b(p, w) if coords == "b" else rho_c(p, w)
    sr = rho_sr_new(p, w, nu=nu, coords=coords)
    return np.maximum(lower_bound_l(p, w), np.minimum(sr, riem))


def approx_distance(kind: ApproxKind, p, w: MetricParams, nu: float | None = None):
    """Evaluate the selected approximation/bound at point(s) p."""
    if nu is None:
        nu = kind.default_nu
    if kind is ApproxKind.RHO_C:
        return rho_c(p, w)
    if kind is ApproxKind.RHO_B:
        return rho_b(p, w)
    if kind is ApproxKind.RHO_C_SR:
        return rho_sr_new(p, w, nu=nu, coords="c")
    if kind is ApproxKind.RHO_B_SR:
        return rho_sr_new(p, w, nu=nu, coords="b")
    if kind is ApproxKind.RHO_B_SR_OLD1:
        return rho_sr_old(p, w, nu=nu, variant=1, coords="b")
    if kind is ApproxKind.RHO_B_SR_OLD2:
        return rho_sr_old(p, w, nu=nu, variant=2, coords="b")
    if kind is ApproxKind.RHO_C_COM:
        return rho_com(p, w, nu=nu, coords="c")
    if kind is ApproxKind.RHO_B_COM:
        return rho_com(p, w, nu=nu, coords="b")
    if kind is ApproxKind.L:
        return lower_bound_l(p, w)
    if kind is ApproxKind.U1:
        return upper_bound_u1(p, w)
    if kind is ApproxKind.U2:
        return upper_bound_u2(p, w)
    raise ValueError(f"unknown approximation kind {kind!r}")


@dataclass(frozen=True)
class KernelParams:
    """Morphological kernel parameters: softness alpha > 1 and time t > 0."""

    alpha: float
    t: float

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError(f"alpha must be > 1, got {self.alpha}")
        if not self.t > 0.0:
            raise ValueError(f"t must be > 0, got {self.t}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "t", float(self.t))

    @property
    def beta(self) -> float:
        """Conjugate exponent, 1/alpha + 1/beta = 1."""
        return self.alpha / (self.alpha - 1.0)


def kernel_profile(rho, kp: KernelParams):
    """Kernel value (t/beta) (rho/t)^beta for given distance value(s)."""
    rho = np.asarray(rho, dtype=float)
    return (kp.t / kp.beta) * (rho / kp.t) ** kp.beta


def morph_kernel(p, w: MetricParams, kp: KernelParams, kind, nu: float | None = None,
                 field=None):
    """Morphological kernel (t/beta) (rho(p)/t)^beta for the selected distance.

    ``kind`` is an ApproxKind, or EXACT_FIELD together with a solved
    exact-distance grid passed as ``field`` (sampled by interpolation).
    """
    if kind is EXACT_FIELD or isinstance(kind, _ExactField):
        if field is None:
            raise ValueError("EXACT_FIELD kernel requires a solved distance field")
        from .grid import sample_field

        rho = sample_field(field, p)
    else:
        rho = approx_distance(kind, p, w, nu=nu)
    return kernel_profile(rho, kp)


def local_error_epsilon(p, w: MetricParams):
    """Leading term (zeta^2 - 1) zeta^4 rho_b^2 / (2 w3^2) of the local error.

    Controls the relative kernel error near the reference point,
    k_b <= (1 + eps)^(beta/2) k; the cubic angular remainder is not evaluated.
    Zero everywhere when zeta = 1.
    """
    zeta = w.zeta()
    return (zeta**2 - 1.0) * zeta**4 * rho_b(p, w) ** 2 / (2.0 * w.w3**2)


def tolerance_region_radius(w: MetricParams, eps_tol: float) -> float:
    """rho_b radius of the region where the local error stays below eps_tol.

    Equals 2 w3^2 eps_tol / ((zeta^2 - 1) zeta^4); unbounded (inf) when
    zeta = 1.  Shrinks as w3 -> 0 or zeta -> inf, which is what forces the
    combined approximation in those regimes.
    """
    if not eps_tol > 0.0:
        raise ValueError(f"eps_tol must be positive, got {eps_tol}")
    zeta = w.zeta()
    if zeta == 1.0:
        return float("inf")
    return 2.0 * w.w3**2 * eps_tol / ((zeta**2 - 1.0) * zeta**4)


_FD_STEP = 1e-5
_RHO_MIN_FOR_GRAD = 1e-6


def dual_norm_grad_rho_b(p, w: MetricParams, h: float = _FD_STEP):
    """Dual norm of the differential of rho_b at point(s) p.

    Central finite differences of rho_b along the frame directions A1, A2,
    A3, combined as sqrt(sum_i (A_i rho_b / w_i)^2).  Equals 1 wherever
    rho_b agrees with the exact distance (eikonal equation), e.g. everywhere
    for zeta = 1.  Rejects points too close to the reference point, where
    rho_b is not differentiable.
    """
    p = np.asarray(p, dtype=float)
    base = rho_b(p, w)
    if np.any(base < _RHO_MIN_FOR_GRAD):
        raise ValueError("rho_b gradient requested too close to the reference point")
    c, s = np.cos(p[..., 2]), np.sin(p[..., 2])
    zero = np.zeros_like(c)
    one = np.ones_like(c)
    dirs = (
        np.stack([c, s, zero], axis=-1),      # A1
        np.stack([-s, c, zero], axis=-1),     # A2
        np.stack([zero, zero, one], axis=-1), # A3
    )
    weights = (w.w1, w.w2, w.w3)
    total = np.zeros_like(base)
    for direction, wi in zip(dirs, weights):
        deriv = (rho_b(p + h * direction, w) - rho_b(p - h * direction, w)) / (2.0 * h)
        total = total + (deriv / wi) ** 2
    return np.sqrt(total)
