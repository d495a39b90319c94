"""Metric weights, frame norms, and the global distance bounds."""

import numpy as np
import pytest

from m2morph import (
    MetricParams,
    coordinate_to_frame,
    dual_norm,
    frame_norm,
    intersection_y,
    lower_bound_l,
    rho_b,
    upper_bound_u1,
    upper_bound_u2,
)


def test_metric_params_validation():
    MetricParams(1, 1, 1)
    MetricParams(1, 8, 0.5)
    with pytest.raises(ValueError):
        MetricParams(2, 1, 1)  # swapping would relabel the frame axes
    with pytest.raises(ValueError):
        MetricParams(0, 1, 1)
    with pytest.raises(ValueError):
        MetricParams(1, 1, -2)


def test_zeta():
    assert MetricParams(1, 8, 1).zeta() == 8.0
    assert MetricParams(2, 2, 5).zeta() == 1.0


class TestNorms:
    w = MetricParams(1, 2, 1)

    def test_frame_norm_axes(self):
        assert frame_norm([1, 0, 0], self.w) == 1.0
        assert frame_norm([0, 1, 0], self.w) == 2.0

    def test_frame_norm_mixed(self):
        assert frame_norm([1, 1, 1], MetricParams(1, 2, 3)) == pytest.approx(
            np.sqrt(14)
        )

    def test_dual_norm_axes(self):
        assert dual_norm([1, 0, 0], self.w) == 1.0
        assert dual_norm([0, 1, 0], self.w) == 0.5

    def test_dual_norm_against_brute_force_sup(self):
        # oracle: sup of <v, cov> over random unit-norm tangent vectors
        rng = np.random.default_rng(13)
        w = MetricParams(1.0, 3.0, 0.7)
        cov = np.array([0.8, -1.4, 2.1])
        v = rng.normal(size=(10_000, 3))
        v /= frame_norm(v, w)[:, None]
        sup = np.max(v @ cov)
        assert sup == pytest.approx(dual_norm(cov, w), rel=1e-2)

    def test_cauchy_schwarz_duality(self):
        rng = np.random.default_rng(14)
        w = MetricParams(0.5, 2.5, 1.3)
        v = rng.normal(size=(200, 3))
        cov = rng.normal(size=(200, 3))
        pairing = np.abs(np.sum(v * cov, axis=-1))
        assert np.all(dual_norm(cov, w) * frame_norm(v, w) >= pairing - 1e-12)

    def test_scaling(self):
        v = np.array([0.3, -1.0, 2.0])
        w = MetricParams(1, 2, 1)
        w5 = w.scaled(5.0)
        assert frame_norm(v, w5) == pytest.approx(5 * frame_norm(v, w))
        assert dual_norm(v, w5) == pytest.approx(dual_norm(v, w) / 5)


class TestCoordinateToFrame:
    def test_theta_zero(self):
        out = coordinate_to_frame([0, 0, 0], 1.0, 2.0, 3.0)
        assert out == pytest.approx([1, 2, 3])

    def test_quarter_turn(self):
        out = coordinate_to_frame([0, 0, np.pi / 2], 1.0, 0.0, 0.0)
        assert out == pytest.approx([0, -1, 0], abs=1e-15)

    def test_rotation_roundtrip(self):
        rng = np.random.default_rng(15)
        p = np.array([0.0, 0.0, 1.1])
        dx, dy, dt = rng.normal(size=3)
        a = coordinate_to_frame(p, dx, dy, dt)
        c, s = np.cos(1.1), np.sin(1.1)
        back = (a[0] * c - a[1] * s, a[0] * s + a[1] * c, a[2])
        assert back == pytest.approx((dx, dy, dt))


class TestBounds:
    def test_lower_bound_on_y_axis(self):
        w = MetricParams(1, 2, 1)
        assert lower_bound_l([0, 1.7, 0], w) == pytest.approx(1.7)

    def test_lower_bound_origin_and_arith(self):
        assert lower_bound_l([0, 0, 0], MetricParams(1, 2, 1)) == 0.0
        assert lower_bound_l([1, 1, -np.pi], MetricParams(1, 1, 1)) == pytest.approx(
            np.sqrt(2 + np.pi**2)
        )

    def test_u1_on_y_axis(self):
        assert upper_bound_u1([0, 1, 0], MetricParams(1, 8, 1)) == pytest.approx(8.0)
        assert upper_bound_u1([0, 0, 0], MetricParams(1, 8, 1)) == 0.0

    def test_u1_equals_l_when_isotropic(self):
        rng = np.random.default_rng(16)
        pts = rng.uniform(-3, 3, size=(100, 3))
        w = MetricParams(1.5, 1.5, 0.8)
        np.testing.assert_allclose(
            upper_bound_u1(pts, w), lower_bound_l(pts, w), rtol=1e-14
        )

    def test_u2(self):
        assert upper_bound_u2([0, 0, 0], MetricParams(1, 2, 1)) == pytest.approx(np.pi)
        assert upper_bound_u2([0, 1.5, 0], MetricParams(1, 2, 1)) == pytest.approx(
            1.5 + np.pi
        )
        assert upper_bound_u2([3, 4, 0.3], MetricParams(2, 5, 1)) == pytest.approx(
            10 + np.pi
        )

    def test_sandwich(self):
        rng = np.random.default_rng(17)
        pts = np.stack(
            [
                rng.uniform(-3, 3, 500),
                rng.uniform(-3, 3, 500),
                rng.uniform(-np.pi, np.pi, 500),
            ],
            axis=-1,
        )
        for w in (MetricParams(1, 1, 1), MetricParams(1, 4, 0.5)):
            l = lower_bound_l(pts, w)
            assert np.all(l <= upper_bound_u1(pts, w) + 1e-12)
            assert np.all(l <= upper_bound_u2(pts, w) + 1e-12)

    def test_scaling(self):
        pts = np.array([[0.5, -1.0, 2.0], [2.0, 0.1, -0.3]])
        w = MetricParams(1, 2, 1)
        w3 = w.scaled(3.0)
        for fn in (lower_bound_l, upper_bound_u1, upper_bound_u2):
            np.testing.assert_allclose(fn(pts, w3), 3 * fn(pts, w), rtol=1e-14)


class TestIntersectionY:
    def test_direct(self):
        assert intersection_y(MetricParams(1, 2, 1)) == pytest.approx(np.pi)

    def test_isotropic_unbounded(self):
        assert intersection_y(MetricParams(1, 1, 1)) == np.inf

    def test_high_anisotropy(self):
        w = MetricParams(1, 8, 1)
        y_star = intersection_y(w)
        assert y_star == pytest.approx(np.pi / 7)
        # just above the intersection the half-angle estimate exceeds u2
        y = y_star * 1.05
        assert rho_b([0, y, 0], w) > upper_bound_u2([0, y, 0], w)
        y = y_star * 0.95
        assert rho_b([0, y, 0], w) < upper_bound_u2([0, y, 0], w)
