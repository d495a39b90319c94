"""Grids, interpolation, and MG1/CSV field files."""

import numpy as np
import pytest

from m2morph import (
    GridSpec,
    MetricParams,
    ScalarField,
    read_mg1,
    sample_field,
    write_csv,
    write_mg1,
)


class TestGridSpec:
    def test_origin_is_a_node(self):
        for n_theta in (8, 41, 101):
            spec = GridSpec(41, 41, n_theta)
            i0, j0, k0 = spec.origin_index
            assert spec.x_axis()[i0] == 0.0
            assert spec.y_axis()[j0] == 0.0
            assert spec.theta_axis()[k0] == 0.0

    def test_spacing(self):
        spec = GridSpec(101, 101, 101)
        assert spec.spacing_x == pytest.approx(6.0 / 100)
        assert spec.spacing_theta == pytest.approx(2 * np.pi / 101)

    def test_theta_axis_covers_circle(self):
        for n in (8, 9, 101):
            axis = GridSpec(5, 5, n).theta_axis()
            assert axis.size == n
            assert np.all(axis >= -np.pi) and np.all(axis < np.pi)
            gaps = np.diff(np.sort(axis))
            np.testing.assert_allclose(gaps, 2 * np.pi / n, rtol=1e-12)

    def test_rejects_even_spatial(self):
        with pytest.raises(ValueError):
            GridSpec(40, 41, 41)
        with pytest.raises(ValueError):
            GridSpec(41, 41, 41, x_max=-1.0)

    def test_points_shape(self):
        spec = GridSpec(5, 7, 9, x_max=2.0)
        pts = spec.points()
        assert pts.shape == (5, 7, 9, 3)
        i0, j0, k0 = spec.origin_index
        np.testing.assert_array_equal(pts[i0, j0, k0], [0, 0, 0])


def _linear_field(spec):
    """theta-independent field, linear in x and y: trilinear-exact."""
    pts = spec.points()
    values = 2.0 * pts[..., 0] - 0.5 * pts[..., 1] + 1.0
    return ScalarField(spec=spec, values=values, w=MetricParams(1, 1, 1))


class TestSampleField:
    def test_node_values_exact(self):
        spec = GridSpec(9, 9, 8)
        rng = np.random.default_rng(40)
        f = ScalarField(spec=spec, values=rng.normal(size=(9, 9, 8)))
        pts = spec.points()
        np.testing.assert_allclose(sample_field(f, pts), f.values, rtol=1e-14)

    def test_midpoint_is_mean(self):
        spec = GridSpec(9, 9, 8)
        f = _linear_field(spec)
        x = spec.x_axis()
        mid = [(x[3] + x[4]) / 2, 0.0, 0.0]
        expected = (f.values[3, 4, 4] + f.values[4, 4, 4]) / 2
        assert sample_field(f, mid) == pytest.approx(expected)

    def test_linear_reproduction(self):
        spec = GridSpec(9, 9, 8)
        f = _linear_field(spec)
        rng = np.random.default_rng(41)
        pts = np.stack(
            [
                rng.uniform(-3, 3, 50),
                rng.uniform(-3, 3, 50),
                rng.uniform(-np.pi, np.pi, 50),
            ],
            axis=-1,
        )
        expected = 2.0 * pts[:, 0] - 0.5 * pts[:, 1] + 1.0
        np.testing.assert_allclose(sample_field(f, pts), expected, atol=1e-12)

    def test_theta_wrap_uses_opposite_ring(self):
        # oracle: unwrapped double-cover interpolation across the seam
        spec = GridSpec(5, 5, 8)
        rng = np.random.default_rng(42)
        f = ScalarField(spec=spec, values=rng.normal(size=(5, 5, 8)))
        axis = spec.theta_axis()
        assert axis[0] == pytest.approx(-np.pi)
        last = axis[-1]
        delta = 0.3 * spec.spacing_theta
        query = last + delta  # between the last ring and the wrapped first ring
        got = sample_field(f, [0.0, 0.0, query])
        w = delta / spec.spacing_theta
        expected = (1 - w) * f.values[2, 2, -1] + w * f.values[2, 2, 0]
        assert got == pytest.approx(expected)

    def test_out_of_domain_errors(self):
        spec = GridSpec(5, 5, 8)
        f = _linear_field(spec)
        with pytest.raises(ValueError):
            sample_field(f, [3.5, 0.0, 0.0])
        # replicate mode clamps instead
        v = sample_field(f, [3.5, 0.0, 0.0], mode="replicate")
        assert v == pytest.approx(sample_field(f, [3.0, 0.0, 0.0]))


class TestFieldFiles:
    def test_mg1_roundtrip(self, tmp_path):
        spec = GridSpec(7, 9, 5, x_max=2.0)
        rng = np.random.default_rng(43)
        f = ScalarField(
            spec=spec,
            values=rng.normal(size=(7, 9, 5)),
            w=MetricParams(1.0, 8.0, 0.5),
            kind="exact",
        )
        path = tmp_path / "field.mg1"
        write_mg1(f, path)
        g = read_mg1(path)
        assert g.spec == spec
        assert g.kind == "exact"
        assert g.w == f.w
        np.testing.assert_array_equal(g.values, f.values)

    def test_mg1_header_is_one_text_line(self, tmp_path):
        spec = GridSpec(3, 3, 4, x_max=1.0)
        f = ScalarField(spec=spec, values=np.zeros((3, 3, 4)))
        path = tmp_path / "f.mg1"
        write_mg1(f, path)
        raw = path.read_bytes()
        header, _, payload = raw.partition(b"\n")
        assert header.startswith(b"MG1 3 3 4")
        assert len(payload) == 3 * 3 * 4 * 8

    def test_mg1_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.mg1"
        path.write_bytes(b"nonsense header\n" + b"\x00" * 64)
        with pytest.raises(ValueError):
            read_mg1(path)

    def test_csv_export(self, tmp_path):
        spec = GridSpec(3, 3, 4, x_max=1.0)
        values = np.arange(36, dtype=float).reshape(3, 3, 4)
        f = ScalarField(spec=spec, values=values)
        path = tmp_path / "f.csv"
        write_csv(f, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,theta,value"
        assert len(lines) == 1 + 36
        # theta fastest: second row is node (0, 0, 1)
        x, y, theta, value = lines[2].split(",")
        assert float(value) == 1.0
        assert float(x) == -1.0

    def test_shape_mismatch_rejected(self):
        spec = GridSpec(3, 3, 4)
        with pytest.raises(ValueError):
            ScalarField(spec=spec, values=np.zeros((3, 3, 5)))
