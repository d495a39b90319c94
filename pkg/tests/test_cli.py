"""Command-line interface: subcommands, files, exit codes."""

import numpy as np
import pytest

from m2morph import MetricParams, read_mg1
from m2morph.cli import cli_main


def run(*argv):
    return cli_main(list(argv))


class TestUsageErrors:
    def test_no_command(self, capsys):
        assert run() == 2

    def test_unknown_command(self):
        assert run("frobnicate") == 2

    def test_unknown_approx(self):
        assert run("approx", "--approx", "rho-zz", "--out", "x.mg1") == 2

    def test_invalid_metric(self, tmp_path, capsys):
        # w2 < w1 violates the frame convention
        code = run("approx", "--approx", "rho-b", "--w1", "2", "--w2", "1",
                   "--grid", "5", "--out", str(tmp_path / "x.mg1"))
        assert code == 2

    def test_missing_required_flag(self):
        assert run("kernel", "--alpha", "2") == 2


class TestApproxAndKernel:
    def test_approx_writes_field(self, tmp_path):
        out = tmp_path / "rb.mg1"
        assert run("approx", "--approx", "rho-b", "--grid", "11", "--w2", "2",
                   "--out", str(out)) == 0
        f = read_mg1(out)
        assert f.kind == "rho-b"
        assert f.w == MetricParams(1, 2, 1)
        i0, j0, k0 = f.spec.origin_index
        assert f.values[i0, j0, k0] == 0.0

    def test_kernel_writes_field(self, tmp_path):
        out = tmp_path / "k.mg1"
        assert run("kernel", "--approx", "rho-b", "--grid", "11",
                   "--alpha", "2", "--time", "0.5", "--out", str(out)) == 0
        f = read_mg1(out)
        assert f.kind == "kernel-rho-b"
        assert f.values.min() == 0.0


class TestSolveErrorPipeline:
    def test_exact_then_error(self, tmp_path, capsys):
        out = tmp_path / "exact.mg1"
        assert run("exact", "--grid", "41", "--out", str(out)) == 0
        f = read_mg1(out)
        assert f.kind == "exact"
        assert run("error", "--field", str(out), "--approx", "rho-b") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        header = lines[-2]
        row = lines[-1].split(",")
        assert header == "approx,zeta,mean_rel_err,max_rel_err,n_excluded"
        assert row[0] == "rho-b"
        assert float(row[2]) < 0.06  # coarse-grid solver error, zeta = 1

    def test_error_rejects_non_distance_field(self, tmp_path):
        out = tmp_path / "rb.mg1"
        run("approx", "--approx", "rho-b", "--grid", "11", "--out", str(out))
        assert run("error", "--field", str(out)) == 1

    def test_table4_sweep_smoke(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        assert run("table4", "--grid", "21", "--zetas", "1,2",
                   "--out", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("approx,zeta")
        zetas = [float(line.split(",")[1]) for line in lines[1:]]
        assert zetas == [1.0, 2.0]

    def test_subriemannian_solve(self, tmp_path):
        out = tmp_path / "sr.mg1"
        assert run("exact", "--grid", "21", "--w3", "0.5", "--sub",
                   "--out", str(out)) == 0
        assert read_mg1(out).kind == "subriemannian"

    def test_nonconvergence_exit_code(self, tmp_path):
        out = tmp_path / "x.mg1"
        code = run("exact", "--grid", "41", "--w2", "4",
                   "--max-sweeps", "2", "--out", str(out))
        assert code == 1


class TestVerificationCommands:
    def test_bounds_pass(self, tmp_path):
        out = tmp_path / "exact.mg1"
        run("exact", "--grid", "31", "--w2", "2", "--out", str(out))
        assert run("bounds", "--field", str(out)) == 0

    def test_bounds_fail_on_corrupted(self, tmp_path):
        out = tmp_path / "exact.mg1"
        run("exact", "--grid", "31", "--out", str(out))
        f = read_mg1(out)
        i0, j0, k0 = f.spec.origin_index
        f.values[i0 + 5, j0, k0] *= 0.25
        from m2morph import write_mg1

        write_mg1(f, out)
        assert run("bounds", "--field", str(out)) == 1

    def test_symmetries_closed_forms(self, capsys):
        assert run("symmetries", "--approx", "rho-b-com", "--w2", "8",
                   "--w3", "0.5", "--n", "5000") == 0
        assert "PASS" in capsys.readouterr().out

    def test_symmetries_all_kinds(self, capsys):
        assert run("symmetries", "--w2", "4", "--n", "2000") == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 11


class TestMorphologyCommands:
    @pytest.fixture()
    def bump(self, tmp_path):
        from m2morph import GridSpec, ScalarField, write_mg1

        spec = GridSpec(15, 15, 8)
        pts = spec.points()
        values = np.exp(-(pts[..., 0] ** 2 + pts[..., 1] ** 2
                          + pts[..., 2] ** 2))
        path = tmp_path / "bump.mg1"
        write_mg1(ScalarField(spec=spec, values=values), path)
        return path, values

    def test_erode(self, tmp_path, bump):
        path, values = bump
        out = tmp_path / "eroded.mg1"
        assert run("erode", "--in", str(path), "--alpha", "2",
                   "--time", "0.3", "--out", str(out)) == 0
        eroded = read_mg1(out).values
        assert np.all(eroded <= values + 1e-15)
        assert eroded.min() >= values.min() - 1e-15

    def test_dilate(self, tmp_path, bump):
        path, values = bump
        out = tmp_path / "dilated.mg1"
        assert run("dilate", "--in", str(path), "--alpha", "2",
                   "--time", "0.3", "--out", str(out)) == 0
        assert np.all(read_mg1(out).values >= values - 1e-15)

    def test_convect(self, tmp_path, bump):
        path, values = bump
        out = tmp_path / "moved.mg1"
        assert run("convect", "--in", str(path), "--v", "1,0,0",
                   "--time", "0.5", "--out", str(out)) == 0
        moved = read_mg1(out).values
        assert moved.shape == values.shape

    def test_convect_bad_vector(self, tmp_path, bump):
        path, _ = bump
        assert run("convect", "--in", str(path), "--v", "1,zz,0",
                   "--out", str(tmp_path / "x.mg1")) == 2


class TestIso:
    def test_iso_closed_form(self, tmp_path):
        out = tmp_path / "iso.csv"
        assert run("iso", "--approx", "rho-b", "--grid", "41", "--w2", "2",
                   "--level", "1.5", "--slices", "0.0", "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "slice_theta,segment_id,x,y"
        assert len(lines) > 10

    def test_iso_empty_level(self, tmp_path):
        out = tmp_path / "iso.csv"
        assert run("iso", "--approx", "rho-b", "--grid", "21",
                   "--level", "9999", "--slices", "0.0", "--out", str(out)) == 0
        assert out.read_text().splitlines() == ["slice_theta,segment_id,x,y"]

    def test_iso_needs_target(self, tmp_path):
        assert run("iso", "--level", "1.0", "--out", str(tmp_path / "x.csv")) == 2
