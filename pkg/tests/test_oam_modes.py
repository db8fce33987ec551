"""Tests for Laguerre-Gaussian mode evaluation and grid sampling."""

import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre

from vortexsim.oam_modes import (
    CylindricalPoint,
    LgModeSpec,
    assoc_laguerre,
    cylindrical_from_xy,
    lg_amplitude,
    loop_phase_winding,
    sample_mode_grid,
    write_grid_csv,
    write_grid_matrix,
)


def lg_norm_quadrature(spec, n_rad=400, n_ang=64):
    """Independent normalization oracle: Gauss-Legendre in rho (cutoff at
    8*w0) times a uniform angular rule, of |LG|^2 rho drho dphi."""
    nodes, weights = np.polynomial.legendre.leggauss(n_rad)
    rmax = 8.0 * spec.w0
    rho = 0.5 * rmax * (nodes + 1.0)
    wr = 0.5 * rmax * weights
    phis = np.linspace(0.0, 2.0 * math.pi, n_ang, endpoint=False)
    dphi = 2.0 * math.pi / n_ang
    total = 0.0
    for r, w in zip(rho, wr):
        for phi in phis:
            amp = lg_amplitude(spec, CylindricalPoint(rho=r, phi=phi))
            total += abs(amp) ** 2 * r * w * dphi
    return total


class TestAssocLaguerre:
    def test_p0_is_one(self):
        assert assoc_laguerre(0, 2, 7.3) == 1.0

    def test_l1_0_at_one(self):
        # L_1^0(x) = 1 - x
        assert assoc_laguerre(1, 0, 1.0) == 0.0

    def test_l2_1_at_zero(self):
        # value at zero is the binomial (|ell|+p)! / (p! |ell|!)
        assert assoc_laguerre(2, 1, 0.0) == 3.0

    def test_binomial_at_zero(self):
        for p in range(7):
            for a in range(7):
                assert assoc_laguerre(p, a, 0.0) == math.comb(a + p, p)

    def test_matches_scipy(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = int(rng.integers(0, 6))
            a = int(rng.integers(0, 6))
            x = float(rng.uniform(-5.0, 15.0))
            ours = assoc_laguerre(p, a, x)
            ref = float(eval_genlaguerre(p, a, x))
            assert ours == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_array_input(self):
        xs = np.linspace(0.0, 4.0, 9)
        vals = assoc_laguerre(1, 0, xs)
        assert np.allclose(vals, 1.0 - xs)

    def test_negative_indices_rejected(self):
        with pytest.raises(ValueError):
            assoc_laguerre(-1, 0, 1.0)
        with pytest.raises(ValueError):
            assoc_laguerre(0, -2, 1.0)


class TestSpecs:
    def test_phi_wrapped(self):
        pt = CylindricalPoint(rho=1.0, phi=-math.pi / 2)
        assert 0.0 <= pt.phi < 2.0 * math.pi
        assert pt.phi == pytest.approx(3.0 * math.pi / 2)

    def test_negative_rho_rejected(self):
        with pytest.raises(ValueError):
            CylindricalPoint(rho=-1e-9, phi=0.0)

    def test_bad_spec_rejected(self):
        with pytest.raises(ValueError):
            LgModeSpec(p=-1, ell=0, w0=1.0)
        with pytest.raises(ValueError):
            LgModeSpec(p=0, ell=0, w0=0.0)
        with pytest.raises(ValueError):
            LgModeSpec(p=10, ell=11, w0=1.0)

    def test_cylindrical_from_xy(self):
        pt = cylindrical_from_xy(0.0, -2.0)
        assert pt.rho == pytest.approx(2.0)
        assert pt.phi == pytest.approx(3.0 * math.pi / 2)


class TestLgAmplitude:
    def test_axis_null_for_nonzero_ell(self):
        spec = LgModeSpec(p=0, ell=2, w0=1.0e-3)
        assert lg_amplitude(spec, CylindricalPoint(rho=0.0, phi=0.3)) == 0j

    def test_helical_phase(self):
        spec = LgModeSpec(p=0, ell=2, w0=1.0e-3)
        a0 = lg_amplitude(spec, CylindricalPoint(rho=0.5e-3, phi=0.0))
        a1 = lg_amplitude(spec, CylindricalPoint(rho=0.5e-3, phi=math.pi / 4))
        dphase = np.angle(a1) - np.angle(a0)
        assert dphase == pytest.approx(math.pi / 2, abs=1e-12)

    @pytest.mark.parametrize("p,ell", [(0, 1), (0, 2), (1, 2)])
    def test_normalized(self, p, ell):
        spec = LgModeSpec(p=p, ell=ell, w0=0.8e-3)
        assert lg_norm_quadrature(spec) == pytest.approx(1.0, abs=1e-6)

    def test_conjugation_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = int(rng.integers(0, 3))
            ell = int(rng.integers(1, 5))
            w0 = float(rng.uniform(0.2e-3, 2e-3))
            pt = CylindricalPoint(rho=float(rng.uniform(0, 4e-3)),
                                  phi=float(rng.uniform(0, 2 * math.pi)))
            plus = lg_amplitude(LgModeSpec(p, ell, w0), pt)
            minus = lg_amplitude(LgModeSpec(p, -ell, w0), pt)
            assert minus == pytest.approx(np.conj(plus), abs=1e-18)


class TestModeGrid:
    def test_gaussian_peak_at_center(self):
        grid = sample_mode_grid(LgModeSpec(p=0, ell=0, w0=1e-3), 2.5e-3, 41)
        dens = np.abs(grid.values) ** 2
        i, j = np.unravel_index(np.argmax(dens), dens.shape)
        assert (i, j) == (20, 20)

    def test_phase_winding_on_loop(self):
        spec = LgModeSpec(p=0, ell=2, w0=1e-3)
        grid = sample_mode_grid(spec, 2.5e-3, 201)
        # collect grid cells along a circle, ordered by angle
        radius = 1.0e-3
        angles = np.linspace(0.0, 2.0 * math.pi, 73, endpoint=False)
        samples = []
        for ang in angles:
            j = int(np.argmin(np.abs(grid.x - radius * math.cos(ang))))
            i = int(np.argmin(np.abs(grid.y - radius * math.sin(ang))))
            samples.append(grid.values[i, j])
        # independent winding count via unwrapped phases
        ph = np.unwrap(np.angle(np.array(samples + samples[:1])))
        assert ph[-1] - ph[0] == pytest.approx(2.0 * math.pi * 2, abs=1e-6)
        # library helper agrees
        assert loop_phase_winding(samples) == pytest.approx(
            2.0 * math.pi * 2, abs=1e-6
        )

    def test_conjugate_grid(self):
        plus = sample_mode_grid(LgModeSpec(p=1, ell=3, w0=1e-3), 2e-3, 33)
        minus = sample_mode_grid(LgModeSpec(p=1, ell=-3, w0=1e-3), 2e-3, 33)
        assert np.allclose(minus.values, np.conj(plus.values), atol=1e-18)

    def test_grid_layout(self):
        spec = LgModeSpec(p=0, ell=1, w0=1e-3)
        grid = sample_mode_grid(spec, 2e-3, 5)
        pt = cylindrical_from_xy(grid.x[3], grid.y[1])
        assert grid.values[1, 3] == pytest.approx(lg_amplitude(spec, pt))

    def test_rejects_bad_grid(self):
        spec = LgModeSpec(p=0, ell=1, w0=1e-3)
        with pytest.raises(ValueError):
            sample_mode_grid(spec, 2e-3, 1)
        with pytest.raises(ValueError):
            sample_mode_grid(spec, 0.0, 16)


class TestGridExport:
    def test_csv_roundtrip_values(self, tmp_path):
        grid = sample_mode_grid(LgModeSpec(p=0, ell=1, w0=1e-3), 1e-3, 4)
        path = tmp_path / "grid.csv"
        write_grid_csv(grid, path)
        lines = path.read_text().splitlines()
        header = [l for l in lines if l.startswith("#")]
        assert any("ell = 1" in l for l in header)
        data = [l for l in lines if not l.startswith("#")][1:]
        assert len(data) == 16
        x, y, re, im, abs2, arg = (float(v) for v in data[5].split(","))
        v = grid.values[1, 1]
        assert (x, y) == (grid.x[1], grid.y[1])
        assert re == v.real and im == v.imag
        assert abs2 == pytest.approx(abs(v) ** 2)
        assert arg == pytest.approx(np.angle(v))

    def test_matrix_export(self, tmp_path):
        grid = sample_mode_grid(LgModeSpec(p=0, ell=0, w0=1e-3), 1e-3, 3)
        path = tmp_path / "grid.txt"
        write_grid_matrix(grid, path, part="abs2")
        rows = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert len(rows) == 3
        got = np.array([[float(v) for v in row.split()] for row in rows])
        assert np.allclose(got, np.abs(grid.values) ** 2)

    def test_matrix_bad_part(self, tmp_path):
        grid = sample_mode_grid(LgModeSpec(p=0, ell=0, w0=1e-3), 1e-3, 3)
        with pytest.raises(ValueError):
            write_grid_matrix(grid, tmp_path / "g.txt", part="phase")
