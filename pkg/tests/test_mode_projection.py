"""Tests for condensate modes, drive profiles and the coefficient report."""

import math

import numpy as np
import pytest

from vortexsim.bec_dynamics import HBAR, RB87_MASS, TrapSpec, kappa_from_trap, rb87_trap
from vortexsim.mode_projection import (
    CondensateModeSpec,
    QuadratureError,
    RabiProfileSpec,
    mode_energy,
    oscillator_length,
    projected_coefficients,
    psi_g,
    psi_v,
    quad3d,
    rabi_profile,
    write_coefficient_report,
)

L_PERP = 2.35e-6
L_Z = 1.4e-6


def spec(ell=2, handedness=+1):
    return CondensateModeSpec(L_perp=L_PERP, L_z=L_Z, ell=ell, handedness=handedness)


def oscillator_trap(omega_perp=132.0):
    """Trap whose transverse size equals the oscillator length."""
    return TrapSpec(
        omega_perp=omega_perp,
        omega_z=HBAR / (RB87_MASS * L_Z**2),
        L_perp=oscillator_length(RB87_MASS, omega_perp),
        L_z=L_Z,
        mass=RB87_MASS,
        a_sc=5e-9,
        N=4476.769441443373,
    )


class TestGroundMode:
    def test_origin_value(self):
        expected = 1.0 / (math.pi**0.75 * L_PERP * math.sqrt(L_Z))
        assert psi_g((0.0, 0.0, 0.0), spec()) == pytest.approx(expected, rel=1e-15)

    def test_even_parity(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x, y = rng.uniform(-3e-6, 3e-6, size=2)
            z = rng.uniform(-2e-6, 2e-6)
            assert psi_g((x, y, z), spec()) == psi_g((-x, -y, -z), spec())

    def test_normalized(self):
        total = quad3d(lambda x, y, z: psi_g((x, y, z), spec()) ** 2, L_PERP, L_Z)
        assert total.real == pytest.approx(1.0, abs=1e-6)

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            CondensateModeSpec(L_perp=0.0, L_z=L_Z, ell=2)
        with pytest.raises(ValueError):
            CondensateModeSpec(L_perp=L_PERP, L_z=L_Z, ell=0)
        with pytest.raises(ValueError):
            CondensateModeSpec(L_perp=L_PERP, L_z=L_Z, ell=2, handedness=0)


class TestVortexModes:
    def test_axis_null(self):
        assert psi_v((0.0, 0.0, 0.5e-6), spec()) == 0j

    @pytest.mark.parametrize("handedness", [+1, -1])
    def test_phase_winding(self, handedness):
        s = spec(handedness=handedness)
        angles = np.linspace(0.0, 2 * math.pi, 48, endpoint=False)
        r = 1.5e-6
        samples = [psi_v((r * math.cos(a), r * math.sin(a), 0.0), s) for a in angles]
        ph = np.unwrap(np.angle(np.array(samples + samples[:1])))
        assert ph[-1] - ph[0] == pytest.approx(handedness * 2 * math.pi * 2, abs=1e-9)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_normalized(self, ell):
        s = spec(ell=ell)
        total = quad3d(lambda x, y, z: np.abs(psi_v((x, y, z), s)) ** 2, L_PERP, L_Z)
        assert total.real == pytest.approx(1.0, abs=1e-6)

    def test_orthogonality(self):
        plus, minus = spec(handedness=+1), spec(handedness=-1)
        overlaps = (
            quad3d(lambda x, y, z: np.conj(psi_v((x, y, z), plus))
                   * psi_g((x, y, z), plus), L_PERP, L_Z),
            quad3d(lambda x, y, z: np.conj(psi_v((x, y, z), minus))
                   * psi_g((x, y, z), minus), L_PERP, L_Z),
            quad3d(lambda x, y, z: np.conj(psi_v((x, y, z), plus))
                   * psi_v((x, y, z), minus), L_PERP, L_Z),
        )
        for ov in overlaps:
            assert abs(ov) <= 1e-8


class TestRabiProfile:
    def profile_spec(self, a_plus=0.6, a_minus=0.8, w=20 * L_PERP, k=0.0):
        return RabiProfileSpec(a_plus=a_plus, a_minus=a_minus, omega0=132.0,
                               w=w, ell=2, k=k)

    def test_axis_null(self):
        assert rabi_profile((0.0, 0.0, 1e-6), self.profile_spec(), +1) == 0j

    def test_branch_ratio_matches_amplitudes(self):
        rspec = self.profile_spec()
        rng = np.random.default_rng(9)
        for _ in range(20):
            x, y = rng.uniform(-3e-6, 3e-6, size=2)
            z = rng.uniform(-2e-6, 2e-6)
            plus = rabi_profile((x, y, z), rspec, +1)
            minus = rabi_profile((x, y, z), rspec, -1)
            assert abs(plus) / abs(minus) == pytest.approx(0.6 / 0.8, rel=1e-12)

    def test_branches_conjugate_up_to_amplitudes_and_axial_phase(self):
        rspec = self.profile_spec(k=8.0e6)
        rng = np.random.default_rng(10)
        for _ in range(20):
            x, y = rng.uniform(-3e-6, 3e-6, size=2)
            z = rng.uniform(-2e-6, 2e-6)
            axial = np.exp(1j * rspec.k * z)
            plus = rabi_profile((x, y, z), rspec, +1) / rspec.a_plus / axial
            minus = rabi_profile((x, y, z), rspec, -1) / rspec.a_minus / axial
            assert plus == pytest.approx(np.conj(minus), rel=1e-12)

    def test_drop_gaussian_limit(self):
        # inside the cloud core the radial envelope is negligible once the
        # waist reaches twenty times the transverse size
        rspec = self.profile_spec(w=20 * L_PERP)
        rng = np.random.default_rng(11)
        for _ in range(50):
            r = rng.uniform(1e-8, 0.5 * L_PERP)
            ang = rng.uniform(0, 2 * math.pi)
            point = (r * math.cos(ang), r * math.sin(ang),
                     rng.uniform(-L_Z, L_Z))
            full = rabi_profile(point, rspec, +1)
            dropped = rabi_profile(point, rspec, +1, drop_gaussian=True)
            assert abs(dropped - full) / abs(full) <= 1e-3

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            RabiProfileSpec(a_plus=1.0, a_minus=1.0, omega0=1.0, w=1.0, ell=2)
        with pytest.raises(ValueError):
            RabiProfileSpec(a_plus=1.0, a_minus=0.0, omega0=1.0, w=0.0, ell=2)
        with pytest.raises(ValueError):
            rabi_profile((0, 0, 0), self.profile_spec(), branch=0)


class TestQuadrature:
    def test_gaussian_volume(self):
        # int exp(-(x^2+y^2)/Lp^2 - z^2/Lz^2) = pi^{3/2} Lp^2 Lz
        val = quad3d(
            lambda x, y, z: np.exp(-(x * x + y * y) / L_PERP**2 - z * z / L_Z**2),
            L_PERP, L_Z, 24,
        )
        assert val.real == pytest.approx(math.pi**1.5 * L_PERP**2 * L_Z, rel=1e-12)

    def test_node_count_bounds(self):
        with pytest.raises(ValueError):
            quad3d(lambda x, y, z: x, L_PERP, L_Z, 1)
        with pytest.raises(ValueError):
            quad3d(lambda x, y, z: x, L_PERP, L_Z, 80)


class TestModeEnergy:
    def test_ground_energy_at_oscillator_sizes(self):
        # isotropic-by-axis oscillator: E_g = hbar(w_perp + w_z/2)
        trap = oscillator_trap()
        energy = mode_energy(
            CondensateModeSpec(trap.L_perp, trap.L_z, 2), trap, "g"
        )
        expected = HBAR * (trap.omega_perp + 0.5 * trap.omega_z)
        assert energy == pytest.approx(expected, rel=1e-12)

    def test_which_validated(self):
        with pytest.raises(ValueError):
            mode_energy(spec(), oscillator_trap(), "x")


class TestCoefficientReport:
    def test_oscillator_offset_reference(self):
        trap = oscillator_trap()
        report = projected_coefficients(
            CondensateModeSpec(trap.L_perp, trap.L_z, 2), trap
        )
        entry = report.entry("vortex_energy_offset")
        assert entry.recomputed == pytest.approx(2.0 * trap.omega_perp, rel=1e-6)
        assert entry.rel_deviation <= 1e-6

    def test_interaction_multiples(self):
        trap = rb87_trap()
        kappa = kappa_from_trap(trap)
        report = projected_coefficients(spec(), trap)
        # naive mode overlaps: 4 kappa for the ground self-term and
        # (2 ell)!/(ell!^2 2^{2 ell}) * 4 kappa = 1.5 kappa for the vortex
        # terms at ell = 2
        assert report.entry("ground_self_interaction").recomputed == pytest.approx(
            4.0 * kappa, rel=1e-9
        )
        assert report.entry("vortex_self_interaction").recomputed == pytest.approx(
            1.5 * kappa, rel=1e-9
        )
        assert report.entry("vortex_cross_interaction").recomputed == pytest.approx(
            1.5 * kappa, rel=1e-9
        )

    def test_ground_self_discrepancy_flagged(self):
        report = projected_coefficients(spec(), rb87_trap())
        flagged = {e.name for e in report.flagged()}
        assert "ground_self_interaction" in flagged
        # the flag is informational: the report call itself succeeded

    def test_coupling_equal_per_branch(self):
        trap = rb87_trap()
        rabi = RabiProfileSpec(a_plus=0.6, a_minus=0.8, omega0=321.0,
                               w=20 * L_PERP, ell=2, k=0.0)
        report = projected_coefficients(spec(), trap, rabi=rabi)
        plus = report.entry("raman_coupling_plus").recomputed
        minus = report.entry("raman_coupling_minus").recomputed
        assert plus == pytest.approx(minus, rel=1e-12)

    def test_default_coupling_calibrated_to_reference(self):
        trap = rb87_trap()
        report = projected_coefficients(spec(), trap)
        entry = report.entry("raman_coupling_plus")
        assert entry.recomputed == pytest.approx(trap.omega_perp, rel=1e-9)
        assert "omega0" in entry.note

    def test_references_absent_for_other_charges(self):
        report = projected_coefficients(spec(ell=3), rb87_trap())
        assert report.entry("ground_self_interaction").reference is None
        assert report.entry("vortex_energy_offset").rel_deviation is None

    def test_grid_convergence(self):
        trap = rb87_trap()
        coarse = projected_coefficients(spec(), trap, n_nodes=20)
        fine = projected_coefficients(spec(), trap, n_nodes=40)
        for e_fine in fine.entries:
            e_coarse = coarse.entry(e_fine.name)
            floor = 1e-9 * abs(e_fine.recomputed)
            assert e_fine.quad_error < 0.1 * e_coarse.quad_error + floor

    def test_nonconvergence_raises(self):
        with pytest.raises(QuadratureError, match="error estimate"):
            projected_coefficients(spec(), rb87_trap(), n_nodes=4)

    def test_report_text(self, tmp_path):
        report = projected_coefficients(spec(), rb87_trap())
        path = tmp_path / "report.txt"
        write_coefficient_report(report, path)
        text = path.read_text()
        assert "vortex_energy_offset" in text
        assert "ground_self_interaction" in text
        assert "flagged" in text
        assert "n_nodes = 40" in text
