import math

import numpy as np
import pytest
from scipy.special import j0, k0

from repeaterscope.coupling import (
    GaussianBeam,
    ModeSolution,
    StepIndexFiber,
    effective_coupling,
    facet_transmission,
    fiber_mode,
    fresnel_transmission,
    mode_field,
    near_cutoff_smf,
    normalized_frequency,
    optimize_waist,
    overlap_eta,
    smf28_like,
    solve_characteristic,
    tilted_eta,
)

FIBER = near_cutoff_smf(1550.0)
MODE = fiber_mode(FIBER, 1550.0)


class TestNormalizedFrequency:
    def test_inversion(self):
        na = 0.12
        wavelength = 1310.0
        a = 2.405 * (wavelength * 1e-3) / (2 * math.pi * na)
        fiber = StepIndexFiber(a, 1.45, math.sqrt(1.45**2 - na**2))
        with pytest.warns(UserWarning):
            v = normalized_frequency(fiber, wavelength)
        assert v == pytest.approx(2.405, rel=1e-12)

    def test_smf28_value(self):
        assert normalized_frequency(smf28_like(), 1550.0) == pytest.approx(
            1.9445, abs=1e-3
        )

    def test_wavelength_scaling(self):
        fiber = smf28_like()
        assert normalized_frequency(fiber, 3100.0) == pytest.approx(
            normalized_frequency(fiber, 1550.0) / 2.0, rel=1e-12
        )


class TestCharacteristicEquation:
    def test_near_cutoff_root(self):
        mode = solve_characteristic(2.405)
        assert mode.u == pytest.approx(1.645, abs=5e-3)
        assert mode.w == pytest.approx(1.754, abs=5e-3)

    def test_pythagorean_identity(self):
        for v in (0.9, 1.4, 2.0, 2.405):
            mode = solve_characteristic(v)
            assert mode.u**2 + mode.w**2 == pytest.approx(v**2, abs=1e-9)

    def test_cutoff_limit_w_vanishes(self):
        mode = solve_characteristic(0.4)
        assert mode.w < 0.05

    def test_matches_fine_grid_sign_scan(self):
        # independent dense scan for the bracketing sign change
        from scipy.special import j1, k1

        v = 2.0
        mode = solve_characteristic(v)
        us = np.linspace(1e-6, v * (1 - 1e-9), 2_000_001)
        ws = np.sqrt(v * v - us * us)
        vals = us * j1(us) / j0(us) - ws * k1(ws) / k0(ws)
        idx = np.nonzero(np.diff(np.sign(vals)) != 0)[0][0]
        assert abs(mode.u - us[idx]) < 1e-6

    def test_invalid_v(self):
        with pytest.raises(ValueError):
            solve_characteristic(0.0)

    def test_mode_invariant_enforced(self):
        with pytest.raises(ValueError):
            ModeSolution(v=2.0, u=1.0, w=1.0)


class TestModeField:
    def test_center_value(self):
        assert mode_field(0.0, FIBER, MODE) == pytest.approx(1.0)

    def test_continuity_at_core_edge(self):
        a = FIBER.core_radius_um
        inner = mode_field(a, FIBER, MODE)
        outer = mode_field(a * (1 + 1e-13), FIBER, MODE)
        assert inner == pytest.approx(outer, abs=1e-12)
        assert inner == pytest.approx(float(j0(MODE.u)), abs=1e-12)

    def test_cladding_matches_bessel_reference(self):
        a = FIBER.core_radius_um
        expected = float(j0(MODE.u) / k0(MODE.w) * k0(2.0 * MODE.w))
        assert mode_field(2.0 * a, FIBER, MODE) == pytest.approx(expected, abs=1e-10)

    def test_monotone_decay_outside_core(self):
        a = FIBER.core_radius_um
        radii = np.linspace(a, 4 * a, 50)
        vals = [mode_field(float(r), FIBER, MODE) for r in radii]
        assert all(hi >= lo - 1e-12 for hi, lo in zip(vals, vals[1:]))


class TestOverlap:
    def test_optimum_matches_published_numbers(self):
        mode = solve_characteristic(2.405)
        fiber = StepIndexFiber(5.0, 1.45, 1.449, ar_coated=True)
        w_opt, eta_opt = optimize_waist(fiber, mode)
        assert eta_opt == pytest.approx(0.997, abs=2e-3)
        assert w_opt / fiber.core_radius_um == pytest.approx(1.09, abs=0.02)

    def test_vanishing_waist(self):
        eta = overlap_eta(GaussianBeam(1e-3, 1550.0), FIBER, MODE)
        assert eta < 1e-4

    def test_unimodal_around_optimum(self):
        w_opt, eta_opt = optimize_waist(FIBER, MODE)
        for factor in (0.5, 2.0):
            eta = overlap_eta(GaussianBeam(w_opt * factor, 1550.0), FIBER, MODE)
            assert eta < eta_opt

    def test_scale_invariance(self):
        mode = solve_characteristic(2.2)
        small = StepIndexFiber(3.0, 1.45, 1.449)
        large = StepIndexFiber(9.0, 1.45, 1.449)
        w_s, eta_s = optimize_waist(small, mode)
        w_l, eta_l = optimize_waist(large, mode)
        assert w_l / large.core_radius_um == pytest.approx(
            w_s / small.core_radius_um, rel=1e-4
        )
        assert eta_l == pytest.approx(eta_s, abs=1e-6)

    def test_grid_scan_agrees(self):
        mode = solve_characteristic(2.0)
        fiber = StepIndexFiber(4.0, 1.45, 1.449)
        w_opt, eta_opt = optimize_waist(fiber, mode)
        from repeaterscope.coupling import _overlap_from_waist

        grid = np.linspace(0.2 * 4.0, 5 * 4.0, 3000)
        etas = [_overlap_from_waist(float(w), fiber, mode) for w in grid]
        best = int(np.argmax(etas))
        assert abs(grid[best] - w_opt) < 1e-2
        assert etas[best] == pytest.approx(eta_opt, abs=1e-4)

    def test_bounded_by_one(self):
        for w in (1.0, 5.0, 8.0, 20.0):
            assert 0.0 <= overlap_eta(GaussianBeam(w, 1550.0), FIBER, MODE) <= 1.0


class TestTilt:
    def test_zero_tilt_equals_overlap(self):
        beam = GaussianBeam(8.0, 1550.0)
        assert tilted_eta(beam, FIBER, MODE, 0.0) == pytest.approx(
            overlap_eta(beam, FIBER, MODE), abs=1e-12
        )

    def test_symmetric_in_angle(self):
        beam = GaussianBeam(8.0, 1550.0)
        assert tilted_eta(beam, FIBER, MODE, 0.02) == pytest.approx(
            tilted_eta(beam, FIBER, MODE, -0.02), abs=1e-12
        )

    def test_monotone_decay_over_tolerance_range(self):
        w_opt, _ = optimize_waist(FIBER, MODE)
        beam = GaussianBeam(w_opt, 1550.0)
        angles = np.linspace(0.0, 0.1, 21)
        etas = [tilted_eta(beam, FIBER, MODE, float(t)) for t in angles]
        assert all(hi >= lo - 1e-12 for hi, lo in zip(etas, etas[1:]))

    def test_large_angle_rejected(self):
        with pytest.raises(ValueError):
            tilted_eta(GaussianBeam(8.0, 1550.0), FIBER, MODE, 0.6)


class TestFresnel:
    def test_matched_indices(self):
        assert fresnel_transmission(1.45, 1.45) == 1.0

    def test_air_silica(self):
        assert fresnel_transmission(1.0, 1.45) == pytest.approx(0.966264, abs=1e-6)

    def test_ar_coating_overrides(self):
        coated = near_cutoff_smf(1550.0, ar_coated=True)
        bare = near_cutoff_smf(1550.0, ar_coated=False)
        assert facet_transmission(coated) == 1.0
        assert facet_transmission(bare) == pytest.approx(0.966264, abs=1e-6)


class TestEffectiveCoupling:
    def test_hcf_constants(self):
        assert effective_coupling("HCF", 0.025) == 0.79
        assert effective_coupling("HCF", 0.0) == 0.98

    def test_smf_at_design_tolerance(self):
        eta = effective_coupling(FIBER, 0.025, 1550.0)
        assert eta == pytest.approx(0.83, abs=0.05)

    def test_zero_tolerance_is_peak_times_facet(self):
        bare = near_cutoff_smf(1550.0, ar_coated=False)
        mode = fiber_mode(bare, 1550.0)
        _, eta_opt = optimize_waist(bare, mode)
        expected = eta_opt * facet_transmission(bare)
        assert effective_coupling(bare, 0.0, 1550.0) == pytest.approx(
            expected, abs=1e-9
        )
