"""Mode-solver tests: dispersion-relation oracles and profile integrals."""

import math

import numpy as np
import pytest
from scipy.special import j0, j1, k0, k1

from pillarkit.errors import InputDomainError, SolverFailureError
from pillarkit.pillar_mode import (
    J0_FIRST_ZERO,
    GuidedMode,
    PillarGeometry,
    dispersion_mismatch,
    effective_mode_volume,
    far_field_divergence,
    solve_fundamental_mode,
)

GAAS = dict(core_index=3.5, cladding_index=1.0, wavelength_nm=950.0)


def geometry(d_um):
    return PillarGeometry(diameter_um=d_um, **GAAS)


def brute_force_root(v_number, samples=400_001):
    """Dense sign-change scan plus local bisection; independent oracle."""
    lo = 1e-6
    hi = min(v_number, J0_FIRST_ZERO) - 1e-6
    grid = np.linspace(lo, hi, samples)
    values = [dispersion_mismatch(float(u), v_number) for u in grid]
    for i in range(samples - 1):
        if values[i] < 0.0 <= values[i + 1]:
            a, b = float(grid[i]), float(grid[i + 1])
            for _ in range(100):
                mid = 0.5 * (a + b)
                if dispersion_mismatch(mid, v_number) < 0.0:
                    a = mid
                else:
                    b = mid
            return 0.5 * (a + b)
    raise AssertionError("oracle found no sign change")


def closed_form_area_um2(mode):
    """Bessel-identity closed form for the LP01 effective area."""
    a = mode.diameter_um / 2.0
    u, w = mode.u, mode.w
    core = j0(u) ** 2 + j1(u) ** 2
    clad = j0(u) ** 2 * ((k1(w) / k0(w)) ** 2 - 1.0)
    return math.pi * a * a * (core + clad)


class TestDispersionSolution:
    def test_large_pillar_approaches_first_j0_zero(self):
        mode = solve_fundamental_mode(geometry(20.0))
        assert abs(mode.u - J0_FIRST_ZERO) / J0_FIRST_ZERO < 0.01
        assert mode.sidewall_overlap < 1e-6

    def test_small_pillar_still_converges(self):
        mode = solve_fundamental_mode(geometry(0.1))
        assert mode.w < 0.5
        assert mode.confinement_factor < 0.5
        assert 0.0 < mode.surface_intensity < 1.0

    def test_one_micron_pillar_matches_brute_force_scan(self):
        mode = solve_fundamental_mode(geometry(1.0))
        u_oracle = brute_force_root(mode.v_number)
        assert mode.u == pytest.approx(u_oracle, abs=1e-8)
        assert mode.w == pytest.approx(
            math.sqrt(mode.v_number**2 - u_oracle**2), abs=1e-8
        )

    def test_residual_below_threshold_across_diameters(self):
        for d in np.geomspace(0.3, 10.0, 50):
            mode = solve_fundamental_mode(geometry(float(d)))
            assert abs(dispersion_mismatch(mode.u, mode.v_number)) < 1e-8

    def test_vanishing_v_number_fails_loudly(self):
        with pytest.raises(SolverFailureError):
            solve_fundamental_mode(geometry(0.02))

    def test_parameter_identity_and_index_bounds(self):
        mode = solve_fundamental_mode(geometry(1.7))
        assert mode.u**2 + mode.w**2 == pytest.approx(mode.v_number**2, rel=1e-12)
        assert 1.0 < mode.effective_index < 3.5


class TestModeProfile:
    def test_surface_intensity_is_j0_squared(self):
        mode = solve_fundamental_mode(geometry(1.0))
        assert mode.surface_intensity == pytest.approx(j0(mode.u) ** 2, rel=1e-12)

    def test_surface_intensity_strictly_decreasing_in_diameter(self):
        grid = np.geomspace(0.3, 10.0, 50)
        values = [solve_fundamental_mode(geometry(float(d))).surface_intensity for d in grid]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_effective_area_monotone_beyond_one_micron(self):
        grid = np.linspace(1.0, 10.0, 19)
        areas = [solve_fundamental_mode(geometry(float(d))).effective_area_um2 for d in grid]
        assert all(b > a for a, b in zip(areas, areas[1:]))

    def test_effective_area_tracks_core_area_at_large_diameter(self):
        mode = solve_fundamental_mode(geometry(10.0))
        core_area = math.pi * 25.0
        assert 0.1 < mode.effective_area_um2 / core_area < 1.0

    def test_area_matches_bessel_identity_closed_form(self):
        for d in (0.4, 1.0, 3.0):
            mode = solve_fundamental_mode(geometry(d))
            assert mode.effective_area_um2 == pytest.approx(
                closed_form_area_um2(mode), rel=1e-3
            )

    def test_radial_integral_grid_convergence(self):
        coarse = solve_fundamental_mode(geometry(1.0), n_grid=2048)
        fine = solve_fundamental_mode(geometry(1.0), n_grid=4096)
        rel = abs(fine.effective_area_um2 - coarse.effective_area_um2)
        assert rel / fine.effective_area_um2 < 1e-3

    def test_confinement_rises_with_diameter(self):
        small = solve_fundamental_mode(geometry(0.3))
        large = solve_fundamental_mode(geometry(5.0))
        assert small.confinement_factor < large.confinement_factor
        assert large.confinement_factor > 0.9


class TestModeVolume:
    def test_product_definition(self):
        mode = solve_fundamental_mode(geometry(1.0))
        scaled = _with_area(mode, 0.5)
        volume = effective_mode_volume(scaled, 600.0)
        assert volume.volume_um3 == pytest.approx(0.3, rel=1e-12)

    def test_linearity_in_area(self):
        mode = solve_fundamental_mode(geometry(1.0))
        doubled = _with_area(mode, 2.0 * mode.effective_area_um2)
        v1 = effective_mode_volume(mode, 500.0)
        v2 = effective_mode_volume(doubled, 500.0)
        assert v2.volume_um3 == pytest.approx(2.0 * v1.volume_um3, rel=1e-12)
        assert v2.volume_lam_n3 == pytest.approx(2.0 * v1.volume_lam_n3, rel=1e-12)

    def test_unit_conversion(self):
        mode = solve_fundamental_mode(geometry(1.0))
        volume = effective_mode_volume(mode, 500.0)
        lam_over_n = 0.950 / 3.5
        assert volume.volume_lam_n3 == pytest.approx(
            volume.volume_um3 / lam_over_n**3, rel=1e-12
        )

    def test_nonpositive_length_rejected(self):
        mode = solve_fundamental_mode(geometry(1.0))
        with pytest.raises(InputDomainError):
            effective_mode_volume(mode, 0.0)


class TestFarField:
    def test_one_micron_divergence_near_twelve_degrees(self):
        geom = geometry(1.0)
        mode = solve_fundamental_mode(geom)
        assert far_field_divergence(mode, geom) == pytest.approx(12.0, abs=4.0)

    def test_divergence_shrinks_monotonically_with_diameter(self):
        thetas = []
        for d in (1.0, 2.0, 5.0, 10.0, 20.0):
            geom = geometry(d)
            thetas.append(far_field_divergence(solve_fundamental_mode(geom), geom))
        assert all(b < a for a, b in zip(thetas, thetas[1:]))
        assert thetas[-1] < 1.0

    def test_half_wavelength_halves_sine_at_fixed_radius(self):
        geom = geometry(1.0)
        mode = solve_fundamental_mode(geom)
        half = PillarGeometry(1.0, 3.5, 1.0, 475.0)
        s_full = math.sin(math.radians(far_field_divergence(mode, geom)))
        s_half = math.sin(math.radians(far_field_divergence(mode, half)))
        assert s_half == pytest.approx(0.5 * s_full, rel=1e-12)


class TestGeometryValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(diameter_um=0.0, core_index=3.5, cladding_index=1.0, wavelength_nm=950.0),
            dict(diameter_um=1.0, core_index=1.0, cladding_index=1.0, wavelength_nm=950.0),
            dict(diameter_um=1.0, core_index=3.5, cladding_index=0.8, wavelength_nm=950.0),
            dict(diameter_um=1.0, core_index=3.5, cladding_index=1.0, wavelength_nm=0.0),
        ],
    )
    def test_invalid_geometry_rejected(self, kwargs):
        with pytest.raises(InputDomainError):
            PillarGeometry(**kwargs)

    def test_mode_invariants_enforced(self):
        mode = solve_fundamental_mode(geometry(1.0))
        from dataclasses import replace

        with pytest.raises(InputDomainError):
            replace(mode, surface_intensity=1.5)
        with pytest.raises(InputDomainError):
            replace(mode, w=mode.w * 2.0)


def _with_area(mode: GuidedMode, area_um2: float) -> GuidedMode:
    from dataclasses import replace

    return replace(mode, effective_area_um2=area_um2)
