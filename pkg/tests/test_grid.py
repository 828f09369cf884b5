import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from caloric import (
    DataError,
    DomainTooSmallError,
    InsufficientResolutionError,
    SpaceTimeField,
    SpatialGrid,
    StripSpec,
    extent_audit,
    field_from_csv,
    field_to_csv,
    gradient,
    integrate_ball,
    integrate_strip_L2,
)
from caloric.grid import ball_measure, time_trapezoid
from caloric.zoo import GaussianKernelSolution, sample_solution

from conftest import constant_field


class TestSpatialGrid:
    def test_points_and_axis(self):
        g = SpatialGrid.make(1, 8.0, 64)
        assert g.points_per_axis == 64
        assert g.axis[0] == -8.0
        assert np.allclose(np.diff(g.axis), g.spacing)
        assert g.axis[-1] == pytest.approx(8.0 - g.spacing)

    def test_invariants_rejected(self):
        with pytest.raises(ValueError, match="dim"):
            SpatialGrid(3, 8.0, 0.1)
        with pytest.raises(ValueError, match="spacing < half_extent/4"):
            SpatialGrid(1, 1.0, 0.3)
        # dx < L/4 forces > 8 points per axis, so a tiny grid trips it too
        with pytest.raises(ValueError, match="spacing"):
            SpatialGrid.make(1, 8.0, 4)

    def test_refine_and_enlarge(self):
        g = SpatialGrid.make(1, 8.0, 64)
        assert g.refined().points_per_axis == 128
        big = g.enlarged(1.5)
        assert big.spacing == g.spacing
        assert big.half_extent == pytest.approx(12.0)


class TestSpaceTimeField:
    def test_validation(self, grid_1d):
        with pytest.raises(DataError, match="strictly increasing"):
            SpaceTimeField(grid_1d, [0.2, 0.1], np.zeros((2, 512)))
        with pytest.raises(DataError, match="> 0"):
            SpaceTimeField(grid_1d, [0.0, 0.1], np.zeros((2, 512)))
        with pytest.raises(DataError, match="finite"):
            SpaceTimeField(grid_1d, [0.1], np.full((1, 512), np.inf))
        with pytest.raises(DataError, match="shape"):
            SpaceTimeField(grid_1d, [0.1], np.zeros((1, 100)))

    def test_slice_interpolation(self, grid_1d):
        u = SpaceTimeField(grid_1d, [1.0, 2.0],
                           np.stack([np.zeros(512), np.ones(512)]))
        np.testing.assert_allclose(u.slice_at(1.5), 0.5)


class TestIntegrateBall:
    def test_constant_interval_measure(self, grid_1d):
        # measure of [-2, 2]
        val = integrate_ball(grid_1d, np.ones(512), (0.0,), 2.0)
        assert val == pytest.approx(4.0, abs=1e-12)

    def test_constant_disk_area(self, grid_2d):
        val = integrate_ball(grid_2d, np.ones(grid_2d.shape), (0.0, 0.0), 1.0)
        assert val == pytest.approx(math.pi, abs=5 * grid_2d.spacing)

    def test_odd_function_vanishes(self, grid_1d):
        val = integrate_ball(grid_1d, grid_1d.axis.copy(), (0.0,), 3.0)
        assert abs(val) < 1e-12

    @given(radius=st.floats(0.5, 5.0), freq=st.floats(0.2, 4.0))
    @settings(max_examples=20, deadline=None)
    def test_odd_symmetry_property(self, radius, freq):
        g = SpatialGrid.make(1, 8.0, 256)
        odd = np.sin(freq * g.axis) ** 3 + 0.5 * g.axis
        assert abs(integrate_ball(g, odd, (0.0,), radius)) < 1e-11

    def test_refinement_second_order(self):
        # smooth integrand: halving dx cuts the error by >= 3x
        exact = 2.0 * math.sin(2.0)  # integral of cos over [-2, 2]
        errs = []
        for n in (128, 256, 512):
            g = SpatialGrid.make(1, 8.0, n)
            errs.append(abs(integrate_ball(g, np.cos(g.axis), (0.0,), 2.0) - exact))
        assert errs[0] / errs[1] >= 3.0
        assert errs[1] / errs[2] >= 3.0

    def test_domain_too_small(self, grid_1d):
        with pytest.raises(DomainTooSmallError):
            integrate_ball(grid_1d, np.ones(512), (0.0,), 9.0)
        with pytest.raises(DomainTooSmallError):
            integrate_ball(grid_1d, np.ones(512), (5.0,), 4.0)

    def test_deterministic_bit_identical(self, grid_1d):
        vals = np.sin(3.0 * grid_1d.axis) + grid_1d.axis**2
        a = integrate_ball(grid_1d, vals, (0.5,), 3.0)
        b = integrate_ball(grid_1d, vals.copy(), (0.5,), 3.0)
        assert a == b


class TestStripL2:
    def test_constant_strip(self, grid_1d):
        u = constant_field(grid_1d, np.linspace(1.0, 2.0, 9))
        val = integrate_strip_L2(u, StripSpec(1.0, 2.0), 1.0)
        assert val == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_eigenmode_closed_form(self):
        # closed form ((e^{-2a} - e^{-2b})/2 * (R - sin R cos R))^{1/2};
        # refined grids stabilize to 4 digits against it
        a, b, R = 1.0, 2.0, 1.0
        exact = math.sqrt((math.exp(-2 * a) - math.exp(-2 * b)) / 2.0
                          * (R - math.sin(R) * math.cos(R)))
        vals = []
        for n, nt in ((512, 33), (1024, 65), (2048, 129)):
            g = SpatialGrid.make(1, 8.0, n)
            times = np.linspace(a, b, nt)
            u = SpaceTimeField(g, times,
                               np.stack([np.exp(-t) * np.sin(g.axis) for t in times]))
            vals.append(integrate_strip_L2(u, StripSpec(a, b), R))
        assert vals[-1] == pytest.approx(exact, rel=1e-4)
        assert abs(vals[-1] - vals[-2]) <= 1e-4 * exact  # 4-digit stability

    def test_heat_kernel_erf_oracle(self):
        # oracle: int_a^b (8 pi t)^{-1/2} erf(R / sqrt(2t)) dt by quadrature
        from scipy.integrate import quad
        from scipy.special import erf

        a, b, R = 1.0, 2.0, 8.0
        oracle_sq, _ = quad(
            lambda t: (8 * math.pi * t) ** -0.5 * erf(R / math.sqrt(2 * t)), a, b)
        g = SpatialGrid.make(1, 12.0, 1024)
        sol = GaussianKernelSolution(1e-9)  # u(t,x) ~ Phi(t,x)
        times = np.linspace(a, b, 25)
        u = sample_solution(sol, g, times)
        val = integrate_strip_L2(u, StripSpec(a, b), R)
        assert val == pytest.approx(math.sqrt(oracle_sq), rel=1e-3)

    def test_insufficient_time_samples(self, grid_1d):
        u = constant_field(grid_1d, [0.9, 1.4, 2.1])
        with pytest.raises(InsufficientResolutionError):
            integrate_strip_L2(u, StripSpec(1.0, 2.0), 1.0)


class TestStripSpec:
    def test_invariant(self):
        with pytest.raises(ValueError, match="0 < a < b"):
            StripSpec(2.0, 1.0)
        with pytest.raises(ValueError, match="0 < a < b"):
            StripSpec(0.0, 1.0)


class TestGradient:
    def test_linear_exact(self, grid_1d):
        g = SpatialGrid(1, 8.0, grid_1d.spacing, "zero_padded")
        out = gradient(g, g.axis.copy())
        np.testing.assert_allclose(out[0][1:-1], 1.0, atol=1e-10)

    def test_constant_zero(self, grid_1d):
        out = gradient(grid_1d, np.full(512, 3.7))
        np.testing.assert_allclose(out[0], 0.0, atol=1e-12)

    def test_second_order_convergence(self):
        errs = []
        for n in (128, 256):
            g = SpatialGrid.make(1, 4 * math.pi, n)
            out = gradient(g, np.sin(g.axis))
            errs.append(np.abs(out[0] - np.cos(g.axis)).max())
        assert errs[0] / errs[1] >= 3.5

    def test_2d_components(self, grid_2d):
        xg, yg = grid_2d.meshgrid()
        out = gradient(grid_2d, np.sin(xg) * np.cos(yg))
        np.testing.assert_allclose(out[0], np.cos(xg) * np.cos(yg), atol=1e-2)
        np.testing.assert_allclose(out[1], -np.sin(xg) * np.sin(yg), atol=1e-2)


class TestTimeTrapezoid:
    def test_linear_exact(self):
        times = np.array([0.5, 1.0, 1.5, 2.0, 3.0])
        g = 2.0 * times
        assert time_trapezoid(times, g, 0.75, 2.5) == pytest.approx(2.5**2 - 0.75**2, rel=1e-12)


class TestExtentAudit:
    def test_localized_quantity_passes(self):
        g = SpatialGrid.make(1, 8.0, 256)
        audit = extent_audit(
            lambda gr: integrate_ball(gr, np.exp(-gr.axis**2), (0.0,), 4.0), g)
        assert audit.passed
        assert audit.rel_change < 1e-3

    def test_growing_quantity_fails(self):
        g = SpatialGrid.make(1, 8.0, 256)
        audit = extent_audit(lambda gr: float(np.exp(gr.half_extent)), g)
        assert not audit.passed


class TestFieldCsv:
    def test_round_trip_1d(self, grid_1d):
        u = constant_field(grid_1d, [0.25, 0.5], value=2.0)
        text = field_to_csv(u)
        assert text.startswith("# grid n=1 L=8 dx=0.03125 mode=periodic")
        back = field_from_csv(text)
        np.testing.assert_array_equal(back.values, u.values)
        np.testing.assert_array_equal(back.times, u.times)

    def test_round_trip_2d(self):
        g = SpatialGrid.make(2, 4.0, 16)
        xg, yg = g.meshgrid()
        u = SpaceTimeField(g, [0.1], (np.sin(xg) * yg)[None, :, :])
        back = field_from_csv(field_to_csv(u))
        np.testing.assert_allclose(back.values, u.values)

    def test_reproducible_bytes(self, grid_1d):
        u = SpaceTimeField(grid_1d, [0.1], np.sin(grid_1d.axis)[None, :])
        assert field_to_csv(u) == field_to_csv(u)


def test_ball_measure_matches_integral(grid_1d):
    assert ball_measure(grid_1d, (0.0,), 2.5) == pytest.approx(5.0, abs=1e-12)
