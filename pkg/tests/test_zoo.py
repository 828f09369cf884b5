import math

import numpy as np
import pytest
from scipy.integrate import quad

from caloric import (
    CaloricPolynomial,
    DiracDatum,
    Eigenmode,
    ErfFront,
    ExponentialSolution,
    GaussianKernelSolution,
    HeatOperatorConfig,
    OscillatorDatum,
    ResidualProbeRegion,
    SchwartzGaussPolyDatum,
    SignDatum,
    SpatialGrid,
    TychonoffSolution,
    datum_from_id,
    eval_solution,
    heat_evolve,
    heat_residual,
    solution_from_id,
    tychonoff_eval,
)
from caloric.probes import hermite_probe
from caloric.zoo import exact_pairing


class TestEvalSolution:
    def test_caloric_polynomial_value(self):
        # v_2 = x^2 + 2t, so v_2(1, 0) = 2
        assert eval_solution(CaloricPolynomial(2), 1.0, np.array(0.0)) == pytest.approx(2.0)

    def test_caloric_polynomial_4(self):
        # v_4 = x^4 + 12 x^2 t + 12 t^2
        v = eval_solution(CaloricPolynomial(4), 0.5, np.array(2.0))
        assert v == pytest.approx(16 + 12 * 4 * 0.5 + 12 * 0.25)

    def test_gaussian_kernel_value(self):
        # Phi(2, 0) = (8 pi)^{-1/2} in 1D
        v = eval_solution(GaussianKernelSolution(1.0), 1.0, np.array(0.0))
        assert v == pytest.approx((8 * math.pi) ** -0.5)

    def test_exponential_is_caloric(self):
        res = heat_residual(ExponentialSolution((1.0,)),
                            ResidualProbeRegion((0.1, 0.3), 1.0))
        assert res <= 1e-6

    def test_eigenmode_and_erf(self):
        x = np.array([0.3, -1.2])
        em = eval_solution(Eigenmode((2.0,)), 0.25, x)
        np.testing.assert_allclose(em, math.exp(-1.0) * np.sin(2 * x))
        ef = eval_solution(ErfFront(), 0.25, x)
        from scipy.special import erf

        np.testing.assert_allclose(ef, erf(x / 1.0))

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="1D"):
            eval_solution(ErfFront(), 0.1, np.array(0.0), np.array(0.0))
        with pytest.raises(ValueError, match="positive"):
            eval_solution(ErfFront(), -0.1, np.array(0.0))


class TestTychonoff:
    def test_value_at_origin_is_flat_function(self):
        for t in (0.1, 0.37, 1.0):
            v, flagged = tychonoff_eval(t, 0.0, 40)
            assert v == pytest.approx(math.exp(-1.0 / t), rel=1e-12)
            assert not flagged

    def test_time_domain(self):
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            tychonoff_eval(1.5, 0.5, 40)
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            tychonoff_eval(-0.5, 0.5, 40)

    def test_self_convergence(self):
        v30, f30 = tychonoff_eval(0.5, 1.0, 30)
        v40, f40 = tychonoff_eval(0.5, 1.0, 40)
        assert not (f30 or f40)
        assert abs(v30 - v40) <= 1e-10 * abs(v40)

    def test_super_exponential_growth(self):
        # log|u|/x strictly increasing over x = 2, 4, 8 rules out any e^{cx}
        vals = [abs(tychonoff_eval(0.1, x, 40)[0]) for x in (2.0, 4.0, 8.0)]
        rates = [math.log(v) / x for v, x in zip(vals, (2.0, 4.0, 8.0))]
        assert rates[0] < rates[1] < rates[2]

    def test_partial_sum_matches_exact_arithmetic(self):
        # frozen from an exact-rational + mpmath evaluation of the K=40 sum
        v, _ = tychonoff_eval(0.1, 4.0, 40)
        assert v == pytest.approx(-3.6000079e13, rel=5e-3)

    def test_flag_fires_outside_convergence_budget(self):
        _, flagged = tychonoff_eval(0.1, 8.0, 40)
        assert flagged

    def test_residual_in_resolved_region(self):
        res = heat_residual(TychonoffSolution(40), ResidualProbeRegion((0.2, 0.9), 2.0))
        assert res <= 1e-4

    def test_vanishing_trace_on_central_compacts(self):
        # sup over |x| <= 1 decreases monotonically along t -> 0 (below t* ~ 0.5)
        sol = TychonoffSolution(40)
        x = np.linspace(-1.0, 1.0, 101)
        sups = [np.abs(sol.value(t, x)).max() for t in (0.4, 0.2, 0.1, 0.05, 0.025)]
        assert all(b < a for a, b in zip(sups, sups[1:]))
        assert sups[-1] < 1e-3

    def test_no_initial_trace_sample(self):
        with pytest.raises(NotImplementedError):
            TychonoffSolution(40).initial_values(np.array([0.0]))


class TestHeatResidual:
    @pytest.mark.parametrize("sol,region,bound", [
        (Eigenmode((1.0,)), ResidualProbeRegion((0.2, 1.0), 2.0), 1e-5),
        (CaloricPolynomial(4),
         ResidualProbeRegion((0.2, 1.0), 2.0, dt=0.01, dx=0.05, stencil_order=4), 1e-9),
        (GaussianKernelSolution(1.0), ResidualProbeRegion((0.2, 1.0), 2.0), 1e-6),
    ])
    def test_kind_bounds(self, sol, region, bound):
        assert heat_residual(sol, region) <= bound

    def test_region_validation(self):
        with pytest.raises(ValueError, match="stencil"):
            ResidualProbeRegion((0.2, 1.0), 2.0, stencil_order=3)
        with pytest.raises(ValueError, match="time stencil"):
            ResidualProbeRegion((1e-4, 1.0), 2.0)


@pytest.fixture(scope="module")
def datum_grid():
    return SpatialGrid.make(1, 16.0, 1024)


class TestInitialData:
    def test_closed_form_evolutions_match_operator(self, datum_grid):
        # || heat_evolve(datum samples, t) - closed form ||_inf <= max(1e-6, C dx^2),
        # compared away from the periodic wrap (sign and the like are not
        # box-periodic, so the boundary belongs to a different problem)
        cfg = HeatOperatorConfig("kernel_quadrature")
        tol = max(1e-6, 0.2 * datum_grid.spacing**2)
        interior = np.abs(datum_grid.axis) <= datum_grid.half_extent / 2
        for datum in (SignDatum(), DiracDatum(0.0), SchwartzGaussPolyDatum((0.0, 1.0), 1.0)):
            evolved = heat_evolve(datum_grid, datum.sample(datum_grid), 0.25, cfg)
            expect = datum.evolved_values(0.25, datum_grid.axis)
            assert np.abs(evolved - expect)[interior].max() <= tol, datum.label

    def test_oscillator_evolution_on_compatible_grid(self):
        # sin(x) is box-periodic when L is a multiple of pi
        g = SpatialGrid.make(1, 4 * math.pi, 1024)
        cfg = HeatOperatorConfig("kernel_quadrature")
        osc = OscillatorDatum(1.0, 1.0)
        evolved = heat_evolve(g, osc.sample(g), 0.25, cfg)
        expect = osc.evolved_values(0.25, g.axis)
        assert np.abs(evolved - expect).max() <= max(1e-6, 0.2 * g.spacing**2)

    def test_erf_front_is_sign_evolution(self, datum_grid):
        sign_evolved = SignDatum().evolved_values(0.3, datum_grid.axis)
        erf_vals = ErfFront().value(0.3, datum_grid.axis)
        np.testing.assert_allclose(sign_evolved, erf_vals, atol=1e-14)

    def test_exact_pairings_against_quadrature(self):
        probe = hermite_probe(1, 1.0)
        # <sign, x e^{-x^2/2}> = 2 int_0^inf x e^{-x^2/2} = 2
        assert exact_pairing(SignDatum(), probe) == pytest.approx(2.0, rel=1e-10)
        assert exact_pairing(DiracDatum(0.3), probe) == pytest.approx(
            0.3 * math.exp(-0.045), rel=1e-12)
        osc = OscillatorDatum(1.0, 2.0)
        oracle, _ = quad(lambda y: 2.0 * math.sin(y) * y * math.exp(-y * y / 2), -30, 30)
        assert exact_pairing(osc, probe) == pytest.approx(oracle, rel=1e-9)

    def test_even_probe_pairs_to_zero_with_sign(self):
        assert exact_pairing(SignDatum(), hermite_probe(0, 1.0)) == pytest.approx(0.0, abs=1e-12)


class TestRegistry:
    @pytest.mark.parametrize("ident,label", [
        ("gaussian_kernel:t0=2", "gaussian_kernel(t0=2)"),
        ("caloric_polynomial:m=4", "caloric_polynomial(4)"),
        ("exponential:mu=1", "exponential(mu=1)"),
        ("eigenmode:omega=2", "eigenmode(omega=2)"),
        ("erf_front", "erf_front"),
        ("tychonoff:K=40", "tychonoff(K=40)"),
    ])
    def test_solution_ids(self, ident, label):
        assert solution_from_id(ident).label == label

    @pytest.mark.parametrize("ident,kind", [
        ("sign", "sign"),
        ("dirac:x0=0.5", "dirac"),
        ("oscillator:omega=2,amp=3", "oscillator"),
        ("gauss_poly:coeffs=0|1|0.5,sigma=2", "gauss_poly"),
    ])
    def test_datum_ids(self, ident, kind):
        assert datum_from_id(ident).kind == kind

    def test_unknown_ids(self):
        with pytest.raises(ValueError, match="unknown solution"):
            solution_from_id("navier_stokes")
        with pytest.raises(ValueError, match="unknown datum"):
            datum_from_id("white_noise")
