import math

import numpy as np
import pytest
from scipy.special import erf

import dynvlasov as dv
from dynvlasov.field import CaseTwoField


class TestDensityRho:
    def test_constant_field(self):
        grid = dv.make_grid(1.0, 0.25, 0.5, 6.0)
        f = dv.DensityField(grid, np.full((grid.nx, grid.nv), 3.0))
        assert np.allclose(dv.density_rho(f), 2 * 6.0 * 3.0, rtol=1e-14)

    def test_landau_profile(self):
        # Error-function oracle: the Gaussian mass inside [-6, 6] is
        # erf(6/sqrt(2)); the tail below 1e-8 and the trapezoid error are
        # both far below the tolerance.
        grid = dv.make_grid(1.0, 1 / 16, 1 / 64, 6.0)
        f = dv.sample_on_grid(
            lambda x, v: dv.initial_density_landau(x, v, 0.05, 1.0), grid)
        rho = dv.density_rho(f)
        inside = erf(6.0 / math.sqrt(2.0))
        expected = (1 + 0.05 * np.cos(2 * np.pi * grid.x_nodes)) * inside
        assert np.abs(rho - expected).max() <= 1e-6

    def test_two_stream_profile(self):
        # Gaussian second-moment oracle: int v^2 exp(-v^2/2)/sqrt(2 pi) = 1.
        grid = dv.make_grid(1.0, 1 / 16, 1 / 128, 6.0)
        f = dv.sample_on_grid(
            lambda x, v: dv.initial_density_two_stream(x, v, 0.05, 1.0), grid)
        rho = dv.density_rho(f)
        expected = 1 + 0.05 * np.cos(2 * np.pi * grid.x_nodes)
        assert np.abs(rho - expected).max() <= 1e-5


class TestSolveField:
    def test_neutral_density_gives_zero_field(self):
        e = dv.solve_field(np.ones(64), 1.0)
        assert np.abs(e.e_nodes).max() <= 1e-12

    def test_cosine_density_sine_field(self):
        # Analytic antiderivative oracle: E' = rho - 1 with zero mean gives
        # E(x) = (alpha L / 2 pi) sin(2 pi x / L).
        L, alpha = 2.0, 0.1
        for nx in (64, 128):
            x = np.arange(nx) * (L / nx)
            rho = 1 + alpha * np.cos(2 * np.pi * x / L)
            e = dv.solve_field(rho, L)
            expected = alpha * L / (2 * np.pi) * np.sin(2 * np.pi * x / L)
            assert np.abs(e.e_nodes - expected).max() <= 5.0 * (L / nx) ** 2

    def test_second_order_convergence(self):
        L, alpha = 1.0, 0.05
        errs = []
        for nx in (64, 128, 256):
            x = np.arange(nx) * (L / nx)
            rho = 1 + alpha * np.cos(2 * np.pi * x / L)
            e = dv.solve_field(rho, L)
            target = alpha * L / (2 * np.pi) * np.sin(2 * np.pi * x / L)
            errs.append(np.abs(e.e_nodes - target).max())
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert orders.min() >= 1.9

    def test_discrete_zero_mean(self):
        rng = np.random.default_rng(8)
        for nx in (32, 100):
            rho = 1 + 0.8 * rng.standard_normal(nx)
            e = dv.solve_field(rho, 1.0)
            assert abs(e.e_nodes.sum() * e.dx) <= 1e-10

    def test_clamp_bound(self):
        # A huge charge spike saturates the clamp at 2L.
        L = 1.0
        rho = np.ones(32)
        rho[3] = 4000.0
        e = dv.solve_field(rho, L)
        assert np.abs(e.e_nodes).max() <= 2 * L
        assert np.abs(e.e_nodes).max() == pytest.approx(2 * L)

    def test_superposition_about_neutral_background(self):
        rng = np.random.default_rng(11)
        rho_a = 1 + 0.1 * rng.standard_normal(48)
        rho_b = 1 + 0.1 * rng.standard_normal(48)
        ea = dv.solve_field(rho_a, 1.0).e_nodes
        eb = dv.solve_field(rho_b, 1.0).e_nodes
        eab = dv.solve_field(rho_a + rho_b - 1.0, 1.0).e_nodes
        assert np.abs(ea + eb - eab).max() <= 1e-12

    def test_forward_difference_recovers_charge(self):
        L, nx = 1.0, 256
        x = np.arange(nx) * (L / nx)
        rho = 1 + 0.05 * np.cos(2 * np.pi * x / L)
        e = dv.solve_field(rho, L).e_nodes
        dEdx = (np.roll(e, -1) - e) / (L / nx)
        mid = 0.5 * (rho + np.roll(rho, -1)) - 1.0
        assert np.abs(dEdx - mid).max() <= 0.2 * (L / nx)

    def test_between_node_evaluation(self):
        e = CaseTwoField(L=1.0, dx=0.25, e_nodes=np.array([0.0, 1.0, 0.0, -1.0]))
        assert e(0.0, 0.125) == pytest.approx(0.5)
        assert e(0.0, 0.875) == pytest.approx(-0.5)  # periodic wrap to node 0
        assert e(0.0, 1.125) == pytest.approx(0.5)
        assert e.emax == 2.0


class TestCaseOneField:
    def test_constant(self):
        f = dv.CaseOneField(kind="constant", amplitude=1.5, L=1.0)
        assert f(0.0, 0.3) == 1.5
        assert f.emax == 1.5
        assert f.potential(0.3) is None

    def test_cosine_bound(self):
        f = dv.CaseOneField(kind="cosine", amplitude=0.7, L=2.0)
        x = np.linspace(0, 2, 1001)
        assert np.abs(f(0.0, x)).max() <= f.emax + 1e-15
        assert f(0.0, 0.0) == pytest.approx(0.7)

    def test_gradient_is_minus_grad_potential(self):
        f = dv.CaseOneField(kind="gradient", amplitude=1.0, L=1.0)
        x = np.linspace(0, 1, 101)
        h = 1e-6
        du = (f.potential(x + h) - f.potential(x - h)) / (2 * h)
        assert np.abs(f(0.0, x) + du).max() <= 1e-8
        assert f.emax == pytest.approx(2 * np.pi)

    def test_derivatives_match_finite_differences(self):
        for kind in ("constant", "cosine", "gradient"):
            f = dv.CaseOneField(kind=kind, amplitude=0.8, L=1.0)
            x = np.linspace(0, 1, 17)
            h = 1e-6
            fd = (f(0.0, x + h) - f(0.0, x - h)) / (2 * h)
            assert np.abs(f.deriv(0.0, x) - fd).max() <= 1e-7

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            dv.CaseOneField(kind="quartic", amplitude=1.0, L=1.0)


class TestSigmaModel:
    def _model(self):
        return dv.SigmaModel(components=(
            dv.SigmaComponent(kind="sine", amplitude=0.5, L=1.0),
            dv.SigmaComponent(kind="cosine_shifted", amplitude=0.3, L=1.0),
            dv.SigmaComponent(kind="constant", amplitude=-2.0, L=1.0)))

    def test_sup_bounds_hold(self):
        model = self._model()
        x = np.linspace(0, 1, 2001)
        vals = model(x)
        assert vals.shape == (3, 2001)
        assert (np.abs(vals).max(axis=1) <= model.sup_bounds + 1e-12).all()

    def test_derivatives_match_finite_differences(self):
        model = self._model()
        x = np.linspace(0, 1, 33)
        h = 1e-6
        fd = (model(x + h) - model(x - h)) / (2 * h)
        assert np.abs(model.deriv(x) - fd).max() <= 1e-7

    def test_trace_sigma_squared(self):
        model = dv.SigmaModel(components=(
            dv.SigmaComponent(kind="constant", amplitude=2.0, L=1.0),
            dv.SigmaComponent(kind="zero", amplitude=0.0, L=1.0),
            dv.SigmaComponent(kind="constant", amplitude=-1.0, L=1.0)))
        assert model.trace_sigma_squared() == pytest.approx(5.0)
        with pytest.raises(ValueError):
            self._model().trace_sigma_squared()
