import numpy as np
import pytest

import dynvlasov as dv

from test_solver import small_cfg


def conv_cfg(**kw):
    base = dict(N=8, T=0.5, dx=1 / 32, dv=1 / 32, U0=3.0, error_window=1.0,
                seed=100)
    base.update(kw)
    return small_cfg(**base)


class TestConvergenceStudy:
    def test_deterministic_subcase_orders_near_one(self):
        # sigma = 0: every sample is the same path, so the error has zero
        # sample variance and the pure discretization order shows through.
        cfg = conv_cfg(sigma=dv.SigmaSpec(kinds=("zero",), amplitudes=(0.0,)))
        t1 = dv.run_convergence_study(cfg, levels=3, samples=1)
        t2 = dv.run_convergence_study(cfg, levels=3, samples=2)
        for r1, r2 in zip(t1.rows, t2.rows):
            assert r1.error == pytest.approx(r2.error, rel=1e-12)
        assert 0.7 <= t1.fitted_order <= 1.3

    def test_rows_and_metadata(self):
        cfg = conv_cfg()
        table = dv.run_convergence_study(cfg, levels=3, samples=2)
        assert len(table.rows) == 2
        assert table.rows[0].level == 1
        assert table.rows[0].tau == pytest.approx(cfg.tau / 2)
        assert table.rows[1].tau == pytest.approx(cfg.tau / 4)
        assert np.isnan(table.rows[0].order)
        assert table.rows[1].order == pytest.approx(
            np.log2(table.rows[0].error / table.rows[1].error))
        assert table.samples == 2
        assert len(table.path_checksum) == 64

    def test_reproducible(self):
        cfg = conv_cfg()
        t1 = dv.run_convergence_study(cfg, levels=2, samples=3)
        t2 = dv.run_convergence_study(cfg, levels=2, samples=3)
        assert [r.error for r in t1.rows] == [r.error for r in t2.rows]
        assert t1.path_checksum == t2.path_checksum

    def test_threads_do_not_change_results(self):
        cfg = conv_cfg()
        t1 = dv.run_convergence_study(cfg, levels=2, samples=4, threads=1)
        t2 = dv.run_convergence_study(cfg, levels=2, samples=4, threads=2)
        assert [r.error for r in t1.rows] == [r.error for r in t2.rows]

    def test_node_budget_guard(self):
        with pytest.raises(ValueError, match="budget"):
            dv.run_convergence_study(conv_cfg(), levels=3, samples=1,
                                     node_budget=1000)

    def test_level_count_guard(self):
        with pytest.raises(ValueError, match="levels"):
            dv.run_convergence_study(conv_cfg(), levels=1, samples=1)

    def test_window_alignment_guard(self):
        with pytest.raises(ValueError, match="error_window"):
            dv.run_convergence_study(conv_cfg(error_window=0.7), levels=2,
                                     samples=1)


class TestTimingStudy:
    def test_rows_and_positive_ratio(self):
        cfg = conv_cfg(N=16, T=0.5)
        rows = dv.run_timing_study([cfg], repetitions=1)
        assert len(rows) == 1
        assert rows[0].N == 16
        assert rows[0].adaptive_seconds > 0
        assert rows[0].nonadaptive_seconds > 0
        assert rows[0].ratio == pytest.approx(
            rows[0].nonadaptive_seconds / rows[0].adaptive_seconds)


class TestMonteCarlo:
    def test_single_sample_rejected(self):
        with pytest.raises(ValueError, match="2 samples"):
            dv.run_monte_carlo(conv_cfg(), samples=1)

    def test_mean_and_se_shapes(self):
        cfg = conv_cfg(field=dv.FieldSpec(kind="constant", amplitude=1.0),
                       sigma=dv.SigmaSpec(kinds=("constant",),
                                          amplitudes=(1.0,)))
        mc = dv.run_monte_carlo(cfg, samples=4)
        assert mc.t.shape == (cfg.N + 1,)
        for name in ("mass", "l2", "momentum", "kinetic"):
            assert mc.mean[name].shape == (cfg.N + 1,)
            assert (mc.se[name][1:] >= 0).all()
        assert set(mc.reference) == {"momentum", "kinetic"}
        assert "momentum" in mc.fits and "kinetic" in mc.fits

    def test_threads_do_not_change_results(self):
        cfg = conv_cfg(field=dv.FieldSpec(kind="constant", amplitude=1.0),
                       sigma=dv.SigmaSpec(kinds=("constant",),
                                          amplitudes=(0.5,)))
        a = dv.run_monte_carlo(cfg, samples=4, threads=1)
        b = dv.run_monte_carlo(cfg, samples=4, threads=2)
        for name in a.mean:
            assert np.array_equal(a.mean[name], b.mean[name],
                                  equal_nan=True)

    def test_momentum_slope_tracks_constant_field(self):
        cfg = conv_cfg(N=16, T=1.0,
                       field=dv.FieldSpec(kind="constant", amplitude=1.0),
                       sigma=dv.SigmaSpec(kinds=("constant",),
                                          amplitudes=(0.5,)),
                       U0=6.0, dx=0.02, dv=0.02, epsilon0=1e-6,
                       initial=dv.InitialSpec(kind="two_stream", alpha=0.05))
        mc = dv.run_monte_carlo(cfg, samples=24)
        slope = mc.fits["momentum"][1]
        # slope noise at 24 samples with sigma = 0.5 stays well under 0.3
        assert slope == pytest.approx(1.0, abs=0.3)
