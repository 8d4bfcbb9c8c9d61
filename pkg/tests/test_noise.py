import math

import numpy as np
import pytest

import dynvlasov as dv


class TestSamplePath:
    def test_deterministic(self):
        a = dv.sample_path(2, 100, 0.01, seed=42)
        b = dv.sample_path(2, 100, 0.01, seed=42)
        assert np.array_equal(a.delta, b.delta)

    def test_different_seeds_differ(self):
        a = dv.sample_path(1, 10, 0.5, seed=1)
        b = dv.sample_path(1, 10, 0.5, seed=2)
        assert not np.array_equal(a.delta, b.delta)

    def test_moments(self):
        # CLT bound on the mean; 1% window on the variance, 1e6 entries.
        tau = 0.02
        inc = dv.sample_path(1, 10 ** 6, tau, seed=7)
        assert abs(inc.delta.mean()) <= 4 * math.sqrt(tau / 10 ** 6)
        assert inc.delta.var() == pytest.approx(tau, rel=0.01)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            dv.sample_path(0, 10, 0.1, 0)
        with pytest.raises(ValueError):
            dv.sample_path(1, 0, 0.1, 0)
        with pytest.raises(ValueError):
            dv.sample_path(1, 10, 0.0, 0)


class TestCoarsen:
    def test_identity_factor(self):
        inc = dv.sample_path(2, 8, 0.1, seed=3)
        out = dv.coarsen(inc, 1)
        assert np.array_equal(out.delta, inc.delta)
        assert out.tau == inc.tau

    def test_pairwise_sums(self):
        delta = np.array([[1.0, 2.0, 3.0, 4.0], [0.5, -0.5, 1.5, -1.5]])
        inc = dv.BrownianIncrements(K=2, N=4, tau=0.25, delta=delta, seed=0)
        out = dv.coarsen(inc, 2)
        assert out.N == 2
        assert out.tau == 0.5
        assert np.array_equal(out.delta, [[3.0, 7.0], [0.0, 0.0]])

    def test_composition_matches_direct_summation(self):
        inc = dv.sample_path(3, 64, 0.05, seed=11)
        twice = dv.coarsen(dv.coarsen(inc, 2), 2)
        direct = dv.coarsen(inc, 4)
        # Direct-summation oracle for one entry.
        assert direct.delta[0, 0] == pytest.approx(inc.delta[0, :4].sum(),
                                                   rel=1e-15)
        assert np.allclose(twice.delta, direct.delta, rtol=1e-14, atol=1e-16)

    def test_endpoint_preserved(self):
        inc = dv.sample_path(2, 96, 0.01, seed=13)
        for factor in (2, 3, 8):
            out = dv.coarsen(inc, factor)
            assert np.allclose(out.delta.sum(axis=1), inc.delta.sum(axis=1),
                               rtol=1e-13, atol=1e-15)

    def test_coarse_variance(self):
        tau, factor = 0.01, 4
        inc = dv.sample_path(1, 4 * 10 ** 5, tau, seed=17)
        out = dv.coarsen(inc, factor)
        assert out.delta.var() == pytest.approx(factor * tau, rel=0.02)

    def test_non_divisible_rejected(self):
        inc = dv.sample_path(1, 10, 0.1, seed=0)
        with pytest.raises(ValueError, match="divide"):
            dv.coarsen(inc, 3)
