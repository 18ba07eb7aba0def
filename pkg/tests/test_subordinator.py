"""Oracle tests for positive stable sampling, ML inversion, and overshoots."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc, gamma

from stableflows._rng import generator
from stableflows.subordinator import (
    GridExhaustedError,
    MLPath,
    ParameterDomainError,
    default_u_step,
    holder_modulus,
    invert_to_ml_path,
    ml_marginals_mc,
    ml_moment,
    overshoot_cdf,
    sample_overshoot_exact,
    sample_overshoot_exact_batch,
    sample_overshoot_grid,
    sample_positive_stable,
    simulate_ml_path,
    simulate_subordinator_grid,
)
from stableflows.stats import ks_two_sample, ks_critical_value


class TestPositiveStable:
    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    def test_laplace_oracle(self, beta, theta):
        # contract: E exp(-theta S) = exp(-theta**beta), within 4 MC standard errors
        rng = generator(2024, "laplace", beta, theta)
        s = sample_positive_stable(beta, rng, size=200_000)
        vals = np.exp(-theta * s)
        se = vals.std(ddof=1) / np.sqrt(vals.size)
        assert abs(vals.mean() - np.exp(-(theta**beta))) <= 4.0 * se

    def test_levy_half_closed_form(self):
        # beta = 1/2 is the Levy law with CDF erfc(1/(2 sqrt(x)))
        rng = generator(5, "levy-cdf")
        s = sample_positive_stable(0.5, rng, size=200_000)
        p_exceed = float((s > 1.0).mean())
        exact = 1.0 - erfc(0.5)
        se = np.sqrt(exact * (1.0 - exact) / s.size)
        assert abs(p_exceed - exact) <= 3.0 * se

    def test_positivity_and_domain(self):
        rng = generator(6, "pos")
        assert np.all(sample_positive_stable(0.7, rng, size=10_000) > 0.0)
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ParameterDomainError):
                sample_positive_stable(bad, rng)


class TestSubordinatorGrid:
    def test_strictly_increasing(self):
        for seed in range(5):
            grid = simulate_subordinator_grid(0.5, 0.01, 2.0, generator(seed, "grid"))
            assert grid.values[0] == 0.0
            assert np.all(np.diff(grid.values) > 0.0)

    def test_self_similarity_of_increments(self):
        # S(2) - S(0) over unit steps must match 2**(1/beta) S(1) = 4 S(1)
        rng = generator(7, "ss")
        reps = 4000
        two_step = np.array(
            [simulate_subordinator_grid(0.5, 1.0, 2.0, rng).values[2] for _ in range(reps)]
        )
        direct = 4.0 * sample_positive_stable(0.5, rng, size=reps)
        ks = ks_two_sample(two_step, direct)
        assert ks.statistic < ks_critical_value(reps, reps, 0.01)

    def test_block_sums_exchangeable(self):
        # increments over disjoint equal-length grid blocks share one law,
        # which is also the law of one self-similarity-scaled draw
        rng = generator(31, "blocks")
        xi = sample_positive_stable(0.7, rng, size=100_000 * 16).reshape(-1, 16)
        scale = 0.125 ** (1.0 / 0.7)
        first = xi[:, :8].sum(axis=1) * scale
        second = xi[:, 8:].sum(axis=1) * scale
        n = first.size
        assert ks_two_sample(first, second).statistic < ks_critical_value(n, n, 0.01)
        single = (8 * 0.125) ** (1.0 / 0.7) * sample_positive_stable(
            0.7, generator(32, "blocks-single"), size=n
        )
        assert ks_two_sample(first, single).statistic < ks_critical_value(n, n, 0.01)

    def test_endpoint_laplace(self):
        rng = generator(8, "endpoint")
        u_max, theta, beta = 2.0, 1.0, 0.5
        ends = np.array(
            [simulate_subordinator_grid(beta, 0.25, u_max, rng).values[-1] for _ in range(20_000)]
        )
        vals = np.exp(-theta * ends)
        se = vals.std(ddof=1) / np.sqrt(vals.size)
        assert abs(vals.mean() - np.exp(-u_max * theta**beta)) <= 4.0 * se

    def test_parameter_domain(self):
        rng = generator(9, "dom")
        with pytest.raises(ParameterDomainError):
            simulate_subordinator_grid(0.5, 0.0, 1.0, rng)
        with pytest.raises(ParameterDomainError):
            simulate_subordinator_grid(0.5, 2.0, 1.0, rng)


class TestMLInversion:
    def test_zero_time_and_monotone(self):
        grid = simulate_subordinator_grid(0.5, 0.01, 3.0, generator(10, "ml0"))
        path = invert_to_ml_path(grid, np.linspace(0.0, grid.values[-1] * 0.9, 64))
        assert path.values[0] == 0.0
        assert np.all(np.diff(path.values) >= 0.0)
        # grid-inversion artifact: values are integer multiples of the resolution
        mult = path.values / path.resolution
        assert np.allclose(mult, np.round(mult))

    def test_grid_exhaustion_raises(self):
        grid = simulate_subordinator_grid(0.5, 0.01, 0.5, generator(11, "exh"))
        with pytest.raises(GridExhaustedError):
            invert_to_ml_path(grid, [grid.values[-1] * 1.5])

    def test_ml_mean_against_mittag_leffler_moment(self):
        # E M(1) = 1/Gamma(1.5); grid value overshoots by less than one step
        u_step = default_u_step(0.5, 1.0)
        m = ml_marginals_mc(0.5, [1.0], 40_000, master_seed=12)[:, 0]
        exact = ml_moment(0.5, 1.0, 1)
        se = m.std(ddof=1) / np.sqrt(m.size)
        assert exact - 3.0 * se <= m.mean() <= exact + u_step + 3.0 * se

    def test_refinement_shrinks_bias(self):
        beta, exact = 0.5, ml_moment(0.5, 1.0, 1)
        coarse_step = 0.02 * exact
        coarse = ml_marginals_mc(beta, [1.0], 150_000, 13, u_step=coarse_step)[:, 0].mean()
        fine = ml_marginals_mc(beta, [1.0], 150_000, 14, u_step=coarse_step / 4.0)[:, 0].mean()
        se = 0.8 / np.sqrt(150_000)
        assert abs(fine - exact) <= abs(coarse - exact) + 2.0 * se
        assert coarse >= exact - 3.0 * se  # bias is non-negative

    @pytest.mark.parametrize(
        "beta,t,n,expected",
        [
            (0.5, 1.0, 0, 1.0),
            (0.5, 1.0, 1, 2.0 / np.sqrt(np.pi)),  # 1/Gamma(1.5)
            (0.5, 1.0, 2, 2.0),  # 2/Gamma(2)
            (0.3, 2.0, 1, 2.0**0.3 / gamma(1.3)),
        ],
    )
    def test_ml_moment_values(self, beta, t, n, expected):
        assert ml_moment(beta, t, n) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
    def test_ml_moments_mc(self, beta):
        u_step = default_u_step(beta, 1.0)
        m = ml_marginals_mc(beta, [1.0], 10_000, master_seed=15, tag=("moments", beta))[:, 0]
        for n in (1, 2, 3):
            vals = m**n
            se = vals.std(ddof=1) / np.sqrt(vals.size)
            exact = ml_moment(beta, 1.0, n)
            # M_grid lies in [M, M + u_step], so E M_grid**n is in [E M**n, E (M+u)**n]
            upper = sum(
                gamma(n + 1) / (gamma(k + 1) * gamma(n - k + 1)) * ml_moment(beta, 1.0, k) * u_step ** (n - k)
                for k in range(n + 1)
            )
            assert exact - 3.0 * se <= vals.mean() <= upper + 3.0 * se

    @pytest.mark.parametrize("c", [2.0, 4.0])
    def test_beta_self_similarity_of_marginals(self, c):
        # quantiles of M(ct) match c**beta quantiles of M(t)
        beta = 0.5
        m = ml_marginals_mc(beta, [c], 20_000, master_seed=16, tag=("ss", c))[:, 0]
        m2 = ml_marginals_mc(beta, [1.0], 20_000, master_seed=17, tag=("ss-base", c))[:, 0]
        ks = ks_two_sample(m / c**beta, m2)
        assert ks.statistic < ks_critical_value(20_000, 20_000, 0.01)

    def test_simulate_ml_path_retries_until_covered(self):
        path = simulate_ml_path(0.5, np.linspace(0.0, 50.0, 32), generator(18, "retry"), u_step=0.05)
        assert path.values[-1] > 0.0
        assert np.all(np.diff(path.values) >= 0.0)


class TestOvershoot:
    def test_half_level_probability(self):
        # P(delta_1 <= 1) = 1/2 for beta = 1/2: (1/pi) int_0^1 u**-0.5/(1+u) du = (2/pi) arctan 1
        d = sample_overshoot_exact_batch(0.5, 1.0, generator(19, "os"), 100_000)
        p = float((d <= 1.0).mean())
        se = 0.5 / np.sqrt(d.size)
        assert abs(p - 0.5) <= 3.0 * se
        assert overshoot_cdf(0.5, 1.0, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_single_sample_contract(self):
        s = sample_overshoot_exact(0.3, 2.5, generator(20, "os1"))
        assert s.delta > 0.0 and s.method == "exact-beta" and s.r == 2.5

    def test_scale_invariance(self):
        d1 = sample_overshoot_exact_batch(0.7, 1.0, generator(21, "osa"), 20_000)
        d4 = sample_overshoot_exact_batch(0.7, 4.0, generator(22, "osb"), 20_000)
        ks = ks_two_sample(d1, d4 / 4.0)
        assert ks.statistic < ks_critical_value(20_000, 20_000, 0.01)

    def test_grid_overshoot_converges_to_exact(self):
        beta, r = 0.5, 1.0
        exact = sample_overshoot_exact_batch(beta, r, generator(23, "osx"), 40_000)
        coarse = sample_overshoot_grid(beta, r, 0.08, 24, 20_000)
        fine = sample_overshoot_grid(beta, r, 0.02, 25, 20_000)
        ks_coarse = ks_two_sample(coarse, exact).statistic
        ks_fine = ks_two_sample(fine, exact).statistic
        assert ks_fine < ks_coarse

    def test_exact_matches_cdf_everywhere(self):
        d = sample_overshoot_exact_batch(0.8, 2.0, generator(26, "oscdf"), 50_000)
        from stableflows.stats import ks_one_sample

        ks = ks_one_sample(d, lambda x: overshoot_cdf(0.8, 2.0, x))
        assert ks.statistic < 1.63 / np.sqrt(d.size) * 1.5


class TestHolderModulus:
    def test_constant_path_is_zero(self):
        path = MLPath(beta=0.5, times=np.linspace(0, 1, 65), values=np.zeros(65), resolution=0.01)
        assert holder_modulus(path, 0.5) == 0.0

    def test_degenerate_grid_raises(self):
        with pytest.raises(ValueError):
            holder_modulus(MLPath(0.5, np.array([0.0]), np.array([0.0]), 0.01), 0.5)
        with pytest.raises(ValueError):
            holder_modulus(MLPath(0.5, np.array([0.0, 0.4]), np.array([0.0, 0.1]), 0.01), 0.5)

    def _sample_stats(self, n_paths, grid_n, u_step, seed):
        beta = 0.5
        times = np.linspace(0.0, 1.0, grid_n)
        out = []
        rng = generator(seed, "holder")
        for _ in range(n_paths):
            path = simulate_ml_path(beta, times, rng, u_step=u_step)
            out.append(holder_modulus(path, 1.0 - beta))
        return np.asarray(out)

    def test_refinement_stability(self):
        # the 99th percentile must not blow up when the inversion grid refines 4x
        base = self._sample_stats(120, 96, 0.01, 27)
        fine = self._sample_stats(120, 96, 0.0025, 28)
        q_base, q_fine = np.percentile(base, 99), np.percentile(fine, 99)
        assert q_fine < 2.0 * q_base

    def test_mean_stable_across_sample_sizes(self):
        small = self._sample_stats(60, 64, 0.01, 29)
        large = self._sample_stats(240, 64, 0.01, 30)
        assert abs(large.mean() - small.mean()) < 0.5 * large.mean()


@settings(max_examples=20, deadline=None)
@given(
    beta=st.floats(0.2, 0.85),
    seed=st.integers(0, 2**32 - 1),
)
def test_ml_paths_monotone_property(beta, seed):
    times = np.linspace(0.0, 1.0, 17)
    path = simulate_ml_path(beta, times, generator(seed, "prop"), u_step=0.05)
    assert path.values[0] == 0.0
    assert np.all(np.diff(path.values) >= 0.0)
    mult = path.values / path.resolution
    assert np.allclose(mult, np.round(mult))
