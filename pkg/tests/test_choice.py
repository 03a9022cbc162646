import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import norm

from heatmix.choice import (
    pairwise_preference,
    preference_matrix,
    scrap_matrix,
    scrap_preference,
)
from heatmix.costs import CostDistribution


def integral_preference(mean_i, sd_i, mean_j, sd_j) -> float:
    """Direct numerical integration of the cost-distribution comparison.

    Fraction with C_i < C_j, integrating j's density against i's CDF.
    """
    if sd_i == 0 and sd_j == 0:
        return 0.5 if mean_i == mean_j else float(mean_i < mean_j)

    def integrand(c):
        fi = norm.cdf(c, loc=mean_i, scale=max(sd_i, 1e-300)) if sd_i > 0 else float(c > mean_i)
        fj = norm.pdf(c, loc=mean_j, scale=sd_j) if sd_j > 0 else 0.0
        return fi * fj

    if sd_j == 0:
        return float(norm.cdf(mean_j, loc=mean_i, scale=sd_i))
    lo = min(mean_i - 10 * max(sd_i, 1e-12), mean_j - 10 * sd_j)
    hi = max(mean_i + 10 * max(sd_i, 1e-12), mean_j + 10 * sd_j)
    val, _ = quad(integrand, lo, hi, epsabs=1e-10, epsrel=1e-10, limit=200)
    return val


class TestPairwisePreference:
    def test_equal_means_symmetry(self):
        assert pairwise_preference(CostDistribution(0.1, 0.02), CostDistribution(0.1, 0.03)) == 0.5

    def test_one_sigma_separation(self):
        # mean_j - mean_i equals the combined spread -> Phi(1)
        i = CostDistribution(0.10, 0.003)
        j = CostDistribution(0.10 + np.hypot(0.003, 0.004), 0.004)
        got = pairwise_preference(i, j)
        oracle = integral_preference(i.mean, i.sd, j.mean, j.sd)
        assert got == pytest.approx(oracle, abs=1e-6)
        assert got == pytest.approx(norm.cdf(1.0), abs=1e-12)

    def test_deterministic_dominance(self):
        assert pairwise_preference(CostDistribution(0.08, 0.0), CostDistribution(0.09, 0.0)) == 1.0
        assert pairwise_preference(CostDistribution(0.09, 0.0), CostDistribution(0.08, 0.0)) == 0.0

    def test_degenerate_tie(self):
        assert pairwise_preference(CostDistribution(0.08, 0.0), CostDistribution(0.08, 0.0)) == 0.5

    @given(
        st.floats(-0.05, 0.05), st.floats(0.001, 0.05), st.floats(0.001, 0.05),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_own_mean(self, delta, sd_i, sd_j):
        base = CostDistribution(0.10, sd_i)
        other = CostDistribution(0.10 + delta, sd_j)
        worse = CostDistribution(0.11, sd_i)
        assert pairwise_preference(worse, other) <= pairwise_preference(base, other)

    @given(st.floats(-0.5, 0.5))
    @settings(max_examples=40, deadline=None)
    def test_translation_invariance(self, shift):
        i, j = CostDistribution(0.10, 0.01), CostDistribution(0.12, 0.02)
        a = pairwise_preference(i, j)
        b = pairwise_preference(CostDistribution(i.mean + shift, i.sd),
                                CostDistribution(j.mean + shift, j.sd))
        assert a == pytest.approx(b, rel=1e-12)

    def test_widening_pulls_towards_half(self):
        i, j = CostDistribution(0.10, 0.005), CostDistribution(0.12, 0.005)
        narrow = pairwise_preference(i, j)
        wide = pairwise_preference(CostDistribution(0.10, 0.03), CostDistribution(0.12, 0.03))
        assert abs(wide - 0.5) < abs(narrow - 0.5)

    def test_closed_form_matches_integration_grid(self):
        deltas = np.linspace(-0.04, 0.04, 9)
        sds = [0.002, 0.01, 0.03]
        for d in deltas:
            for si in sds:
                for sj in sds:
                    i, j = CostDistribution(0.10, si), CostDistribution(0.10 + d, sj)
                    assert pairwise_preference(i, j) == pytest.approx(
                        integral_preference(i.mean, si, j.mean, sj), abs=1e-6)


class TestPreferenceMatrix:
    def allow(self, n):
        return np.ones((n, n), dtype=bool)

    def test_identical_pair(self):
        dists = [CostDistribution(0.1, 0.01), CostDistribution(0.1, 0.01)]
        pm = preference_matrix(dists, self.allow(2), np.array([True, True]))
        assert np.allclose(pm.f, [[0.5, 0.5], [0.5, 0.5]])

    def test_mask_blocks_one_direction(self):
        # switching from modern (idx 1) back to low-comfort (idx 0) blocked:
        # allowed[to=0, from=1] = False
        dists = [CostDistribution(0.02, 0.005), CostDistribution(0.10, 0.01)]
        allowed = self.allow(2)
        allowed[0, 1] = False
        pm = preference_matrix(dists, allowed, np.array([True, True]))
        assert pm.f[0, 1] == 0.0                       # nobody moves 1 -> 0, however cheap
        assert 0.0 < pm.f[1, 0] < 0.5                  # the open direction keeps its value

    def test_antisymmetry_machine_precision(self):
        rng = np.random.default_rng(42)
        n = 7
        dists = [CostDistribution(m, s) for m, s in zip(rng.uniform(0.02, 0.2, n),
                                                        rng.uniform(0.001, 0.05, n))]
        pm = preference_matrix(dists, self.allow(n), np.ones(n, dtype=bool))
        for i in range(n):
            for j in range(n):
                if i != j:
                    assert pm.f[i, j] + pm.f[j, i] == 1.0    # exact by construction

    def test_unavailable_excluded(self):
        dists = [CostDistribution(0.1, 0.01)] * 3
        pm = preference_matrix(dists, self.allow(3), np.array([True, False, True]))
        assert np.all(pm.f[1, :] == 0) and np.all(pm.f[:, 1] == 0)

    def test_three_tech_monte_carlo_oracle(self):
        rng = np.random.default_rng(7)
        dists = [CostDistribution(0.10, 0.012), CostDistribution(0.115, 0.02),
                 CostDistribution(0.09, 0.03)]
        pm = preference_matrix(dists, self.allow(3), np.ones(3, dtype=bool))
        n_draws = 1_000_000
        draws = np.column_stack([rng.normal(d.mean, d.sd, n_draws) for d in dists])
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                mc = float(np.mean(draws[:, i] < draws[:, j]))
                assert pm.f[i, j] == pytest.approx(mc, abs=0.003)


class TestScrapPreference:
    def test_dominance_limit(self):
        # running cost 6+ spreads below the payback cost: nobody scraps
        mc = CostDistribution(0.05, 0.005)
        pb = CostDistribution(0.05 + 7 * np.hypot(0.005, 0.005), 0.005)
        assert scrap_preference(mc, pb) < 1e-9

    def test_equal_means(self):
        assert scrap_preference(CostDistribution(0.1, 0.01), CostDistribution(0.1, 0.01)) == 0.5

    def test_degenerate_no_scrap(self):
        # incumbent at 10 does not exceed the 10.67 payback cost
        assert scrap_preference(CostDistribution(10.0, 0.0),
                                CostDistribution(4.0 + 20.0 / 3.0, 0.0)) == 0.0

    @pytest.mark.parametrize("b_mean,b_sd,bound", [
        (3.0, 1.0, 0.05),      # shipped default: skew of 1/b costs a few percent
        (3.0, 1.0 / 3, 0.02),  # mild heterogeneity: delta method is accurate
        (15.0, 5.0, 0.05),
    ])
    def test_first_order_propagation_error_bounded(self, b_mean, b_sd, bound):
        # b heterogeneity enters the payback cost as IC/b; the delta-method
        # spread is first-order, so a sampled household oracle bounds its error
        rng = np.random.default_rng(11)
        mc_i = CostDistribution(0.095, 0.008)
        mc_j_mean, mc_j_sd = 0.045, 0.006
        ic_annual_mean, ic_annual_sd = 0.12, 0.04
        n = 2_000_000
        b = rng.normal(b_mean, b_sd, n)
        b = b[b > 0.05 * b_mean][:n // 2]
        m = len(b)
        draws_i = rng.normal(mc_i.mean, mc_i.sd, m)
        draws_pb = (rng.normal(mc_j_mean, mc_j_sd, m)
                    + rng.normal(ic_annual_mean, ic_annual_sd, m) / b)
        mc_frac = float(np.mean(draws_i > draws_pb))
        pb_mean = mc_j_mean + ic_annual_mean / b_mean
        pb_sd = np.sqrt(mc_j_sd ** 2 + (ic_annual_sd / b_mean) ** 2
                        + (ic_annual_mean * b_sd / b_mean ** 2) ** 2)
        got = scrap_preference(mc_i, CostDistribution(pb_mean, pb_sd))
        assert got == pytest.approx(mc_frac, abs=bound)


class TestScrapMatrix:
    def test_masked_pairs_only(self):
        mc = [CostDistribution(0.1, 0.01), CostDistribution(0.05, 0.01)]
        pb = [CostDistribution(0.2, 0.01), CostDistribution(0.05, 0.01)]
        allowed = np.array([[False, True], [False, False]])
        sm = scrap_matrix(mc, pb, allowed, np.array([True, True]))
        assert sm.g[0, 1] > 0.99          # incumbent 0 scraps towards 1
        assert sm.g[1, 0] == 0.0          # reverse not permitted
        assert sm.g[0, 0] == sm.g[1, 1] == 0.0
