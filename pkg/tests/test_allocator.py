import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from binpower.allocator import (
    Policy,
    Region,
    epsilon_crossing,
    epsilon_limit,
    heuristic_wb_tdma,
    optimal_binary,
    tdma_sufficient,
    two_user_rates,
    two_user_region,
)
from binpower.ratecore import ChannelState, LinkBudget, best_k_rate, best_k_rates

GOLDEN = (1 + math.sqrt(5)) / 2

gains = arrays(np.float64, st.integers(1, 15), elements=st.floats(1e-3, 50))
snrs = st.floats(1e-3, 1e3)


class TestOptimalBinary:
    def test_single_user(self):
        r = optimal_binary(ChannelState([2.0]), LinkBudget())
        assert r.k_star == 1 and r.active_set == {0}
        assert r.rate == pytest.approx(0.5 * math.log(3), rel=1e-15)
        assert r.policy is Policy.OPTIMAL

    def test_weak_pair_goes_wideband(self):
        # 0.1 <= sqrt(1.1) for both users
        assert optimal_binary(ChannelState([0.1, 0.1]), LinkBudget()).k_star == 2

    def test_strong_user_alone(self):
        # 3 > sqrt(2) and 3 >= 1
        r = optimal_binary(ChannelState([3.0, 1.0]), LinkBudget())
        assert r.k_star == 1 and r.active_set == {0}

    def test_active_set_uses_original_indices(self):
        r = optimal_binary(ChannelState([0.01, 5.0, 0.02]), LinkBudget.from_snr(10))
        assert r.active_set == {1}
        assert r.allocation.powers.tolist() == [0.0, 1.0, 0.0]

    def test_all_zero_gains(self):
        r = optimal_binary(ChannelState([0.0, 0.0, 0.0]), LinkBudget())
        assert r.k_star == 1 and r.rate == 0.0

    def test_smallest_maximizer_on_ties(self):
        # at the golden point R_1 == R_2; the smaller k is kept
        b = LinkBudget()
        h = ChannelState([GOLDEN, GOLDEN])
        rates = best_k_rates(h, b)
        assert rates[0] == pytest.approx(rates[1], rel=1e-14)
        assert optimal_binary(h, b).k_star == int(np.argmax(rates)) + 1

    def test_empty(self):
        with pytest.raises(ValueError):
            optimal_binary(ChannelState([]), LinkBudget())

    @given(gains, snrs)
    def test_structure(self, h, rho):
        state, b = ChannelState(h), LinkBudget.from_snr(rho)
        r = optimal_binary(state, b)
        rates = best_k_rates(state, b)
        assert r.allocation.is_binary
        assert r.active_set == set(state.order[:r.k_star].tolist())
        assert r.rate == pytest.approx(best_k_rate(state, r.k_star, b), rel=1e-12)
        assert r.rate == pytest.approx(rates.max(), rel=1e-12)
        assert np.all(rates[:r.k_star - 1] < rates[r.k_star - 1])

    @given(gains, snrs, st.floats(1e-2, 1e2))
    def test_scale_covariance(self, h, rho, c):
        a = optimal_binary(ChannelState(h), LinkBudget.from_snr(rho))
        b = optimal_binary(ChannelState(c * h), LinkBudget.from_snr(rho / c))
        assert a.rate == pytest.approx(b.rate, rel=1e-9)
        rates = best_k_rates(ChannelState(h), LinkBudget.from_snr(rho))
        top2 = np.sort(rates)[-2:] if rates.size > 1 else rates
        if rates.size == 1 or top2[1] - top2[0] > 1e-9 * top2[1]:
            assert a.active_set == b.active_set

    @given(gains, snrs)
    def test_tdma_sufficiency_implies_single_user(self, h, rho):
        state, b = ChannelState(h), LinkBudget.from_snr(rho)
        if tdma_sufficient(state, b):
            assert optimal_binary(state, b).k_star == 1


class TestHeuristic:
    def test_single_user_matches_optimal(self):
        h, b = ChannelState([0.7]), LinkBudget.from_snr(3)
        assert heuristic_wb_tdma(h, b).rate == optimal_binary(h, b).rate

    @given(arrays(np.float64, 2, elements=st.floats(1e-3, 50)), snrs)
    def test_two_users_match_optimal(self, h, rho):
        state, b = ChannelState(h), LinkBudget.from_snr(rho)
        heur, opt = heuristic_wb_tdma(state, b), optimal_binary(state, b)
        assert heur.rate == pytest.approx(opt.rate, rel=1e-14)
        assert heur.policy is Policy.HEURISTIC

    @given(gains, snrs)
    def test_never_beats_optimal(self, h, rho):
        state, b = ChannelState(h), LinkBudget.from_snr(rho)
        heur = heuristic_wb_tdma(state, b)
        assert heur.k_star in (1, state.n)
        assert heur.rate <= optimal_binary(state, b).rate * (1 + 1e-14)

    def test_tie_goes_to_tdma(self):
        h = ChannelState([GOLDEN, GOLDEN])
        r = heuristic_wb_tdma(h, LinkBudget())
        rates = best_k_rates(h, LinkBudget())
        assert r.k_star == (2 if rates[1] > rates[0] else 1)


class TestTdmaSufficient:
    def test_boundary_inclusive(self):
        assert tdma_sufficient(ChannelState([math.e - 1, 0.2]), LinkBudget())

    def test_boundary_state_is_single_user(self):
        h = ChannelState([math.e - 1] + [0.3] * 40)
        assert tdma_sufficient(h, LinkBudget())
        assert optimal_binary(h, LinkBudget()).k_star == 1

    def test_below(self):
        assert not tdma_sufficient(ChannelState([1.7]), LinkBudget())

    def test_high_snr(self):
        # threshold (e-1)/100 = 0.0171828
        assert tdma_sufficient(ChannelState([0.02, 0.001]), LinkBudget.from_snr(100))
        assert not tdma_sufficient(ChannelState([0.017]), LinkBudget.from_snr(100))


class TestTwoUser:
    def test_golden_point_is_boundary(self):
        b = LinkBudget()
        assert two_user_region(GOLDEN, GOLDEN, b) is Region.BOUNDARY
        r = two_user_rates(GOLDEN, GOLDEN, b)
        assert r.user1_only == pytest.approx(r.both, rel=1e-12)
        assert r.user2_only == pytest.approx(r.both, rel=1e-12)

    @pytest.mark.parametrize("rho", [0.01, 0.5, 7.0, 300.0])
    def test_golden_point_scales_with_snr(self, rho):
        h = GOLDEN / rho
        assert two_user_region(h, h, LinkBudget.from_snr(rho)) is Region.BOUNDARY

    def test_examples(self):
        b = LinkBudget()
        assert two_user_region(3, 1, b) is Region.USER1_ONLY
        assert two_user_region(1, 3, b) is Region.USER2_ONLY
        assert two_user_region(0.1, 0.1, b) is Region.BOTH

    def test_equal_strong_gains_pick_user1(self):
        assert two_user_region(4.0, 4.0, LinkBudget()) is Region.USER1_ONLY

    def test_negative(self):
        with pytest.raises(ValueError):
            two_user_region(-1, 1, LinkBudget())

    @given(st.floats(1e-3, 10), st.floats(1e-3, 10), snrs)
    def test_consistent_with_allocator(self, h1, h2, rho):
        b = LinkBudget.from_snr(rho)
        region = two_user_region(h1, h2, b)
        active = optimal_binary(ChannelState([h1, h2]), b).active_set
        expected = {Region.USER1_ONLY: {0}, Region.USER2_ONLY: {1}, Region.BOTH: {0, 1}}
        if region is not Region.BOUNDARY:
            assert active == expected[region]


class TestEpsilon:
    def test_crossing_example(self):
        # (4 - 2) / (1 * 3 * (2 - 1))
        assert epsilon_crossing(2, 3.0) == pytest.approx(2 / 3, rel=1e-14)

    @pytest.mark.parametrize("x", np.logspace(-3, 3, 13))
    def test_increasing_in_n_and_below_limit(self, x):
        values = np.array([epsilon_crossing(n, x) for n in range(2, 51)])
        assert np.all(np.diff(values) > 0)
        assert np.all(values < epsilon_limit(x))

    def test_converges_to_one_at_e_minus_1(self):
        x = math.e - 1
        assert epsilon_limit(x) == pytest.approx(1.0, abs=1e-12)
        assert abs(epsilon_crossing(10**6, x) - 1.0) < 1e-5

    def test_limit_example(self):
        assert epsilon_limit(math.e**2 - 1) == pytest.approx(0.5, rel=1e-14)

    def test_crossing_matches_naive_formula(self):
        for n in (2, 5, 30):
            for x in (0.1, 1.0, 40.0):
                root = (1 + x) ** (1 / n)
                naive = ((1 + x) - root) / ((n - 1) * x * (root - 1))
                assert epsilon_crossing(n, x) == pytest.approx(naive, rel=1e-10)

    def test_crossing_is_rate_crossing(self):
        # n equal links with cross-gain eps: n log(1 + x/(1 + eps (n-1) x)) == log(1 + x)
        for n, x in [(3, 0.5), (10, 4.0)]:
            e = epsilon_crossing(n, x)
            assert n * math.log1p(x / (1 + e * (n - 1) * x)) == pytest.approx(math.log1p(x), rel=1e-12)

    @pytest.mark.parametrize("n,x", [(1, 1.0), (2, 0.0), (2, -1.0)])
    def test_errors(self, n, x):
        with pytest.raises(ValueError):
            epsilon_crossing(n, x)

    def test_limit_errors(self):
        with pytest.raises(ValueError):
            epsilon_limit(0.0)
