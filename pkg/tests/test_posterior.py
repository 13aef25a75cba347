"""Posterior state, tail routes, and the innovation-gain recursion."""

import math

import numpy as np
import pytest

from seqtrial.betamath import BetaParams, quad_oracle, reg_inc_beta
from seqtrial.errors import DomainError, UsageError
from seqtrial.mc import RngSpec
from seqtrial.posterior import (
    CONTROL,
    EXPERIMENTAL,
    FAILURE,
    SUCCESS,
    ArmPairPosterior,
    TailMethod,
    innovation_gain_delta,
    innovation_gain_delta_series,
    innovation_gain_zero_delta,
    stein_tail_shift,
    tail_efficacy,
    tail_futility,
    update,
)


def fold(post, moves):
    for arm, outcome in moves:
        post = update(post, arm, outcome)
    return post


@pytest.fixture
def flat():
    return ArmPairPosterior.from_priors(BetaParams(1, 1), BetaParams(1, 1))


class TestUpdate:
    def test_experimental_success(self, flat):
        out = update(flat, EXPERIMENTAL, SUCCESS)
        assert out.experimental == BetaParams(2, 1)
        assert out.control == BetaParams(1, 1)
        assert (out.n_experimental, out.successes_experimental) == (1, 1)

    def test_control_failure(self, flat):
        out = update(flat, CONTROL, FAILURE)
        assert out.control == BetaParams(1, 2)
        assert out.experimental == BetaParams(1, 1)

    def test_composition(self, flat):
        out = fold(flat, [(EXPERIMENTAL, SUCCESS)] * 10)
        assert out.experimental == BetaParams(11, 1)
        assert out.n_experimental == 10

    def test_prior_recovery(self, flat):
        out = fold(flat, [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE), (CONTROL, SUCCESS)])
        prior = out.prior()
        assert prior.control == BetaParams(1, 1)
        assert prior.experimental == BetaParams(1, 1)

    def test_bad_args(self, flat):
        with pytest.raises(UsageError):
            update(flat, "placebo", SUCCESS)
        with pytest.raises(UsageError):
            update(flat, CONTROL, 2)

    def test_count_invariant(self):
        with pytest.raises(DomainError):
            ArmPairPosterior(BetaParams(1, 1), BetaParams(1, 1), n_control=1,
                             successes_control=2)


class TestTails:
    def test_symmetric_no_data(self, flat):
        assert tail_efficacy(flat, 0.0) == pytest.approx(0.5, abs=1e-12)
        assert tail_futility(flat) == pytest.approx(0.5, abs=1e-12)

    def test_unit_square_area(self, flat):
        assert tail_efficacy(flat, 0.05) == pytest.approx(0.54875, abs=1e-12)

    def test_high_contrast(self, flat):
        post = fold(flat, [(EXPERIMENTAL, SUCCESS)] * 10 + [(CONTROL, FAILURE)] * 10)
        oracle = quad_oracle(post.control, post.experimental, 0.05)
        assert tail_efficacy(post, 0.05) == pytest.approx(oracle, abs=1e-10)
        assert tail_efficacy(post, 0.05) < 0.001
        mirrored = fold(flat, [(CONTROL, SUCCESS)] * 10 + [(EXPERIMENTAL, FAILURE)] * 10)
        assert tail_futility(mirrored) < 0.001

    def test_complementarity_exact(self, flat):
        post = fold(flat, [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE), (EXPERIMENTAL, FAILURE)])
        assert tail_futility(post) + tail_efficacy(post, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_route_agreement(self):
        rng = np.random.default_rng(3)
        flat = ArmPairPosterior.from_priors(BetaParams(2, 1), BetaParams(1, 2))
        moves = [
            (CONTROL if rng.random() < 0.5 else EXPERIMENTAL,
             SUCCESS if rng.random() < 0.55 else FAILURE)
            for _ in range(25)
        ]
        post = fold(flat, moves)
        for delta in (0.0, 0.05, -0.1):
            q = tail_efficacy(post, delta, TailMethod.quadrature())
            r = tail_efficacy(post, delta, TailMethod.recursion())
            assert r == pytest.approx(q, abs=1e-8)
            mc = tail_efficacy(post, delta, TailMethod.monte_carlo(100_000, RngSpec(8)))
            se = math.sqrt(q * (1 - q) / 100_000) + 1e-9
            assert abs(mc - q) < 4 * se

    def test_data_order_invariance(self, flat):
        moves = [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE), (EXPERIMENTAL, FAILURE),
                 (CONTROL, SUCCESS), (EXPERIMENTAL, SUCCESS)]
        a = fold(flat, moves)
        b = fold(flat, list(reversed(moves)))
        assert tail_efficacy(a, 0.05) == tail_efficacy(b, 0.05)
        assert a.counts() if hasattr(a, "counts") else True

    def test_method_validation(self):
        with pytest.raises(DomainError):
            TailMethod(kind="exact")
        with pytest.raises(DomainError):
            TailMethod.monte_carlo(0, RngSpec(1))
        with pytest.raises(DomainError):
            TailMethod(kind="monte_carlo", mc_n=10, rng=None)


class TestLikelihoodRatioOrdering:
    def test_ordered_priors_give_ordered_tails(self):
        # pi_f optimistic about the experimental arm (alpha up, beta down)
        # and pessimistic about control; the efficacy tail under pi_f is
        # then never larger than under pi_e, for any dataset
        prior_e = (BetaParams(2, 1), BetaParams(1, 2))   # control, experimental
        prior_f = (BetaParams(1, 2), BetaParams(2, 1))
        rng = np.random.default_rng(4)
        for _ in range(20):
            s0, f0, s1, f1 = rng.integers(0, 12, size=4)
            post_e = ArmPairPosterior(
                BetaParams(prior_e[0].alpha + s0, prior_e[0].beta + f0),
                BetaParams(prior_e[1].alpha + s1, prior_e[1].beta + f1),
                n_control=int(s0 + f0), n_experimental=int(s1 + f1),
                successes_control=int(s0), successes_experimental=int(s1),
            )
            post_f = ArmPairPosterior(
                BetaParams(prior_f[0].alpha + s0, prior_f[0].beta + f0),
                BetaParams(prior_f[1].alpha + s1, prior_f[1].beta + f1),
                n_control=int(s0 + f0), n_experimental=int(s1 + f1),
                successes_control=int(s0), successes_experimental=int(s1),
            )
            for delta in (0.0, 0.05):
                assert tail_efficacy(post_f, delta) <= tail_efficacy(post_e, delta) + 1e-12


class TestSteinShift:
    def test_flat_example(self):
        # the Beta(2,1) CDF is t^2, so P(theta > 1/2) = 3/4 = 1/2 + shift
        shift = stein_tail_shift(BetaParams(1, 1), 0.5)
        assert shift == pytest.approx(0.25, abs=1e-14)
        assert 0.5 + shift == pytest.approx(1 - 0.25, abs=1e-14)

    def test_boundary(self):
        assert stein_tail_shift(BetaParams(2, 3), 0.0) == 0.0
        assert stein_tail_shift(BetaParams(2, 3), 1.0) == 0.0

    def test_updates_cdf(self):
        # shift applied to a generic state matches the incomplete Beta
        p = BetaParams(3.5, 2.0)
        t = 0.37
        upper_before = 1 - reg_inc_beta(t, p.alpha, p.beta)
        upper_after = 1 - reg_inc_beta(t, p.alpha + 1, p.beta)
        assert upper_before + stein_tail_shift(p, t) == pytest.approx(upper_after, abs=1e-13)


class TestInnovationGains:
    def test_flat_control_success(self, flat):
        gain = innovation_gain_zero_delta(flat, CONTROL, SUCCESS)
        assert gain == pytest.approx(1 / 6, abs=1e-14)
        # P(theta0 > theta1): 1/2 -> 2/3, confirmed by the direct integral
        after = update(flat, CONTROL, SUCCESS)
        assert 0.5 + gain == pytest.approx(
            quad_oracle(after.control, after.experimental, 0.0), abs=1e-12
        )
        assert 0.5 + gain == pytest.approx(2 / 3, abs=1e-12)

    def test_mirrored_experimental_success(self, flat):
        gain = innovation_gain_zero_delta(flat, EXPERIMENTAL, SUCCESS)
        assert gain == pytest.approx(-1 / 6, abs=1e-14)

    def test_zero_delta_reduction(self, flat):
        for arm in (CONTROL, EXPERIMENTAL):
            for outcome in (SUCCESS, FAILURE):
                assert innovation_gain_delta(flat, arm, outcome, 0.0) == pytest.approx(
                    innovation_gain_zero_delta(flat, arm, outcome), abs=1e-14
                )

    def test_single_gain_vs_oracle(self, flat):
        # T(c) = P(theta0 > theta1 + c) = oracle(p0, p1, -c) up to ties
        c = 0.05
        before = quad_oracle(flat.control, flat.experimental, -c)
        gain = innovation_gain_delta(flat, CONTROL, SUCCESS, c)
        after_state = update(flat, CONTROL, SUCCESS)
        after = quad_oracle(after_state.control, after_state.experimental, -c)
        assert before + gain == pytest.approx(after, abs=1e-9)

    @pytest.mark.parametrize("delta", [0.0, 0.05])
    def test_trajectory_20_steps(self, delta):
        rng = np.random.default_rng(5)
        state = ArmPairPosterior.from_priors(BetaParams(2, 1), BetaParams(1, 3))
        value = quad_oracle(state.control, state.experimental, -delta)
        for _ in range(20):
            arm = CONTROL if rng.random() < 0.5 else EXPERIMENTAL
            outcome = SUCCESS if rng.random() < 0.6 else FAILURE
            value += innovation_gain_delta(state, arm, outcome, delta)
            state = update(state, arm, outcome)
            assert value == pytest.approx(
                quad_oracle(state.control, state.experimental, -delta), abs=1e-9
            )

    def test_sequential_consistency(self, flat):
        # maintaining the tail over N updates equals recomputing at the end
        rng = np.random.default_rng(6)
        state = flat
        tail = tail_efficacy(flat, 0.05)
        for _ in range(30):
            arm = CONTROL if rng.random() < 0.5 else EXPERIMENTAL
            outcome = SUCCESS if rng.random() < 0.5 else FAILURE
            tail += innovation_gain_delta(state, arm, outcome, -0.05)
            state = update(state, arm, outcome)
        assert tail == pytest.approx(tail_efficacy(state, 0.05), abs=1e-10)

    @pytest.mark.parametrize("delta", [0.05, 0.3, -0.2])
    def test_integer_shape_series_cross_check(self, delta):
        state = ArmPairPosterior.from_priors(BetaParams(3, 2), BetaParams(2, 4))
        for arm in (CONTROL, EXPERIMENTAL):
            for outcome in (SUCCESS, FAILURE):
                q = innovation_gain_delta(state, arm, outcome, delta)
                s = innovation_gain_delta_series(state, arm, outcome, delta)
                assert s == pytest.approx(q, abs=1e-11)

    def test_series_needs_integers(self):
        state = ArmPairPosterior.from_priors(BetaParams(1.5, 1), BetaParams(1, 1))
        with pytest.raises(DomainError):
            innovation_gain_delta_series(state, CONTROL, SUCCESS, 0.1)

    def test_delta_domain(self, flat):
        with pytest.raises(DomainError):
            innovation_gain_delta(flat, CONTROL, SUCCESS, 1.0)
