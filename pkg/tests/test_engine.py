"""Stopping-rule state machine, utilities, and forward simulation."""

import math

import numpy as np
import pytest

from seqtrial.betamath import BetaParams, quad_oracle
from seqtrial.engine import (
    ArmPriors,
    DecisionKind,
    EarlyStopAction,
    Schedule,
    TailTables,
    TrialData,
    TrialDesign,
    UtilitySpec,
    _forward_replicates,
    assign_next,
    early_stop_check,
    expected_utility_at_efficacy,
    expected_utility_at_futility,
    interim_decision,
    predictive_cumulative_utility,
    run_trial,
)
from seqtrial.errors import DomainError, UsageError
from seqtrial.mc import RngSpec
from seqtrial.posterior import CONTROL, EXPERIMENTAL, FAILURE, SUCCESS
from tests.conftest import worked_example_design

# frozen seeded regression value: predictive cumulative utility of starting
# a trial under the worked-example design (300 forward replicates, seed 42)
PCU_AT_START_SEED42 = 1080.3934357186865


def drive(data: TrialData, moves):
    for arm, outcome in moves:
        data.append(arm, outcome)
    return data


def ten_vs_zero(design, tables):
    """Alternate control failures and experimental successes until a stop."""
    data = TrialData()
    for _ in range(20):
        for arm, outcome in ((CONTROL, FAILURE), (EXPERIMENTAL, SUCCESS)):
            data.append(arm, outcome)
            decision = interim_decision(design, data, tables)
            if decision.kind is not DecisionKind.CONTINUE:
                return data, decision
    raise AssertionError("no stop reached")


class TestValidation:
    def test_eps_budget(self):
        with pytest.raises(DomainError):
            worked_example_design(eps_e=0.6, eps_f=0.5)
        with pytest.raises(DomainError):
            worked_example_design(eps_e=0.0)

    def test_burn_in_and_horizon(self):
        with pytest.raises(DomainError):
            worked_example_design(burn_in=500)
        with pytest.raises(DomainError):
            worked_example_design(horizon=501)

    def test_schedule(self):
        with pytest.raises(DomainError):
            Schedule(points=(5, 5))
        with pytest.raises(DomainError):
            Schedule(step=0)
        s = Schedule(points=(3, 10, 40))
        assert s.is_interim(10, 0) and not s.is_interim(11, 0)
        assert not s.is_interim(3, 5) and s.is_interim(10, 5)

    def test_utilities(self):
        with pytest.raises(DomainError):
            UtilitySpec(gain_efficacy=-1.0)


class TestAssignment:
    def test_block_completion(self):
        data = TrialData()
        rng = RngSpec(3)
        first = assign_next(data, rng)
        data.append(first, SUCCESS)
        second = assign_next(data, rng)
        assert {first, second} == {CONTROL, EXPERIMENTAL}

    def test_exact_balance_over_blocks(self):
        data = TrialData()
        rng = RngSpec(4)
        for _ in range(1000):
            data.append(assign_next(data, rng), SUCCESS)
        assert data.s0 + data.f0 == 500
        assert data.s1 + data.f1 == 500

    def test_determinism(self):
        seq1, seq2 = [], []
        for seq in (seq1, seq2):
            data = TrialData()
            for _ in range(40):
                arm = assign_next(data, RngSpec(5))
                seq.append(arm)
                data.append(arm, FAILURE)
        assert seq1 == seq2


class TestInterimDecision:
    def test_efficacy_unreachable_at_tiny_eps(self, tables):
        design = worked_example_design(eps_e=1e-12, eps_f=0.05, n_max=40)
        data = drive(TrialData(), [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE)] * 5)
        decision = interim_decision(design, data)
        assert decision.kind is not DecisionKind.EFFICACY

    def test_ten_vs_zero_efficacy(self, design, tables):
        data, decision = ten_vs_zero(design, tables)
        assert decision.kind is DecisionKind.EFFICACY
        assert decision.efficacy_tail < 0.05
        post = data.posterior(design.prior_e)
        assert decision.efficacy_tail == pytest.approx(
            quad_oracle(post.control, post.experimental, design.delta), abs=1e-9
        )

    def test_mirrored_futility(self, design, tables):
        data = TrialData()
        for _ in range(20):
            for arm, outcome in ((CONTROL, SUCCESS), (EXPERIMENTAL, FAILURE)):
                data.append(arm, outcome)
                decision = interim_decision(design, data, tables)
                if decision.kind is not DecisionKind.CONTINUE:
                    assert decision.kind is DecisionKind.FUTILITY
                    return
        raise AssertionError("futility never declared")

    def test_off_schedule_usage_error(self, tables):
        design = worked_example_design(schedule=Schedule(step=10))
        data = drive(TrialData(), [(CONTROL, SUCCESS)] * 3)
        with pytest.raises(UsageError):
            interim_decision(design, data)

    def test_tie_precedence_warns_and_picks_efficacy(self):
        # deliberately reversed priors: both conditions hold at once
        design = worked_example_design(
            prior_e=ArmPriors(BetaParams(1, 9), BetaParams(9, 1)),
            prior_f=ArmPriors(BetaParams(9, 1), BetaParams(1, 9)),
            n_max=40,
        )
        data = drive(TrialData(), [(CONTROL, FAILURE)])
        with pytest.warns(UserWarning, match="simultaneously"):
            decision = interim_decision(design, data)
        assert decision.kind is DecisionKind.EFFICACY

    def test_inconclusive_at_n_max(self):
        design = worked_example_design(n_max=4, horizon=4)
        data = drive(TrialData(), [(CONTROL, SUCCESS), (EXPERIMENTAL, SUCCESS)] * 2)
        assert interim_decision(design, data).kind is DecisionKind.INCONCLUSIVE


class TestExpectedUtilities:
    def test_efficacy_formula(self, design, tables):
        data, decision = ten_vs_zero(design, tables)
        eu = expected_utility_at_efficacy(design, data, tables)
        tail = tables.f_delta_tail(data.counts())
        assert eu == pytest.approx(2500 - 3500 * tail, abs=1e-9)
        assert eu == pytest.approx(2500 - 3500 * 0.04, abs=3500 * 0.05)  # tail just under eps

    def test_efficacy_certainty_limit(self, design, tables):
        data = drive(TrialData(), [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE)] * 40)
        assert expected_utility_at_efficacy(design, data, tables) == pytest.approx(
            2500.0, abs=1e-3
        )

    def test_efficacy_precondition(self, design, tables):
        with pytest.raises(UsageError):
            expected_utility_at_efficacy(design, TrialData(), tables)

    def test_futility_formula_and_positivity(self, design, tables):
        data = drive(TrialData(), [(CONTROL, SUCCESS), (EXPERIMENTAL, FAILURE)] * 10)
        eu = expected_utility_at_futility(design, data, tables)
        fut = tables.futility_tail(data.counts())
        assert eu == pytest.approx(500 - 1500 * fut, abs=1e-9)
        # design guarantee: eps_f = 0.05 <= G_f/(L_f+G_f) = 1/3 implies a
        # positive expected utility at any futility stop
        assert design.eps_f <= 500 / 1500
        assert eu > 0

    def test_break_even_algebra(self):
        u = UtilitySpec()
        tail = u.gain_efficacy / (u.loss_efficacy + u.gain_efficacy)
        assert u.gain_efficacy - (u.loss_efficacy + u.gain_efficacy) * tail == pytest.approx(0.0)


class TestPredictiveUtility:
    def test_overwhelming_efficacy(self, design, tables):
        data = drive(TrialData(), [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE)] * 49)
        # posterior is (50,1) vs (1,50); the next interim triggers efficacy
        pcu = predictive_cumulative_utility(design, data, RngSpec(9), tables=tables, reps=200)
        assert pcu.stop_prob_efficacy > 0.99
        assert pcu.value > 2500 - 10
        assert pcu.expected_duration < 5

    def test_empty_future(self):
        design = worked_example_design(horizon=1)
        data = drive(TrialData(), [(CONTROL, SUCCESS)])
        pcu = predictive_cumulative_utility(design, data, RngSpec(0), reps=50)
        assert pcu.value == 0.0
        assert pcu.stop_prob_efficacy == 0.0
        assert pcu.stop_prob_futility == 0.0

    def test_worth_starting_regression(self, design, tables):
        pcu = predictive_cumulative_utility(design, TrialData(), RngSpec(42), tables=tables, reps=300)
        assert pcu.value > 0
        assert pcu.value == pytest.approx(PCU_AT_START_SEED42, abs=1e-9)

    def test_determinism(self, design, tables):
        a = predictive_cumulative_utility(design, TrialData(), RngSpec(4), tables=tables, reps=100)
        b = predictive_cumulative_utility(design, TrialData(), RngSpec(4), tables=tables, reps=100)
        assert a == b


class TestEarlyStop:
    def test_overwhelming_data_continues(self, design, tables):
        data = drive(TrialData(), [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE)] * 49)
        action = early_stop_check(design, data, RngSpec(10), tables=tables, reps=150)
        assert action is EarlyStopAction.CONTINUE

    def test_balanced_gap_data_stops(self, design, tables):
        # 100 successes and 100 failures per arm: neither rule is in reach,
        # so continuing mostly burns patient costs
        moves = ([(CONTROL, SUCCESS), (EXPERIMENTAL, SUCCESS)] * 100
                 + [(CONTROL, FAILURE), (EXPERIMENTAL, FAILURE)] * 100)
        data = drive(TrialData(), moves)
        action = early_stop_check(design, data, RngSpec(11), tables=tables, reps=150)
        assert action is EarlyStopAction.STOP_INCONCLUSIVE

    def test_pure_cost_always_stops(self, tables):
        design = worked_example_design(
            utilities=UtilitySpec(0.0, 0.0, 0.0, 0.0, cost_per_patient=1.0)
        )
        action = early_stop_check(design, TrialData(), RngSpec(12), reps=100)
        assert action is EarlyStopAction.STOP_INCONCLUSIVE


class TestRunTrial:
    def test_strong_efficacy_truth(self, design, tables):
        hits = sum(
            run_trial(design, (0.3, 0.9), RngSpec(1, i), tables=tables,
                      record_trajectory=False).decision.kind is DecisionKind.EFFICACY
            for i in range(200)
        )
        assert hits >= 180

    def test_mirrored_futility_truth(self, design, tables):
        hits = sum(
            run_trial(design, (0.9, 0.3), RngSpec(2, i), tables=tables,
                      record_trajectory=False).decision.kind is DecisionKind.FUTILITY
            for i in range(200)
        )
        assert hits >= 180

    def test_unreachable_thresholds_reach_n_max(self):
        design = worked_example_design(eps_e=1e-300, eps_f=1e-300, n_max=80, horizon=80)
        for i in range(10):
            res = run_trial(design, (0.5, 0.52), RngSpec(3, i), record_trajectory=False)
            assert res.decision.kind is DecisionKind.INCONCLUSIVE
            assert res.n_enrolled == 80
            assert res.tau is None

    def test_tau_is_min_of_componentwise_times(self, design, tables):
        for i in range(40):
            res = run_trial(design, (0.55, 0.5), RngSpec(21, i), tables=tables)
            first_cross = None
            for n, eff, fut in res.trajectory:
                if eff < design.eps_e or fut < design.eps_f:
                    first_cross = n
                    break
            if res.decision.kind in (DecisionKind.EFFICACY, DecisionKind.FUTILITY):
                assert res.tau == first_cross
            else:
                assert first_cross is None and res.tau is None

    def test_replay_reproduces_decision(self, design, tables):
        # measurability: the decision at tau depends on the data up to tau
        # only, so re-deriving the stream and truncating it reproduces the
        # decision through the stateless interim evaluator
        from seqtrial.mc import DOMAIN_ASSIGNMENT, DOMAIN_OUTCOMES, spawn_generator

        truth, rng = (0.35, 0.75), RngSpec(33, 7)
        res = run_trial(design, truth, rng, tables=tables)
        assert res.decision.kind in (DecisionKind.EFFICACY, DecisionKind.FUTILITY)
        bits = spawn_generator(rng, DOMAIN_ASSIGNMENT).random((design.n_max + 3) // 2) < 0.5
        unif = spawn_generator(rng, DOMAIN_OUTCOMES).random(design.n_max)
        replay = TrialData()
        for n in range(1, res.tau + 1):
            if replay.block_state is None:
                arm = CONTROL if bits[(n - 1) // 2] else EXPERIMENTAL
            else:
                arm = replay.block_state
            theta = truth[1] if arm == EXPERIMENTAL else truth[0]
            replay.append(arm, SUCCESS if unif[n - 1] < theta else FAILURE)
        decision = interim_decision(design, replay, tables)
        assert decision.kind is res.decision.kind
        assert decision.efficacy_tail == pytest.approx(res.decision.efficacy_tail, abs=1e-9)
        assert decision.futility_tail == pytest.approx(res.decision.futility_tail, abs=1e-9)

    def test_efficacy_stop_posterior_guarantee(self, design, tables):
        for i in range(30):
            res = run_trial(design, (0.4, 0.8), RngSpec(44, i), tables=tables,
                            record_trajectory=False)
            if res.decision.kind is DecisionKind.EFFICACY:
                assert 1.0 - res.decision.efficacy_tail > 1.0 - design.eps_e

    def test_eps_monotonicity_same_stream(self, tables):
        # shrinking eps_e never stops earlier on the same outcome stream
        taus = []
        for eps in (0.1, 0.05, 0.02, 0.01):
            design = worked_example_design(eps_e=eps, eps_f=1e-12, n_max=300, horizon=300)
            res = run_trial(design, (0.4, 0.75), RngSpec(55, 3), record_trajectory=False)
            taus.append(res.tau if res.tau is not None else math.inf)
        assert all(b >= a for a, b in zip(taus, taus[1:]))

    def test_burn_in_defers_first_check(self, tables):
        design = worked_example_design(burn_in=20, n_max=60, horizon=60)
        res = run_trial(design, (0.2, 0.9), RngSpec(66, 0))
        assert res.trajectory[0][0] == 20
        assert res.tau is None or res.tau >= 20

    def test_explicit_schedule_checks_only_those_points(self, tables):
        design = worked_example_design(schedule=Schedule(points=(10, 30, 60)), n_max=60, horizon=60)
        res = run_trial(design, (0.3, 0.9), RngSpec(67, 0))
        assert [n for n, _, _ in res.trajectory] == [10, 30, 60][: len(res.trajectory)]
        if res.tau is not None:
            assert res.tau in (10, 30, 60)

    def test_realized_utility_accounting(self, design, tables):
        res = run_trial(design, (0.3, 0.9), RngSpec(1, 0), tables=tables)
        assert res.decision.kind is DecisionKind.EFFICACY
        # truth difference 0.6 > delta: the conclusion is correct
        assert res.terminal_utility == 2500.0
        assert res.realized_utility == 2500.0 - res.n_enrolled
        assert res.sunk_cost == res.n_enrolled

    def test_early_stop_trial_reports_flag(self, design, tables):
        res = run_trial(design, (0.5, 0.52), RngSpec(70, 4), early_stop_enabled=True,
                        tables=tables, record_trajectory=False, forward_reps=100)
        if res.decision.kind is DecisionKind.INCONCLUSIVE and res.n_enrolled < design.n_max:
            assert res.early_stopped
            assert res.terminal_utility == 0.0

    def test_truth_domain(self, design):
        with pytest.raises(DomainError):
            run_trial(design, (0.0, 0.5), RngSpec(0))


class TestForwardConsistency:
    def test_trivial_brackets_recover_stop_probability(self, design, tables):
        # with a unit efficacy bracket, zero futility bracket and no costs,
        # the cumulative utility is exactly the declared-efficacy indicator
        data = drive(TrialData(), [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE)] * 3)
        values, stop_e, stop_f, _ = _forward_replicates(
            design, data, RngSpec(77), tables, 200,
            bracket_e=lambda counts, fut: 1.0,
            bracket_f=lambda counts, fut: 0.0,
            cost=0.0,
        )
        assert float(np.mean(values)) == float(np.mean(stop_e))
        pcu = predictive_cumulative_utility(design, data, RngSpec(77), tables=tables, reps=200)
        assert pcu.stop_prob_efficacy == float(np.mean(stop_e))

    def test_cross_seed_agreement(self, design, tables):
        data = drive(TrialData(), [(EXPERIMENTAL, SUCCESS), (CONTROL, FAILURE)] * 3)
        a = predictive_cumulative_utility(design, data, RngSpec(100), tables=tables, reps=400)
        b = predictive_cumulative_utility(design, data, RngSpec(101), tables=tables, reps=400)
        pooled = math.hypot(a.std_error, b.std_error)
        assert abs(a.value - b.value) < 5 * pooled
