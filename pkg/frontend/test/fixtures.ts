import type { SessionState, WhatIfResult } from '../src/types';

export function openState(overrides: Partial<SessionState> = {}): SessionState {
  return {
    session_id: 'abc123',
    status: 'open',
    seq: 4,
    n: 4,
    efficacy_tail: 0.2024,
    futility_tail: 0.8333,
    decision: { kind: 'continue', n: 4, efficacy_tail: 0.2024, futility_tail: 0.8333 },
    eps_e: 0.05,
    eps_f: 0.05,
    delta: 0.05,
    n_max: 500,
    horizon: 500,
    utilities: {
      gain_efficacy: 2500,
      gain_futility: 500,
      loss_efficacy: 1000,
      loss_futility: 1000,
      cost_per_patient: 1,
      inconclusive_value: 0,
    },
    counts: {
      successes_control: 0,
      failures_control: 2,
      successes_experimental: 2,
      failures_experimental: 0,
    },
    next_assignment: 'control',
    trajectory: [
      [1, 0.3833, 0.6667],
      [2, 0.2024, 0.8333],
      [3, 0.1275, 0.9],
      [4, 0.2024, 0.8333],
    ],
    ...overrides,
  };
}

export function stoppedEfficacyState(): SessionState {
  return openState({
    status: 'stopped',
    seq: 5,
    n: 5,
    efficacy_tail: 0.0402,
    futility_tail: 0.9714,
    decision: { kind: 'efficacy', n: 5, efficacy_tail: 0.0402, futility_tail: 0.9714 },
    next_assignment: null,
  });
}

export function whatIfFixture(overrides: Partial<WhatIfResult> = {}): WhatIfResult {
  return {
    value: 1080.39,
    std_error: 60.21,
    stop_prob_efficacy: 0.407,
    stop_prob_futility: 0.497,
    expected_duration: 92.9,
    forward_reps: 300,
    seed: 42,
    horizon: 500,
    at_n: 0,
    would_stop_inconclusive: false,
    ...overrides,
  };
}
