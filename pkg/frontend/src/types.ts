// Wire types of the monitoring API. Every number shown in the UI comes from
// one of these payloads; the cockpit never derives statistics locally.

export type Arm = 'control' | 'experimental';
export type Outcome = 0 | 1;

export interface DecisionInfo {
  kind: 'efficacy' | 'futility' | 'continue' | 'inconclusive';
  n: number;
  efficacy_tail: number;
  futility_tail: number;
}

export interface UtilityInfo {
  gain_efficacy: number;
  gain_futility: number;
  loss_efficacy: number;
  loss_futility: number;
  cost_per_patient: number;
  inconclusive_value: number;
}

export interface SessionState {
  session_id: string;
  status: 'open' | 'stopped';
  seq: number;
  n: number;
  efficacy_tail: number;
  futility_tail: number;
  decision: DecisionInfo;
  eps_e: number;
  eps_f: number;
  delta: number;
  n_max: number;
  horizon: number;
  utilities: UtilityInfo;
  counts: {
    successes_control: number;
    failures_control: number;
    successes_experimental: number;
    failures_experimental: number;
  };
  next_assignment: Arm | null;
  trajectory: [number, number, number][];
}

export interface WhatIfResult {
  value: number;
  std_error: number;
  stop_prob_efficacy: number;
  stop_prob_futility: number;
  expected_duration: number;
  forward_reps: number;
  seed: number;
  horizon: number;
  at_n: number;
  would_stop_inconclusive: boolean;
}

export interface ApiError {
  status: number;
  detail: string;
}
