// Pure view-model transforms. Everything here is presentation: formatting
// and display geometry for numbers the API already computed. No posterior
// math happens on the client.

import type { SessionState, WhatIfResult } from './types';

export interface GaugeView {
  label: string;
  value: number;          // the API-provided tail, displayed verbatim
  threshold: number;      // the design threshold from the same response
  fraction: number;       // 0..1 position on the log-scale gauge
  thresholdFraction: number;
  crossed: boolean;
  text: string;
}

// gauges span [1e-4, 1] on a log scale: tails travel from 0.5 toward the
// small thresholds as evidence accumulates
const GAUGE_FLOOR = 1e-4;

export function logFraction(p: number): number {
  const clamped = Math.min(1, Math.max(GAUGE_FLOOR, p));
  return 1 - Math.log(clamped) / Math.log(GAUGE_FLOOR);
}

export function formatTail(p: number): string {
  if (p === 0) return '0';
  if (p >= 0.01) return p.toFixed(4);
  return p.toExponential(2);
}

export function gaugeViews(state: SessionState): [GaugeView, GaugeView] {
  const eff: GaugeView = {
    label: `P(diff ≤ ${state.delta}) vs εe`,
    value: state.efficacy_tail,
    threshold: state.eps_e,
    fraction: logFraction(state.efficacy_tail),
    thresholdFraction: logFraction(state.eps_e),
    crossed: state.efficacy_tail < state.eps_e,
    text: formatTail(state.efficacy_tail),
  };
  const fut: GaugeView = {
    label: 'P(diff ≥ 0) vs εf',
    value: state.futility_tail,
    threshold: state.eps_f,
    fraction: logFraction(state.futility_tail),
    thresholdFraction: logFraction(state.eps_f),
    crossed: state.futility_tail < state.eps_f,
    text: formatTail(state.futility_tail),
  };
  return [eff, fut];
}

export interface BannerView {
  kind: string;
  text: string;
  locked: boolean;
  tailText: string | null;  // the decisive tail, straight from the response
  guaranteeText: string | null;
}

export function bannerView(state: SessionState): BannerView {
  const d = state.decision;
  if (state.status === 'open') {
    return {
      kind: 'continue',
      text: `Continue — ${state.n} of ${state.n_max} patients observed`,
      locked: false,
      tailText: null,
      guaranteeText: null,
    };
  }
  if (d.kind === 'efficacy') {
    return {
      kind: 'efficacy',
      text: `Efficacy declared at n = ${d.n}`,
      locked: true,
      tailText: formatTail(d.efficacy_tail),
      guaranteeText: `P(diff > ${state.delta} | data) > ${1 - state.eps_e}`,
    };
  }
  if (d.kind === 'futility') {
    return {
      kind: 'futility',
      text: `Futility declared at n = ${d.n}`,
      locked: true,
      tailText: formatTail(d.futility_tail),
      guaranteeText: `P(diff < 0 | data) > ${1 - state.eps_f}`,
    };
  }
  return {
    kind: 'inconclusive',
    text: `Inconclusive at n = ${d.n}`,
    locked: true,
    tailText: null,
    guaranteeText: null,
  };
}

export interface TrajectoryPoint {
  n: number;
  effY: number;  // 0..1 vertical position on the log-scale chart
  futY: number;
}

export function trajectoryPoints(state: SessionState): TrajectoryPoint[] {
  return state.trajectory.map(([n, eff, fut]) => ({
    n,
    effY: logFraction(eff),
    futY: logFraction(fut),
  }));
}

export interface WhatIfView {
  headline: string;
  detail: string;
  stopFlag: boolean;
  seedEcho: string;
}

export function whatIfView(result: WhatIfResult): WhatIfView {
  const sign = result.value < 0;
  return {
    headline: `${result.value.toFixed(2)} ± ${result.std_error.toFixed(2)}`,
    detail:
      `P(stop for efficacy) ${result.stop_prob_efficacy.toFixed(3)}, ` +
      `P(stop for futility) ${result.stop_prob_futility.toFixed(3)}, ` +
      `expected additional patients ${result.expected_duration.toFixed(1)} ` +
      `(horizon ${result.horizon}, ${result.forward_reps} replicates)`,
    stopFlag: sign,
    seedEcho: `seed ${result.seed}`,
  };
}
