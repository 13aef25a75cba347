// DOM rendering. Pure functions of the view models so snapshot tests can
// assert the full markup for a mocked API response.

import { bannerView, gaugeViews, trajectoryPoints, whatIfView } from './model';
import type { SessionState, WhatIfResult } from './types';

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function renderDesignSummary(state: SessionState): string {
  const u = state.utilities;
  return `
  <dl class="design">
    <dt>&epsilon;<sub>e</sub></dt><dd>${state.eps_e}</dd>
    <dt>&epsilon;<sub>f</sub></dt><dd>${state.eps_f}</dd>
    <dt>&Delta;</dt><dd>${state.delta}</dd>
    <dt>N<sub>max</sub></dt><dd>${state.n_max}</dd>
    <dt>utilities</dt>
    <dd>G<sub>e</sub>=${u.gain_efficacy} G<sub>f</sub>=${u.gain_futility}
        L<sub>e</sub>=${u.loss_efficacy} L<sub>f</sub>=${u.loss_futility}
        cost=${u.cost_per_patient}</dd>
  </dl>`;
}

export function renderGauges(state: SessionState): string {
  const [eff, fut] = gaugeViews(state);
  const gauge = (g: typeof eff, id: string) => `
  <div class="gauge ${g.crossed ? 'crossed' : ''}" id="gauge-${id}">
    <span class="gauge-label">${esc(g.label)}</span>
    <div class="gauge-track">
      <div class="gauge-fill" style="width:${(g.fraction * 100).toFixed(1)}%"></div>
      <div class="gauge-threshold" style="left:${(g.thresholdFraction * 100).toFixed(1)}%"></div>
    </div>
    <span class="gauge-value" data-value="${g.value}">${esc(g.text)}</span>
  </div>`;
  return gauge(eff, 'efficacy') + gauge(fut, 'futility');
}

export function renderBanner(state: SessionState): string {
  const b = bannerView(state);
  const tail = b.tailText ? `<span class="banner-tail" data-tail>${esc(b.tailText)}</span>` : '';
  const guarantee = b.guaranteeText
    ? `<span class="banner-guarantee">${esc(b.guaranteeText)}</span>`
    : '';
  return `<div class="banner banner-${b.kind}" data-locked="${b.locked}">
    <strong>${esc(b.text)}</strong> ${tail} ${guarantee}
  </div>`;
}

export function renderTrajectory(state: SessionState): string {
  const pts = trajectoryPoints(state);
  if (pts.length === 0) {
    return '<svg class="trajectory" viewBox="0 0 400 120"></svg>';
  }
  const maxN = Math.max(...pts.map((p) => p.n), 1);
  const x = (n: number) => (n / maxN) * 392 + 4;
  const y = (f: number) => 116 - f * 112;
  const path = (key: 'effY' | 'futY') =>
    pts.map((p, i) => `${i === 0 ? 'M' : 'L'}${x(p.n).toFixed(1)},${y(p[key]).toFixed(1)}`).join(' ');
  return `<svg class="trajectory" viewBox="0 0 400 120">
    <path class="line-efficacy" d="${path('effY')}" fill="none"/>
    <path class="line-futility" d="${path('futY')}" fill="none"/>
  </svg>`;
}

export function renderEntryForm(state: SessionState): string {
  const disabled = state.status !== 'open' ? 'disabled' : '';
  const next = state.next_assignment
    ? `<span class="next-arm">block says next: ${esc(state.next_assignment)}</span>`
    : '';
  return `<fieldset class="entry" ${disabled}>
    <legend>record outcome (patient ${state.n + 1})</legend>
    <select id="arm-select">
      <option value="control">control</option>
      <option value="experimental">experimental</option>
    </select>
    <button id="post-success">success</button>
    <button id="post-failure">failure</button>
    ${next}
  </fieldset>`;
}

export function renderWhatIf(result: WhatIfResult | null, error: string | null): string {
  if (error) {
    return `<div class="whatif-result whatif-error">${esc(error)}
      <button id="whatif-retry">retry</button></div>`;
  }
  if (!result) {
    return '<div class="whatif-result whatif-empty">no query yet</div>';
  }
  const v = whatIfView(result);
  const flag = v.stopFlag
    ? '<span class="whatif-stop-flag">inconclusive-stop rule would stop now</span>'
    : '<span class="whatif-continue-flag">worth continuing</span>';
  return `<div class="whatif-result" data-value="${result.value}">
    <strong>${esc(v.headline)}</strong> ${flag}
    <div class="whatif-detail">${esc(v.detail)}</div>
    <div class="whatif-seed">${esc(v.seedEcho)}</div>
  </div>`;
}

export function renderApp(
  state: SessionState,
  whatIf: WhatIfResult | null,
  whatIfError: string | null,
): string {
  return `
  <header><h1>trial cockpit</h1><span class="session-id">${esc(state.session_id)}</span></header>
  <section id="banner">${renderBanner(state)}</section>
  <section id="design">${renderDesignSummary(state)}</section>
  <section id="gauges">${renderGauges(state)}</section>
  <section id="trajectory">${renderTrajectory(state)}</section>
  <section id="entry">${renderEntryForm(state)}</section>
  <section id="whatif">
    <fieldset ${state.status !== 'open' ? 'disabled' : ''}>
      <legend>what if we continue?</legend>
      <label>horizon <input id="whatif-horizon" type="number" value="${state.horizon}"></label>
      <label>replicates <input id="whatif-reps" type="number" value="300"></label>
      <label>seed <input id="whatif-seed" type="number" value="1"></label>
      <button id="whatif-run">run</button>
    </fieldset>
    ${renderWhatIf(whatIf, whatIfError)}
  </section>`;
}
