import { describe, expect, it } from 'vitest';

import { bannerView, formatTail, gaugeViews, logFraction, whatIfView } from '../src/model';
import { renderApp, renderBanner, renderGauges } from '../src/render';
import { openState, stoppedEfficacyState, whatIfFixture } from './fixtures';

describe('log-scale gauge geometry', () => {
  it('spans 1e-4..1', () => {
    expect(logFraction(1)).toBe(1);
    expect(logFraction(1e-4)).toBe(0);
    expect(logFraction(1e-2)).toBeCloseTo(0.5, 10);
    // clamped below the floor
    expect(logFraction(1e-9)).toBe(0);
  });

  it('formats small tails in scientific notation', () => {
    expect(formatTail(0.04)).toBe('0.0400');
    expect(formatTail(4.147e-6)).toBe('4.15e-6');
    expect(formatTail(0)).toBe('0');
  });
});

describe('gauges render the API values verbatim', () => {
  it('copies tails and thresholds from the state payload', () => {
    const [eff, fut] = gaugeViews(openState());
    expect(eff.value).toBe(0.2024);
    expect(eff.threshold).toBe(0.05);
    expect(eff.crossed).toBe(false);
    expect(fut.value).toBe(0.8333);
  });

  it('marks the efficacy gauge crossed once below the threshold', () => {
    const [eff] = gaugeViews(stoppedEfficacyState());
    expect(eff.crossed).toBe(true);
  });
});

describe('decision banner', () => {
  it('open session shows continue with progress', () => {
    const b = bannerView(openState());
    expect(b.locked).toBe(false);
    expect(b.text).toContain('Continue');
    expect(b.text).toContain('4 of 500');
  });

  it('efficacy stop locks the form and quotes the posterior guarantee', () => {
    const b = bannerView(stoppedEfficacyState());
    expect(b.locked).toBe(true);
    expect(b.kind).toBe('efficacy');
    expect(b.tailText).toBe('0.0402');
    expect(b.guaranteeText).toContain('> 0.95');
  });
});

describe('what-if panel view', () => {
  it('echoes the seed and keeps the std error next to the value', () => {
    const v = whatIfView(whatIfFixture());
    expect(v.headline).toBe('1080.39 ± 60.21');
    expect(v.seedEcho).toBe('seed 42');
    expect(v.stopFlag).toBe(false);
  });

  it('flags negative values as an early-stop recommendation', () => {
    const v = whatIfView(whatIfFixture({ value: -31.8, would_stop_inconclusive: true }));
    expect(v.stopFlag).toBe(true);
  });
});

describe('markup snapshots on mocked responses', () => {
  it('open session', () => {
    expect(renderApp(openState(), null, null)).toMatchSnapshot();
  });

  it('stopped efficacy session with a what-if result', () => {
    expect(renderApp(stoppedEfficacyState(), whatIfFixture(), null)).toMatchSnapshot();
  });

  it('banner and gauges carry machine-readable values', () => {
    const html = renderGauges(stoppedEfficacyState());
    expect(html).toContain('data-value="0.0402"');
    const banner = renderBanner(stoppedEfficacyState());
    expect(banner).toContain('data-locked="true"');
    expect(banner).toContain('0.0402');
  });

  it('entry form is disabled once stopped', () => {
    const html = renderApp(stoppedEfficacyState(), null, null);
    expect(html).toContain('<fieldset class="entry" disabled>');
  });
});
