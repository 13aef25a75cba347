// Cockpit acceptance against a live local service: drive the 10-vs-0
// sequence through the real API, end locked on an Efficacy banner whose
// displayed tail equals the state endpoint's value, and check that a
// fixed-seed what-if renders the same number twice.
//
// Requires the Python package installed (the test spawns the server).

import { spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { CockpitApi } from '../src/api';
import { SessionController } from '../src/controller';
import { renderApp, renderBanner } from '../src/render';
import { whatIfView } from '../src/model';

const PORT = 8741;
const BASE = `http://127.0.0.1:${PORT}`;

const DESIGN = {
  schema_version: 1,
  priors: {
    efficacy: { control: { alpha: 1, beta: 1 }, experimental: { alpha: 1, beta: 1 } },
    futility: { control: { alpha: 1, beta: 1 }, experimental: { alpha: 1, beta: 1 } },
  },
  eps_e: 0.05,
  eps_f: 0.05,
  delta: 0.05,
  n_max: 500,
  horizon: 500,
  schedule: { type: 'every', step: 1 },
  utilities: {
    gain_efficacy: 2500,
    gain_futility: 500,
    loss_efficacy: 1000,
    loss_futility: 1000,
    cost_per_patient: 1,
    inconclusive_value: 0,
  },
  forward_reps: 1000,
  tail_mc_n: 1000,
  burn_in: 0,
};

let server: ChildProcess | null = null;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/docs`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error('service did not come up');
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), 'cockpit-it-'));
  writeFileSync(join(dir, 'unused.json'), '{}');
  server = spawn(
    'python3',
    ['-m', 'seqtrial.cli', 'serve', '--port', String(PORT), '--sessions-dir', join(dir, 's')],
    { stdio: 'ignore' },
  );
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
});

describe('cockpit against the live service', () => {
  it('10-vs-0 entry locks on an Efficacy banner showing the state tail', async () => {
    const api = new CockpitApi(BASE);
    const created = await api.createSession(DESIGN);
    const controller = new SessionController(api, created);

    // scripted entry: control failures and experimental successes until
    // the session stops (the threshold fires well before 10 pairs)
    for (let i = 0; i < 10 && !controller.locked; i++) {
      await controller.recordOutcome('control', 0);
      if (controller.locked) break;
      await controller.recordOutcome('experimental', 1);
    }
    expect(controller.locked).toBe(true);
    expect(controller.state.decision.kind).toBe('efficacy');

    const stateFromApi = await api.getState(controller.state.session_id);
    const banner = renderBanner(controller.state);
    const tailMatch = banner.match(/data-tail>([^<]+)</);
    expect(tailMatch).not.toBeNull();
    // the banner shows exactly the tail the state endpoint reports
    const rendered = Number(tailMatch![1]);
    expect(rendered).toBeCloseTo(stateFromApi.decision.efficacy_tail, 4);
    expect(controller.state.decision.efficacy_tail).toBe(stateFromApi.decision.efficacy_tail);
    // and the entry form is locked
    const app = renderApp(controller.state, null, null);
    expect(app).toContain('<fieldset class="entry" disabled>');
  }, 60_000);

  it('a fixed-seed what-if renders the same number twice', async () => {
    const api = new CockpitApi(BASE);
    const created = await api.createSession(DESIGN);
    const controller = new SessionController(api, created);
    const first = await controller.runWhatIf(42, 500, 200);
    const firstView = whatIfView(first!);
    const second = await controller.runWhatIf(42, 500, 200);
    const secondView = whatIfView(second!);
    expect(first!.value).toBe(second!.value);
    expect(firstView.headline).toBe(secondView.headline);
    expect(firstView.seedEcho).toBe('seed 42');
    expect(first!.value).toBeGreaterThan(0);
  }, 60_000);
});
