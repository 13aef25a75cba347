// Single-page wiring: render into #app, re-render after every interaction,
// poll the state after posts (no push channel needed at committee cadence).

import { CockpitApi } from './api';
import { SessionController } from './controller';
import { renderApp } from './render';
import type { Arm, Outcome } from './types';

const POLL_MS = 4000;

export async function boot(root: HTMLElement, baseUrl: string, sessionId: string,
                           token: string | null = null): Promise<SessionController> {
  const api = new CockpitApi(baseUrl, token);
  const controller = new SessionController(api, await api.getState(sessionId));

  const draw = () => {
    root.innerHTML = renderApp(controller.state, controller.lastWhatIf, controller.whatIfError);
    wire();
  };

  const wire = () => {
    const armSelect = root.querySelector<HTMLSelectElement>('#arm-select');
    const post = (outcome: Outcome) => async () => {
      const arm = (armSelect?.value ?? 'control') as Arm;
      await controller.recordOutcome(arm, outcome);
      draw();
    };
    root.querySelector('#post-success')?.addEventListener('click', post(1));
    root.querySelector('#post-failure')?.addEventListener('click', post(0));
    root.querySelector('#whatif-run')?.addEventListener('click', async () => {
      const seed = Number(root.querySelector<HTMLInputElement>('#whatif-seed')?.value ?? 1);
      const horizon = Number(root.querySelector<HTMLInputElement>('#whatif-horizon')?.value ?? 0);
      const reps = Number(root.querySelector<HTMLInputElement>('#whatif-reps')?.value ?? 300);
      await controller.runWhatIf(seed, horizon || null, reps || null);
      draw();
    });
    root.querySelector('#whatif-retry')?.addEventListener('click', () => {
      controller.whatIfError = null;
      draw();
    });
  };

  draw();
  const timer = setInterval(async () => {
    if (controller.locked) {
      clearInterval(timer);
      return;
    }
    await controller.refresh();
    draw();
  }, POLL_MS);
  return controller;
}

declare global {
  interface Window {
    cockpitBoot: typeof boot;
  }
}

if (typeof window !== 'undefined') {
  window.cockpitBoot = boot;
}
