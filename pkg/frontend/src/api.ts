// Thin typed client for the session endpoints. The fetch implementation is
// injectable so tests can run against mocks or a live server alike.

import type { Arm, Outcome, SessionState, WhatIfResult } from './types';

export class ApiConflictError extends Error {
  constructor(public detail: string) {
    super(detail);
  }
}

export class ApiRequestError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = typeof fetch;

export class CockpitApi {
  constructor(
    private baseUrl: string,
    private token: string | null = null,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    if (res.status === 409) {
      const body = (await res.json()) as { detail?: string };
      throw new ApiConflictError(body.detail ?? 'conflict');
    }
    if (!res.ok) {
      const text = await res.text();
      throw new ApiRequestError(res.status, text);
    }
    return res.json();
  }

  createSession(design: unknown, assignmentSeed = 0): Promise<SessionState> {
    return this.request('/sessions', {
      method: 'POST',
      body: JSON.stringify({ design, assignment_seed: assignmentSeed }),
    }) as Promise<SessionState>;
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/state`) as Promise<SessionState>;
  }

  postOutcome(
    sessionId: string,
    seq: number,
    outcome: Outcome,
    arm: Arm | null,
  ): Promise<SessionState> {
    const body: Record<string, unknown> = { seq, outcome };
    if (arm !== null) body.arm = arm;
    return this.request(`/sessions/${sessionId}/outcomes`, {
      method: 'POST',
      body: JSON.stringify(body),
    }) as Promise<SessionState>;
  }

  whatIf(
    sessionId: string,
    seed: number,
    horizon: number | null,
    forwardReps: number | null,
  ): Promise<WhatIfResult> {
    const body: Record<string, unknown> = { seed };
    if (horizon !== null) body.horizon = horizon;
    if (forwardReps !== null) body.forward_reps = forwardReps;
    return this.request(`/sessions/${sessionId}/whatif`, {
      method: 'POST',
      body: JSON.stringify(body),
    }) as Promise<WhatIfResult>;
  }

  getLog(sessionId: string): Promise<{ session_id: string; events: unknown[] }> {
    return this.request(`/sessions/${sessionId}/log`) as Promise<{
      session_id: string;
      events: unknown[];
    }>;
  }
}
