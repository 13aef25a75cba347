// Session controller: optimistic sequence numbers, post-then-poll refresh,
// and conflict handling that surfaces as a terminal banner rather than a
// silent failure.

import { ApiConflictError, CockpitApi } from './api';
import type { Arm, Outcome, SessionState, WhatIfResult } from './types';

export class SessionController {
  state: SessionState;
  lastWhatIf: WhatIfResult | null = null;
  whatIfError: string | null = null;

  constructor(private api: CockpitApi, initial: SessionState) {
    this.state = initial;
  }

  get locked(): boolean {
    return this.state.status !== 'open';
  }

  async recordOutcome(arm: Arm | null, outcome: Outcome): Promise<SessionState> {
    const seq = this.state.seq + 1; // optimistic: the server validates
    try {
      this.state = await this.api.postOutcome(this.state.session_id, seq, outcome, arm);
    } catch (err) {
      if (err instanceof ApiConflictError) {
        // somebody else closed or advanced the session: resync and show
        // the terminal state instead of failing silently
        this.state = await this.api.getState(this.state.session_id);
        return this.state;
      }
      throw err;
    }
    return this.state;
  }

  async refresh(): Promise<SessionState> {
    this.state = await this.api.getState(this.state.session_id);
    return this.state;
  }

  async runWhatIf(
    seed: number,
    horizon: number | null,
    forwardReps: number | null,
  ): Promise<WhatIfResult | null> {
    this.whatIfError = null;
    try {
      this.lastWhatIf = await this.api.whatIf(this.state.session_id, seed, horizon, forwardReps);
    } catch (err) {
      this.lastWhatIf = null;
      this.whatIfError = err instanceof Error ? err.message : String(err);
    }
    return this.lastWhatIf;
  }
}
