// Labeling session state machine.
//
// One decision per screen, a single in-flight submission at a time,
// optimistic advance with server reconciliation. Every displayed pair comes
// from GET /api/session/next; the client never reorders the queue and holds
// no label state beyond the pending choice, so a page reload always
// reproduces the server-side session.

import { ApiClient, ApiError } from './api';
import type { Choice, PairView, SessionState } from './types';

export type Phase =
  | 'idle'
  | 'loading'
  | 'ready'
  | 'submitting'
  | 'retraining'
  | 'complete'
  | 'error';

export interface ControllerState {
  phase: Phase;
  pair: PairView | null;
  session: SessionState | null;
  pendingChoice: Choice | null;
  notice: string | null; // transient banner text (conflicts, retries)
}

export interface ControllerOptions {
  pollMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class SessionController {
  private state: ControllerState = {
    phase: 'idle',
    pair: null,
    session: null,
    pendingChoice: null,
    notice: null,
  };

  private listeners: Array<(s: ControllerState) => void> = [];
  private readonly pollMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    private readonly api: ApiClient,
    options: ControllerOptions = {},
  ) {
    this.pollMs = options.pollMs ?? 400;
    this.sleep = options.sleep ?? defaultSleep;
  }

  onChange(listener: (s: ControllerState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  get current(): ControllerState {
    return this.state;
  }

  private update(patch: Partial<ControllerState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  async start(): Promise<void> {
    const session = await this.api.getSession();
    this.update({ session });
    await this.refresh();
  }

  /** Pull the next pair, waiting out any retraining window. */
  async refresh(): Promise<void> {
    this.update({ phase: 'loading', pendingChoice: null });
    for (;;) {
      const next = await this.api.getNext();
      if (next.status === 'retraining') {
        this.update({ phase: 'retraining', pair: null });
        await this.sleep(this.pollMs);
        continue;
      }
      if (next.status === 'complete') {
        this.update({ phase: 'complete', pair: null, session: next.session });
        return;
      }
      this.update({ phase: 'ready', pair: next.pair, notice: this.state.notice });
      return;
    }
  }

  /** Submit the choice for the displayed pair; resolves once the next pair
   * (or a terminal state) is on screen. */
  async submit(choice: Choice): Promise<void> {
    if (this.state.phase !== 'ready' && this.state.phase !== 'error') return;
    const pair = this.state.pair;
    if (!pair) return;
    this.update({ phase: 'submitting', pendingChoice: choice, notice: null });
    try {
      const response = await this.api.postLabel(pair.pair_id, choice);
      this.update({ session: response.session, pendingChoice: null });
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // someone already labeled it: refresh and skip
        this.update({
          notice: 'Pair was already labeled elsewhere; skipped.',
          pendingChoice: null,
        });
        await this.refresh();
        return;
      }
      // network failure or server error: keep the pair and the choice so the
      // user can retry without losing the decision
      this.update({
        phase: 'error',
        notice: 'Submission failed; your choice was kept. Retry when ready.',
      });
    }
  }

  /** Re-submit the choice kept after a failed submission. */
  async retry(): Promise<void> {
    const choice = this.state.pendingChoice;
    if (this.state.phase !== 'error' || choice === null) return;
    await this.submit(choice);
  }
}
