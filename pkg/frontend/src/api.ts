// Thin typed client over the labeling service HTTP API.

import type {
  AccuracyRow,
  Choice,
  LabelResponse,
  NextResponse,
  SessionState,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getSession(): Promise<SessionState> {
    return this.request<SessionState>('/api/session');
  }

  getNext(): Promise<NextResponse> {
    return this.request<NextResponse>('/api/session/next');
  }

  postLabel(pairId: string, choice: Choice): Promise<LabelResponse> {
    return this.request<LabelResponse>('/api/session/label', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ pair_id: pairId, label: choice }),
    });
  }

  getAccuracy(): Promise<{ rows: AccuracyRow[] }> {
    return this.request<{ rows: AccuracyRow[] }>('/api/report/accuracy');
  }
}
