// API payload types mirroring the labeling service. The UI keeps no label
// state of its own beyond the in-flight choice; these shapes are the contract.

export type Label = -1 | 0 | 1;
export type Choice = Label | 'illegible';

export interface RetrainEvent {
  iteration: number;
  outcome: 'trained' | 'skipped';
  cv_accuracy: number | null;
}

export interface SessionState {
  session_id: string;
  strategy: 'manual' | 'active_ml';
  iteration: number;
  max_iterations: number;
  batch_size: number;
  total_pairs: number;
  labeled_manual: number;
  removed: number;
  queued: number;
  retraining: boolean;
  complete: boolean;
  retrain_events: RetrainEvent[];
}

export interface PairProgress {
  iteration: number;
  max_iterations: number;
  labeled: number;
  queued: number;
  total: number;
}

export interface Lineage {
  origin: string | null;
  ablated: string[];
  context: Record<string, unknown> | null;
  rng_seed: number | null;
}

export interface PairView {
  pair_id: string;
  left_spec: unknown;
  right_spec: unknown;
  left_render: Record<string, unknown>;
  right_render: Record<string, unknown>;
  label: Label | null;
  source: string;
  group: string | null;
  lineage: Lineage | null;
  illegible: boolean;
  illegible_reason: string | null;
  progress: PairProgress;
}

export type NextResponse =
  | { status: 'ok'; pair: PairView }
  | { status: 'retraining' }
  | { status: 'complete'; session: SessionState };

export interface LabelResponse {
  status: string;
  retraining: boolean;
  session: SessionState;
}

export interface AccuracyRow {
  slice: string;
  value: string;
  n: number;
  accuracy: number | null;
}
