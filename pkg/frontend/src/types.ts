/** Wire types mirroring the session service's JSON payloads. */

export type EventType =
  | 'message'
  | 'question'
  | 'progress'
  | 'phase'
  | 'completed'
  | 'error';

export interface SessionEvent {
  v: number;
  seq: number;
  type: EventType;
  role?: string;
  phase?: string;
  text?: string;
  fraction?: number;
  status?: string;
  message?: string;
  artifacts?: string;
}

export interface SessionSnapshot {
  session_id: string;
  phase: string;
  pending_question: string | null;
  progress: number;
  done: boolean;
  error: string | null;
  events: number;
}

export interface SessionConfig {
  model: string;
  data: string;
  backend?: string;
  endpoint?: string | null;
  answers?: Record<string, string> | null;
  sample_frac?: number;
  seed?: number;
  parallelism?: number;
}

export interface ResultRow {
  label: string;
  kind: string | null;
  param: number | null;
  error: string | null;
  values: Record<string, number | null>;
}

/** Sign convention: delta < 0 always means degradation (the service already
 * inverts loss-like metrics). */
export interface DeltaCell {
  row: string;
  kind: string | null;
  param: number | null;
  metric: string;
  value: number;
  baseline: number;
  delta: number;
}

export interface ResultsPayload {
  columns: string[];
  baseline: Record<string, number | null>;
  rows: ResultRow[];
  cells: DeltaCell[];
  metadata: Record<string, unknown>;
}

export interface TimelineEntry {
  seq: number;
  role: string;
  phase: string;
  text: string;
}
