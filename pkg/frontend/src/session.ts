/** Client-side session state, rebuilt purely from the event stream.
 *
 * The timeline is strictly append-only and keyed by event sequence number,
 * so replaying the stream after a reconnect reconstructs an identical view
 * (duplicate or stale events are ignored).
 */

import type { ResultsPayload, SessionEvent, TimelineEntry } from './types.js';

export type SessionListener = (view: SessionView) => void;

export class SessionView {
  sessionId: string;
  timeline: TimelineEntry[] = [];
  pendingQuestion: string | null = null;
  phase = 'fingerprint';
  progress = 0;
  done = false;
  error: string | null = null;
  results: ResultsPayload | null = null;
  report: string | null = null;
  lastSeq = -1;

  private listeners: SessionListener[] = [];

  constructor(sessionId: string) {
    this.sessionId = sessionId;
  }

  subscribe(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  /** Apply one stream event; returns false for duplicates/out-of-order. */
  applyEvent(event: SessionEvent): boolean {
    if (event.seq <= this.lastSeq) return false;
    this.lastSeq = event.seq;
    switch (event.type) {
      case 'message':
        this.timeline.push({
          seq: event.seq,
          role: event.role ?? 'mediator',
          phase: event.phase ?? this.phase,
          text: event.text ?? '',
        });
        // A new agent message supersedes any stale pending prompt.
        if (event.role !== 'user') this.pendingQuestion = null;
        break;
      case 'question':
        this.pendingQuestion = event.text ?? '';
        break;
      case 'progress':
        this.progress = event.fraction ?? this.progress;
        break;
      case 'phase':
        if (event.status === 'started' && event.phase) this.phase = event.phase;
        break;
      case 'completed':
        this.done = true;
        this.phase = 'qa';
        this.pendingQuestion = null;
        break;
      case 'error':
        this.done = true;
        this.error = event.message ?? 'unknown error';
        break;
    }
    this.emit();
    return true;
  }

  attachResults(results: ResultsPayload): void {
    this.results = results;
    this.emit();
  }

  attachReport(markdown: string): void {
    this.report = markdown;
    this.emit();
  }

  /** Input gating: answers only while a question is pending. */
  canAnswer(): boolean {
    return this.pendingQuestion !== null && !this.done;
  }

  /** Follow-up questions only once the audit reached the qa phase. */
  canAsk(): boolean {
    return this.done && this.error === null && this.phase === 'qa';
  }
}
