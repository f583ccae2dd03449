/** REST + event-stream client for the audit session service.
 *
 * The event stream is consumed with fetch + ReadableStream rather than
 * EventSource so the same code runs in browsers and in node test runners,
 * and so reconnection can resume from the last seen sequence number.
 */

import type {
  ResultsPayload,
  SessionConfig,
  SessionEvent,
  SessionSnapshot,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new ApiError(response.status, `HTTP ${response.status}: ${await response.text()}`);
  }
  return (await response.json()) as T;
}

export class AuditServiceClient {
  constructor(private baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, '')}${path}`;
  }

  async createSession(config: SessionConfig): Promise<string> {
    const response = await fetch(this.url('/sessions'), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(config),
    });
    const body = await asJson<{ session_id: string }>(response);
    return body.session_id;
  }

  async getState(sessionId: string): Promise<SessionSnapshot> {
    return asJson(await fetch(this.url(`/sessions/${sessionId}`)));
  }

  async postAnswer(sessionId: string, text: string): Promise<void> {
    await asJson(
      await fetch(this.url(`/sessions/${sessionId}/answers`), {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ text }),
      }),
    );
  }

  async postQuestion(sessionId: string, text: string): Promise<string> {
    const body = await asJson<{ answer: string }>(
      await fetch(this.url(`/sessions/${sessionId}/questions`), {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ text }),
      }),
    );
    return body.answer;
  }

  /** null while the audit has not completed (service replies 409). */
  async fetchResults(sessionId: string): Promise<ResultsPayload | null> {
    const response = await fetch(this.url(`/sessions/${sessionId}/results`));
    if (response.status === 409) return null;
    return asJson(response);
  }

  async fetchReport(sessionId: string): Promise<string | null> {
    const response = await fetch(this.url(`/sessions/${sessionId}/report`));
    if (response.status === 409) return null;
    const body = await asJson<{ markdown: string }>(response);
    return body.markdown;
  }

  /**
   * Consume the event stream starting after `after`; resolves when the
   * server closes the stream (it does so after `completed`/`error`).
   */
  async streamEvents(
    sessionId: string,
    after: number,
    onEvent: (event: SessionEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await fetch(
      this.url(`/sessions/${sessionId}/events?after=${after}`),
      { signal },
    );
    if (!response.ok || !response.body) {
      throw new ApiError(response.status, `event stream failed: HTTP ${response.status}`);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder('utf-8');
    let buffer = '';
    for (;;) {
      const { value, done } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      const frames = buffer.split(/\r?\n\r?\n/);
      buffer = frames.pop() ?? '';
      for (const frame of frames) {
        for (const line of frame.split(/\r?\n/)) {
          if (!line.startsWith('data:')) continue;
          try {
            onEvent(JSON.parse(line.slice(5).trim()) as SessionEvent);
          } catch {
            // Non-JSON data lines are dropped; the stream carries only JSON.
          }
        }
      }
    }
  }
}
