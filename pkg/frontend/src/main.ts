/** Console bootstrap: session form, event-stream consumption, rendering. */

import { AuditServiceClient } from './api.js';
import { buildChartModel } from './charts.js';
import { renderAnswerBox, renderCharts, renderProgress, renderReport, renderTimeline } from './dom.js';
import { SessionView } from './session.js';
import type { SessionConfig } from './types.js';

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function consumeStream(client: AuditServiceClient, view: SessionView): Promise<void> {
  // Reconnect from the last applied sequence number until the session ends.
  while (!view.done) {
    try {
      await client.streamEvents(view.sessionId, view.lastSeq, (event) => {
        view.applyEvent(event);
      });
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 1000));
    }
  }
}

async function startSession(config: SessionConfig): Promise<void> {
  const serviceUrl = (document.getElementById('service-url') as HTMLInputElement).value;
  const client = new AuditServiceClient(serviceUrl);
  const sessionId = await client.createSession(config);
  const view = new SessionView(sessionId);
  history.replaceState(null, '', `#${sessionId}`);

  const timeline = $('timeline');
  const bar = $('progress-bar');
  const label = $('progress-label');
  const form = $('answer-form') as HTMLFormElement;
  const input = $('answer-input') as HTMLInputElement;
  const prompt = $('prompt');
  const charts = $('charts');
  const report = $('report');

  view.subscribe((v) => {
    renderTimeline(v, timeline);
    renderProgress(v, bar, label);
    renderAnswerBox(v, form, input, prompt);
    if (v.results) renderCharts(buildChartModel(v.results), charts);
    renderReport(v.report, report);
  });

  form.onsubmit = async (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return; // client-side validation: empty submissions blocked
    input.value = '';
    if (view.canAnswer()) {
      await client.postAnswer(sessionId, text);
    } else if (view.canAsk()) {
      view.applyEvent({
        v: 1, seq: view.lastSeq + 1, type: 'message', role: 'user', phase: 'qa', text,
      });
      const answer = await client.postQuestion(sessionId, text);
      view.applyEvent({
        v: 1, seq: view.lastSeq + 1, type: 'message', role: 'mediator', phase: 'qa', text: answer,
      });
    }
  };

  const streaming = consumeStream(client, view);
  await streaming;
  if (!view.error) {
    const results = await client.fetchResults(sessionId);
    if (results) view.attachResults(results);
    const markdown = await client.fetchReport(sessionId);
    if (markdown) view.attachReport(markdown);
  }
}

function wireForm(): void {
  const form = $('session-form') as HTMLFormElement;
  form.onsubmit = (event) => {
    event.preventDefault();
    const value = (id: string) => (document.getElementById(id) as HTMLInputElement).value;
    const config: SessionConfig = {
      model: value('model'),
      data: value('data'),
      backend: value('backend') || 'rubric',
      sample_frac: parseFloat(value('sample-frac') || '0.1'),
      seed: parseInt(value('seed') || '0', 10),
    };
    startSession(config).catch((error) => {
      const banner = $('error-banner');
      banner.textContent = `connection failed: ${error}. Check the service URL and retry.`;
      banner.classList.remove('hidden');
    });
  };
}

wireForm();
