/**
 * Scripted end-to-end session against a real rubric-backend service:
 * answers every clarifying question, watches the audit complete, and checks
 * the chart model against the returned results.
 */

import { ChildProcess, spawn, spawnSync } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { AuditServiceClient } from '../src/api.js';
import { buildChartModel, chartPointCount, pointsOnBaseline } from '../src/charts.js';
import { SessionView } from '../src/session.js';

const PORT = 8000 + Math.floor(Math.random() * 20000);
const BASE_URL = `http://127.0.0.1:${PORT}`;

/** Keyword table answering the rubric backend's fixed questionnaire. */
const ANSWER_RULES: Array<[RegExp, string]> = [
  [/binary, multi-class, or multi-label/i, 'binary'],
  [/compensate/i, 'no'],
  [/highly imbalanced/i, 'no'],
  [/imbalanced/i, 'no'],
  [/unequal|severity/i, 'no'],
  [/false positives|false negatives/i, 'neither'],
  [/compare calibration|calibration methods/i, 'no'],
  [/calibration/i, 'no'],
  [/probabilistic/i, 'no'],
  [/equipment|vendor/i, 'none'],
  [/compression/i, 'none'],
  [/illumination|lighting/i, 'none'],
  [/demographic/i, 'none'],
];

function answerFor(question: string): string {
  for (const [pattern, answer] of ANSWER_RULES) {
    if (pattern.test(question)) return answer;
  }
  return 'none';
}

let service: ChildProcess | null = null;
let manifest = '';

async function waitForService(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE_URL}/sessions/probe`);
      if (response.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error('service did not become ready');
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), 'console-data-'));
  const generated = spawnSync('python3', [
    '-c',
    'from driftaudit.io import make_brightness_dataset; ' +
      `print(make_brightness_dataset(r'${dataDir}', n=60, seed=8))`,
  ], { encoding: 'utf-8' });
  if (generated.status !== 0) {
    throw new Error(`dataset generation failed: ${generated.stderr}`);
  }
  manifest = generated.stdout.trim();

  const workdir = mkdtempSync(join(tmpdir(), 'console-sessions-'));
  service = spawn('python3', [
    '-m', 'driftaudit.cli', 'serve',
    '--serve-port', String(PORT),
    '--workdir', workdir,
  ], { stdio: 'ignore' });
  await waitForService();
}, 60000);

afterAll(() => {
  service?.kill();
});

describe('console walkthrough against a rubric-backend service', () => {
  it('answers every question, sees completion, and charts match results', async () => {
    const client = new AuditServiceClient(BASE_URL);
    const sessionId = await client.createSession({
      model: 'toy:brightness',
      data: manifest,
      backend: 'rubric',
      sample_frac: 1.0,
      seed: 3,
    });
    const view = new SessionView(sessionId);

    const answered: string[] = [];
    view.subscribe(async (v) => {
      if (v.pendingQuestion && v.canAnswer()) {
        const question = v.pendingQuestion;
        v.pendingQuestion = null; // consumed; the next event re-arms it
        answered.push(question);
        await client.postAnswer(sessionId, answerFor(question));
      }
    });

    await client.streamEvents(sessionId, -1, (event) => view.applyEvent(event));

    expect(view.error).toBeNull();
    expect(view.done).toBe(true);
    expect(view.progress).toBe(1.0);
    expect(answered.length).toBeGreaterThanOrEqual(14); // 9 fingerprint + 5 profile
    expect(view.timeline.length).toBeGreaterThan(0);

    const results = await client.fetchResults(sessionId);
    expect(results).not.toBeNull();
    view.attachResults(results!);

    const model = buildChartModel(results!);
    const shiftedRows = results!.rows.filter((r) => r.kind !== null).length;
    expect(model.charts.length).toBe(results!.columns.length);
    for (const chart of model.charts) {
      expect(chartPointCount(chart)).toBe(shiftedRows);
    }

    // The default rubric plan includes GaussianNoise(0): its point must sit
    // exactly on the baseline reference line.
    const accuracy = model.charts.find((c) => c.metric === 'Accuracy');
    expect(accuracy).toBeDefined();
    const identityPoints = pointsOnBaseline(accuracy!).map((p) => p.rowLabel);
    expect(identityPoints).toContain('GaussianNoise(0)');

    const report = await client.fetchReport(sessionId);
    expect(report).toContain('# Model audit report');

    const followUp = await client.postQuestion(sessionId, 'Which shift hurt most?');
    expect(followUp.length).toBeGreaterThan(0);
  }, 120000);
});
