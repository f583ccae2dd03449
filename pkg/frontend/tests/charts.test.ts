import { describe, expect, it } from 'vitest';

import { buildChartModel, chartPointCount, deltaColor, pointsOnBaseline } from '../src/charts.js';
import type { ResultsPayload } from '../src/types.js';

/** 1 baseline + 4 shifted rows, 2 metrics; GaussianNoise(0) is the identity
 * parameter so its value equals the baseline exactly. BrierScore is
 * loss-like: it rises under shift but its service-provided delta is already
 * sign-adjusted to negative. */
const FIXTURE: ResultsPayload = {
  columns: ['Accuracy', 'BrierScore'],
  baseline: { Accuracy: 0.98, BrierScore: 0.05 },
  rows: [
    { label: 'BASELINE', kind: null, param: null, error: null,
      values: { Accuracy: 0.98, BrierScore: 0.05 } },
    { label: 'GaussianNoise(0)', kind: 'GaussianNoise', param: 0, error: null,
      values: { Accuracy: 0.98, BrierScore: 0.05 } },
    { label: 'GaussianNoise(0.1)', kind: 'GaussianNoise', param: 0.1, error: null,
      values: { Accuracy: 0.95, BrierScore: 0.07 } },
    { label: 'GaussianNoise(0.3)', kind: 'GaussianNoise', param: 0.3, error: null,
      values: { Accuracy: 0.9, BrierScore: 0.12 } },
    { label: 'GaussianNoise(0.6)', kind: 'GaussianNoise', param: 0.6, error: null,
      values: { Accuracy: 0.82, BrierScore: 0.2 } },
  ],
  cells: [
    { row: 'BASELINE', kind: null, param: null, metric: 'Accuracy', value: 0.98, baseline: 0.98, delta: 0 },
    { row: 'BASELINE', kind: null, param: null, metric: 'BrierScore', value: 0.05, baseline: 0.05, delta: 0 },
    { row: 'GaussianNoise(0)', kind: 'GaussianNoise', param: 0, metric: 'Accuracy', value: 0.98, baseline: 0.98, delta: 0 },
    { row: 'GaussianNoise(0)', kind: 'GaussianNoise', param: 0, metric: 'BrierScore', value: 0.05, baseline: 0.05, delta: 0 },
    { row: 'GaussianNoise(0.1)', kind: 'GaussianNoise', param: 0.1, metric: 'Accuracy', value: 0.95, baseline: 0.98, delta: -0.03 },
    { row: 'GaussianNoise(0.1)', kind: 'GaussianNoise', param: 0.1, metric: 'BrierScore', value: 0.07, baseline: 0.05, delta: -0.02 },
    { row: 'GaussianNoise(0.3)', kind: 'GaussianNoise', param: 0.3, metric: 'Accuracy', value: 0.9, baseline: 0.98, delta: -0.08 },
    { row: 'GaussianNoise(0.3)', kind: 'GaussianNoise', param: 0.3, metric: 'BrierScore', value: 0.12, baseline: 0.05, delta: -0.07 },
    { row: 'GaussianNoise(0.6)', kind: 'GaussianNoise', param: 0.6, metric: 'Accuracy', value: 0.82, baseline: 0.98, delta: -0.16 },
    { row: 'GaussianNoise(0.6)', kind: 'GaussianNoise', param: 0.6, metric: 'BrierScore', value: 0.2, baseline: 0.05, delta: -0.15 },
  ],
  metadata: {},
};

describe('buildChartModel', () => {
  it('produces one series per metric per shift kind with all grid points', () => {
    const model = buildChartModel(FIXTURE);
    expect(model.charts).toHaveLength(2);
    for (const chart of model.charts) {
      expect(chart.series).toHaveLength(1);
      expect(chart.series[0].kind).toBe('GaussianNoise');
      expect(chart.series[0].points).toHaveLength(4);
      expect(chart.baseline).not.toBeNull();
    }
  });

  it('identity-parameter points coincide with the baseline reference line', () => {
    const model = buildChartModel(FIXTURE);
    for (const chart of model.charts) {
      const onBaseline = pointsOnBaseline(chart);
      expect(onBaseline.map((p) => p.rowLabel)).toContain('GaussianNoise(0)');
    }
  });

  it('chart point count equals the number of shifted result rows', () => {
    const model = buildChartModel(FIXTURE);
    const shiftedRows = FIXTURE.rows.filter((r) => r.kind !== null).length;
    for (const chart of model.charts) {
      expect(chartPointCount(chart)).toBe(shiftedRows);
    }
  });

  it('loss-like metrics that rose still map to the red (worse) scale', () => {
    const model = buildChartModel(FIXTURE);
    const brierCell = model.heatmap.find(
      (c) => c.rowLabel === 'GaussianNoise(0.6)' && c.metric === 'BrierScore',
    );
    expect(brierCell).toBeDefined();
    expect(brierCell!.delta).toBeLessThan(0);
    const [r, g, b] = brierCell!.color.match(/\d+/g)!.map(Number);
    expect(r).toBeGreaterThan(g);
    expect(r).toBeGreaterThan(b - 1);
  });

  it('delta colors are neutral at zero and saturate red downward', () => {
    expect(deltaColor(0)).toBe('rgb(255, 255, 255)');
    expect(deltaColor(-1)).toBe('rgb(255, 0, 0)');
    expect(deltaColor(0.5)).toBe('rgb(0, 0, 255)');
  });

  it('rows with errors are excluded from series', () => {
    const withError: ResultsPayload = {
      ...FIXTURE,
      rows: [
        ...FIXTURE.rows,
        { label: 'MotionBlur(5)', kind: 'MotionBlur', param: 5,
          error: 'adapter failed', values: {} },
      ],
    };
    const model = buildChartModel(withError);
    for (const chart of model.charts) {
      expect(chart.series.map((s) => s.kind)).not.toContain('MotionBlur');
    }
  });
});
