/** Chart models derived verbatim from the service's results payload.
 *
 * The console computes nothing itself: every plotted number is a value,
 * baseline, or sign-adjusted delta received from the service. Since the
 * service already inverts deltas for loss-like metrics, negative delta
 * uniformly means "worse" and drives the red end of the heatmap scale.
 */

import type { ResultsPayload } from './types.js';

export interface SeriesPoint {
  rowLabel: string;
  param: number | null;
  value: number;
}

export interface ShiftSeries {
  kind: string;
  points: SeriesPoint[];
}

export interface MetricChart {
  metric: string;
  baseline: number | null;
  series: ShiftSeries[];
}

export interface HeatmapCell {
  rowLabel: string;
  metric: string;
  delta: number;
  color: string;
}

export interface ChartModel {
  charts: MetricChart[];
  heatmap: HeatmapCell[];
  rowLabels: string[];
}

/** Linear red (worse) / blue (better) scale on the adjusted delta. */
export function deltaColor(delta: number, scale = 0.25): string {
  const clipped = Math.max(-scale, Math.min(scale, delta)) / scale;
  if (clipped < 0) {
    const strength = Math.round(255 * -clipped);
    return `rgb(255, ${255 - strength}, ${255 - strength})`;
  }
  const strength = Math.round(255 * clipped);
  return `rgb(${255 - strength}, ${255 - strength}, 255)`;
}

export function buildChartModel(results: ResultsPayload): ChartModel {
  const shifted = results.rows.filter((row) => row.kind !== null && !row.error);
  const charts: MetricChart[] = results.columns.map((metric) => {
    const seriesByKind = new Map<string, ShiftSeries>();
    for (const row of shifted) {
      const value = row.values[metric];
      if (value === null || value === undefined) continue;
      let series = seriesByKind.get(row.kind as string);
      if (!series) {
        series = { kind: row.kind as string, points: [] };
        seriesByKind.set(row.kind as string, series);
      }
      series.points.push({ rowLabel: row.label, param: row.param, value });
    }
    return {
      metric,
      baseline: results.baseline[metric] ?? null,
      series: [...seriesByKind.values()],
    };
  });

  const heatmap: HeatmapCell[] = results.cells
    .filter((cell) => cell.row !== 'BASELINE')
    .map((cell) => ({
      rowLabel: cell.row,
      metric: cell.metric,
      delta: cell.delta,
      color: deltaColor(cell.delta),
    }));

  const rowLabels = shifted.map((row) => row.label);
  return { charts, heatmap, rowLabels };
}

export function chartPointCount(chart: MetricChart): number {
  return chart.series.reduce((n, s) => n + s.points.length, 0);
}

/** Points whose value coincides with the baseline reference line. */
export function pointsOnBaseline(chart: MetricChart): SeriesPoint[] {
  if (chart.baseline === null) return [];
  const out: SeriesPoint[] = [];
  for (const series of chart.series) {
    for (const point of series.points) {
      if (point.value === chart.baseline) out.push(point);
    }
  }
  return out;
}
