/** DOM rendering for the console: chat timeline, inputs, charts, report. */

import type { MetricChart, ChartModel } from './charts.js';
import type { SessionView } from './session.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderTimeline(view: SessionView, container: HTMLElement): void {
  container.replaceChildren();
  for (const entry of view.timeline) {
    const item = el('div', `msg msg-${entry.role}`);
    item.append(el('span', 'msg-role', `${entry.role} · ${entry.phase}`));
    item.append(el('pre', 'msg-text', entry.text));
    container.append(item);
  }
  container.scrollTop = container.scrollHeight;
}

export function renderProgress(view: SessionView, bar: HTMLElement, label: HTMLElement): void {
  bar.style.width = `${Math.round(view.progress * 100)}%`;
  label.textContent = view.error
    ? `error: ${view.error}`
    : view.done
      ? 'audit complete'
      : `${view.phase} · ${Math.round(view.progress * 100)}%`;
}

export function renderAnswerBox(
  view: SessionView,
  form: HTMLFormElement,
  input: HTMLInputElement,
  prompt: HTMLElement,
): void {
  const pending = view.pendingQuestion;
  prompt.textContent = pending ?? (view.done ? 'Ask a follow-up question.' : 'Waiting for the agent…');
  const enabled = view.canAnswer() || view.canAsk();
  input.disabled = !enabled;
  (form.querySelector('button') as HTMLButtonElement).disabled = !enabled;
}

function lineChartSvg(chart: MetricChart, width = 420, height = 180): SVGSVGElement {
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  svg.setAttribute('width', String(width));
  svg.setAttribute('height', String(height));
  svg.setAttribute('class', 'chart');

  const values = chart.series.flatMap((s) => s.points.map((p) => p.value));
  if (chart.baseline !== null) values.push(chart.baseline);
  if (values.length === 0) return svg;
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = 18;
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  const y = (v: number) =>
    hi === lo ? pad + innerH / 2 : pad + innerH * (1 - (v - lo) / (hi - lo));

  if (chart.baseline !== null) {
    const base = document.createElementNS('http://www.w3.org/2000/svg', 'line');
    base.setAttribute('x1', String(pad));
    base.setAttribute('x2', String(width - pad));
    base.setAttribute('y1', String(y(chart.baseline)));
    base.setAttribute('y2', String(y(chart.baseline)));
    base.setAttribute('class', 'baseline');
    base.setAttribute('stroke-dasharray', '5,4');
    svg.append(base);
  }

  const palette = ['#2563eb', '#db2777', '#16a34a', '#ea580c', '#7c3aed', '#0891b2'];
  chart.series.forEach((series, idx) => {
    const n = series.points.length;
    const x = (i: number) => (n === 1 ? width / 2 : pad + (innerW * i) / (n - 1));
    const path = series.points.map((p, i) => `${x(i)},${y(p.value)}`).join(' ');
    const line = document.createElementNS('http://www.w3.org/2000/svg', 'polyline');
    line.setAttribute('points', path);
    line.setAttribute('fill', 'none');
    line.setAttribute('stroke', palette[idx % palette.length]);
    line.setAttribute('stroke-width', '2');
    svg.append(line);
    series.points.forEach((p, i) => {
      const dot = document.createElementNS('http://www.w3.org/2000/svg', 'circle');
      dot.setAttribute('cx', String(x(i)));
      dot.setAttribute('cy', String(y(p.value)));
      dot.setAttribute('r', '3.5');
      dot.setAttribute('fill', palette[idx % palette.length]);
      const title = document.createElementNS('http://www.w3.org/2000/svg', 'title');
      title.textContent = `${p.rowLabel}: ${p.value.toFixed(4)}`;
      dot.append(title);
      svg.append(dot);
    });
  });
  return svg;
}

export function renderCharts(model: ChartModel, container: HTMLElement): void {
  container.replaceChildren();
  for (const chart of model.charts) {
    const card = el('div', 'chart-card');
    card.append(el('h3', undefined, chart.metric));
    card.append(lineChartSvg(chart));
    const legend = el('div', 'legend');
    for (const series of chart.series) legend.append(el('span', 'legend-item', series.kind));
    if (chart.baseline !== null) {
      legend.append(el('span', 'legend-item legend-baseline', `baseline ${chart.baseline.toFixed(4)}`));
    }
    card.append(legend);
    container.append(card);
  }

  if (model.heatmap.length > 0) {
    const metrics = [...new Set(model.heatmap.map((c) => c.metric))];
    const table = el('table', 'heatmap');
    const head = el('tr');
    head.append(el('th', undefined, 'shift'));
    for (const metric of metrics) head.append(el('th', undefined, metric));
    table.append(head);
    for (const rowLabel of model.rowLabels) {
      const tr = el('tr');
      tr.append(el('td', undefined, rowLabel));
      for (const metric of metrics) {
        const cell = model.heatmap.find((c) => c.rowLabel === rowLabel && c.metric === metric);
        const td = el('td', 'heatmap-cell', cell ? cell.delta.toFixed(4) : '');
        if (cell) td.style.backgroundColor = cell.color;
        tr.append(td);
      }
      table.append(tr);
    }
    const card = el('div', 'chart-card');
    card.append(el('h3', undefined, 'Degradation deltas (red = worse)'));
    card.append(table);
    container.append(card);
  }
}

export function renderReport(markdown: string | null, container: HTMLElement): void {
  container.replaceChildren();
  if (markdown) container.append(el('pre', 'report', markdown));
}
