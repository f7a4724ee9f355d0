/**
 * Inline SVG interpreter for the service's chart-spec schema.
 *
 * The renderer draws exactly what the spec says: marks from the layer
 * list, positions from inlineData, tick budgets and label elision from the
 * encodings (the service bakes the size-class variant into them), legend
 * only when the color encoding asks for one. It never aggregates,
 * rounds, or otherwise derives numbers of its own.
 */

import type { ChartSpec, ColorEncoding, DataRow, Encodings, Layer } from './types.js';

const DEFAULT_COLORS = [
  '#4c78a8', '#f58518', '#54a24b', '#e45756', '#72b7b2',
  '#eeca3b', '#b279a2', '#ff9da6', '#9d755d', '#bab0ac',
];

const MARGIN = { top: 12, right: 12, bottom: 34, left: 44 };
const LEGEND_HEIGHT = 18;

interface Scale {
  (value: string | number | null): number;
  ticks: { position: number; label: string }[];
  bandwidth: number;
}

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function elide(label: string, limit: number | null): string {
  if (limit === null || label.length <= limit) return label;
  return label.slice(0, limit);
}

function limitTicks<T>(items: T[], maxTicks: number | null): T[] {
  if (maxTicks === null || items.length <= maxTicks) return items;
  if (maxTicks <= 1) return items.slice(0, 1);
  const picked: T[] = [];
  const step = (items.length - 1) / (maxTicks - 1);
  for (let i = 0; i < maxTicks; i += 1) {
    const index = Math.round(i * step);
    const item = items[index];
    if (item !== undefined && !picked.includes(item)) picked.push(item);
  }
  return picked;
}

function categoricalScale(values: string[], rangeStart: number, rangeEnd: number,
                          maxTicks: number | null, labelLimit: number | null): Scale {
  const span = rangeEnd - rangeStart;
  const band = values.length > 0 ? span / values.length : span;
  const positions = new Map(values.map((v, i) => [v, rangeStart + band * i + band / 2]));
  const scale = ((value: string | number | null) =>
    positions.get(String(value)) ?? rangeStart) as Scale;
  scale.bandwidth = band * 0.8;
  scale.ticks = limitTicks(values, maxTicks).map((v) => ({
    position: positions.get(v) ?? rangeStart,
    label: elide(v, labelLimit),
  }));
  return scale;
}

function linearScale(lo: number, hi: number, rangeStart: number, rangeEnd: number,
                     maxTicks: number | null): Scale {
  if (lo === hi) {
    lo = lo === 0 ? -1 : lo - Math.abs(lo) * 0.5;
    hi = hi === 0 ? 1 : hi + Math.abs(hi) * 0.5;
  }
  const scale = ((value: string | number | null) => {
    const v = typeof value === 'number' ? value : parseFloat(String(value));
    return rangeStart + ((v - lo) / (hi - lo)) * (rangeEnd - rangeStart);
  }) as Scale;
  scale.bandwidth = 0;
  const budget = maxTicks === null ? 5 : Math.max(2, maxTicks);
  const ticks: { position: number; label: string }[] = [];
  for (let i = 0; i < budget; i += 1) {
    const v = lo + ((hi - lo) * i) / (budget - 1);
    ticks.push({ position: scale(v), label: formatTick(v) });
  }
  scale.ticks = limitTicks(ticks, maxTicks);
  return scale;
}

function formatTick(v: number): string {
  // Display-only shortening of axis guide values (not data values).
  if (Math.abs(v) >= 1000) return `${Math.round(v / 100) / 10}k`;
  return `${Math.round(v * 100) / 100}`;
}

function numericExtent(rows: DataRow[], fields: string[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of rows) {
    for (const field of fields) {
      const value = row[field];
      if (typeof value === 'number') {
        lo = Math.min(lo, value);
        hi = Math.max(hi, value);
      }
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return [Math.min(0, lo), Math.max(0, hi)];
}

function colorFor(color: ColorEncoding | undefined, row: DataRow, index: number,
                  spec: ChartSpec): string {
  if (!color) return DEFAULT_COLORS[0] as string;
  if (color.value) return color.value;
  if (color.field) {
    const key = String(row[color.field] ?? '');
    const mapped = spec.colorScale?.mapping[key];
    if (mapped) return mapped;
    const domain = categoryDomain(spec.inlineData, color.field);
    const position = domain.indexOf(key);
    return DEFAULT_COLORS[(position >= 0 ? position : index) % DEFAULT_COLORS.length] as string;
  }
  return DEFAULT_COLORS[0] as string;
}

function categoryDomain(rows: DataRow[], field: string): string[] {
  const seen: string[] = [];
  for (const row of rows) {
    const value = String(row[field] ?? '');
    if (!seen.includes(value)) seen.push(value);
  }
  return seen;
}

export interface RenderOptions {
  width?: number;
  height?: number;
}

export function renderChart(spec: ChartSpec, options: RenderOptions = {}): string {
  const width = options.width ?? 480;
  const height = options.height ?? 240;
  if (spec.mark === 'table') return renderTable(spec);
  if (spec.mark === 'text') return renderBigNumber(spec, width, height);

  const rows = spec.inlineData;
  const legend = legendEntries(spec);
  const top = MARGIN.top + (legend.length > 0 ? LEGEND_HEIGHT : 0);
  const plot = {
    left: MARGIN.left,
    right: width - MARGIN.right,
    top,
    bottom: height - MARGIN.bottom,
  };

  const x = buildScale(spec.encodings, 'x', rows, plot.left, plot.right, spec);
  const y = buildScale(spec.encodings, 'y', rows, plot.bottom, plot.top, spec);

  const parts: string[] = [];
  parts.push(axisLines(plot));
  parts.push(renderXTicks(x, plot));
  if (spec.encodings.y?.type === 'quantitative') parts.push(renderYTicks(y, plot));
  for (const layer of spec.layers) {
    parts.push(renderLayer(layer, spec, rows, x, y, plot));
  }
  if (legend.length > 0) parts.push(renderLegend(legend, plot.left));

  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" `
    + `width="${width}" height="${height}" role="img" class="snapshot-chart">`
    + parts.join('')
    + '</svg>';
}

function buildScale(encodings: Encodings, channel: 'x' | 'y', rows: DataRow[],
                    rangeStart: number, rangeEnd: number, spec: ChartSpec): Scale {
  const enc = encodings[channel];
  if (!enc) return linearScale(0, 1, rangeStart, rangeEnd, null);
  if (enc.type === 'quantitative') {
    const fields = [enc.field];
    // Band layers stretch the axis to cover their companion fields.
    for (const layer of spec.layers) {
      for (const key of ['y', 'y2', 'x'] as const) {
        const other = layer.encodings[key];
        if (other && other.type === 'quantitative') fields.push(other.field);
      }
    }
    const [lo, hi] = enc.domain ?? numericExtent(rows, fields);
    return linearScale(lo, hi, rangeStart, rangeEnd, enc.maxTicks);
  }
  const domain = categoryDomain(rows, enc.field);
  return categoricalScale(domain, Math.min(rangeStart, rangeEnd),
                          Math.max(rangeStart, rangeEnd), enc.maxTicks, enc.labelLimit);
}

function axisLines(plot: { left: number; right: number; top: number; bottom: number }): string {
  return `<line x1="${plot.left}" y1="${plot.bottom}" x2="${plot.right}" y2="${plot.bottom}" stroke="#999"/>`
    + `<line x1="${plot.left}" y1="${plot.top}" x2="${plot.left}" y2="${plot.bottom}" stroke="#999"/>`;
}

function renderXTicks(x: Scale, plot: { bottom: number }): string {
  return x.ticks.map((tick) =>
    `<text class="tick-label tick-x" x="${tick.position}" y="${plot.bottom + 16}" `
    + `text-anchor="middle" font-size="10">${esc(tick.label)}</text>`).join('');
}

function renderYTicks(y: Scale, plot: { left: number }): string {
  return y.ticks.map((tick) =>
    `<text class="tick-label tick-y" x="${plot.left - 6}" y="${tick.position + 3}" `
    + `text-anchor="end" font-size="10">${esc(tick.label)}</text>`).join('');
}

function renderLayer(layer: Layer, spec: ChartSpec, rows: DataRow[], x: Scale, y: Scale,
                     plot: { left: number; right: number; top: number; bottom: number }): string {
  const enc = layer.encodings;
  switch (layer.mark) {
    case 'band': {
      if (!enc.y || !enc.y2) return '';
      const first = rows[0];
      if (!first) return '';
      const y1 = y(first[enc.y.field] ?? null);
      const y2 = y(first[enc.y2.field] ?? null);
      const fill = enc.color?.value ?? '#eee';
      return `<rect class="threshold-band" x="${plot.left}" y="${Math.min(y1, y2)}" `
        + `width="${plot.right - plot.left}" height="${Math.abs(y2 - y1)}" `
        + `fill="${fill}" opacity="0.6"/>`;
    }
    case 'bar': {
      if (!enc.x || !enc.y) {
        // Horizontal progress bar: x quantitative, no y.
        if (enc.x && enc.x.type === 'quantitative') {
          return rows.map((row, i) => {
            const value = x(row[enc.x!.field] ?? null);
            const mid = (plot.top + plot.bottom) / 2;
            return `<rect class="mark-bar" x="${plot.left}" y="${mid - 14}" `
              + `width="${Math.max(0, value - plot.left)}" height="28" `
              + `fill="${colorFor(enc.color, row, i, spec)}"/>`;
          }).join('');
        }
        return '';
      }
      const barWidth = Math.max(4, x.bandwidth);
      return rows
        .filter((row) => row[enc.y!.field] !== null && row[enc.y!.field] !== undefined)
        .map((row, i) => {
          const cx = x(row[enc.x!.field] ?? null);
          const top = y(row[enc.y!.field] ?? null);
          const base = y(0);
          return `<rect class="mark-bar" x="${cx - barWidth / 2}" y="${Math.min(top, base)}" `
            + `width="${barWidth}" height="${Math.abs(base - top)}" `
            + `fill="${colorFor(enc.color, row, i, spec)}"/>`;
        }).join('');
    }
    case 'line': {
      if (!enc.x || !enc.y) return '';
      if (enc.x.type === 'quantitative' && !enc.y) return '';
      if (enc.x.type === 'quantitative' && spec.mark !== 'point' && !rows.length) return '';
      if (enc.x.type === 'quantitative' && spec.mark === 'bar') {
        // Goal rule: a vertical marker at the x position of the first row.
        const first = rows[0];
        if (!first) return '';
        const gx = x(first[enc.x.field] ?? null);
        return `<line class="goal-rule" x1="${gx}" y1="${plot.top}" x2="${gx}" `
          + `y2="${plot.bottom}" stroke="#333" stroke-dasharray="4,3" stroke-width="2"/>`;
      }
      const series = rows
        .filter((row) => row[enc.y!.field] !== null && row[enc.y!.field] !== undefined)
        .map((row) => `${x(row[enc.x!.field] ?? null)},${y(row[enc.y!.field] ?? null)}`);
      if (series.length === 0) return '';
      const stroke = enc.color?.value
        ?? colorFor(enc.color, rows[0] ?? {}, 0, spec);
      return `<polyline class="mark-line" points="${series.join(' ')}" fill="none" `
        + `stroke="${stroke}" stroke-width="2"/>`;
    }
    case 'area': {
      if (!enc.x || !enc.y) return '';
      const pts = rows.map((row) => `${x(row[enc.x!.field] ?? null)},${y(row[enc.y!.field] ?? null)}`);
      if (pts.length === 0) return '';
      const firstX = x(rows[0]?.[enc.x.field] ?? null);
      const lastX = x(rows[rows.length - 1]?.[enc.x.field] ?? null);
      const base = y(0);
      return `<polygon class="mark-area" points="${firstX},${base} ${pts.join(' ')} ${lastX},${base}" `
        + `fill="${colorFor(enc.color, rows[0] ?? {}, 0, spec)}" opacity="0.7"/>`;
    }
    case 'point': {
      if (!enc.x || !enc.y) return '';
      return rows
        .filter((row) => row[enc.x!.field] !== null && row[enc.y!.field] !== null
          && row[enc.x!.field] !== undefined && row[enc.y!.field] !== undefined)
        .map((row, i) =>
          `<circle class="mark-point" cx="${x(row[enc.x!.field] ?? null)}" `
          + `cy="${y(row[enc.y!.field] ?? null)}" r="4" `
          + `fill="${colorFor(enc.color, row, i, spec)}"/>`).join('');
    }
    default:
      return '';
  }
}

function legendEntries(spec: ChartSpec): { label: string; color: string }[] {
  const entries: { label: string; color: string }[] = [];
  const color = spec.encodings.color;
  if (color?.field && color.legend) {
    for (const value of categoryDomain(spec.inlineData, color.field)) {
      const row: DataRow = { [color.field]: value };
      entries.push({ label: value, color: colorFor(color, row, entries.length, spec) });
    }
    return entries;
  }
  // Multi-line layers with constant colors and labels (time over time).
  for (const layer of spec.layers) {
    const layerColor = layer.encodings.color;
    if (layerColor?.value && layerColor.label && legendVisible(spec)) {
      entries.push({ label: layerColor.label, color: layerColor.value });
    }
  }
  return entries;
}

function legendVisible(spec: ChartSpec): boolean {
  const color = spec.encodings.color;
  if (color && 'legend' in color) return color.legend === true;
  // Layer-label legends follow the active size variant.
  const size = spec.size ?? 'wide';
  return spec.sizeVariants[size]?.legendVisible ?? true;
}

function renderLegend(entries: { label: string; color: string }[], left: number): string {
  const items = entries.map((entry, i) => {
    const xPos = left + i * 90;
    return `<g class="legend-item">`
      + `<rect x="${xPos}" y="4" width="10" height="10" fill="${entry.color}"/>`
      + `<text x="${xPos + 14}" y="13" font-size="10">${esc(entry.label)}</text>`
      + `</g>`;
  });
  return `<g class="legend">${items.join('')}</g>`;
}

function renderBigNumber(spec: ChartSpec, width: number, height: number): string {
  const first = spec.inlineData[0] ?? {};
  const field = spec.encodings.text?.field ?? 'value';
  const value = first[field];
  const band = spec.layers.find((l) => l.mark === 'band');
  let bandNote = '';
  if (band && band.encodings.y && band.encodings.y2) {
    const low = first[band.encodings.y.field];
    const high = first[band.encodings.y2.field];
    bandNote = `<text class="band-note" x="${width / 2}" y="${height / 2 + 28}" `
      + `text-anchor="middle" font-size="11" fill="#666">range ${low} to ${high}</text>`;
  }
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" `
    + `width="${width}" height="${height}" role="img" class="snapshot-chart big-number">`
    + `<text class="big-value" x="${width / 2}" y="${height / 2 + 8}" text-anchor="middle" `
    + `font-size="42" font-weight="bold">${esc(String(value ?? ''))}</text>`
    + bandNote
    + '</svg>';
}

function renderTable(spec: ChartSpec): string {
  const fields = spec.encodings.columns?.fields
    ?? Object.keys(spec.inlineData[0] ?? {});
  const header = fields.map((f) => `<th>${esc(f)}</th>`).join('');
  const body = spec.inlineData.map((row) =>
    `<tr>${fields.map((f) => `<td>${esc(String(row[f] ?? ''))}</td>`).join('')}</tr>`).join('');
  return `<table class="snapshot-table"><thead><tr>${header}</tr></thead>`
    + `<tbody>${body}</tbody></table>`;
}

/** Count rendered x-axis tick labels; used by tests and kept with the renderer. */
export function countXTicks(svg: string): number {
  return (svg.match(/class="tick-label tick-x"/g) ?? []).length;
}

export function hasLegend(svg: string): boolean {
  return svg.includes('class="legend"');
}
