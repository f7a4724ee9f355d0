/**
 * Shared HTML fragments. All content is API data passed through verbatim
 * (escaped); nothing here computes a number or a status phrase.
 */

import { renderChart } from '../chart.js';
import type {
  Annotation,
  Caption,
  ChartSpec,
  Control,
  ObfuscatedView,
  Status,
} from '../types.js';

export function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderCaption(caption: Caption | null): string {
  if (!caption) return '';
  return `<p class="caption">${esc(caption.text)}</p>`;
}

export function renderStatusBanner(status: Status): string {
  const banners: string[] = [];
  if (status.freshness === 'stale') {
    const since = status.staleSince ? ` since ${esc(status.staleSince)}` : '';
    banners.push(`<div class="banner banner-stale" role="status">Out of date${since}</div>`);
  }
  if (status.completeness === 'incomplete') {
    const note = status.note ? `: ${esc(status.note)}` : '';
    banners.push(`<div class="banner banner-incomplete" role="status">Missing data${note}</div>`);
  }
  return banners.join('');
}

export function renderAnnotations(annotations: Annotation[]): string {
  if (annotations.length === 0) return '';
  const overlays = annotations.map((a) => {
    if (a.kind === 'note') {
      return `<div class="annotation annotation-note">${esc(a.text ?? '')}</div>`;
    }
    const coords = Object.entries(a.anchor)
      .map(([k, v]) => `${esc(k)}=${v}`)
      .join(' ');
    return `<div class="annotation annotation-${a.kind}" data-anchor="${esc(coords)}"></div>`;
  });
  return `<div class="annotation-layer">${overlays.join('')}</div>`;
}

export function renderControls(postingId: string, controls: Control[]): string {
  if (controls.length === 0) return '';
  const widgets = controls.map((control) => {
    const options = control.allowedValues.map((value) =>
      `<option value="${esc(value)}"${value === control.defaultValue ? ' selected' : ''}>`
      + `${esc(value)}</option>`).join('');
    const cta = control.isCallToAction ? ' control-cta' : '';
    return `<label class="control${cta}">${esc(control.field)} `
      + `<select data-posting="${esc(postingId)}" data-control="${esc(control.id)}">`
      + `${options}</select></label>`;
  });
  return `<div class="controls">${widgets.join('')}</div>`;
}

export function renderChartOrPlaceholder(spec: ChartSpec | null, width: number): string {
  if (!spec) return '<div class="chart-placeholder">No data in the current window.</div>';
  return renderChart(spec, { width });
}

export function renderObfuscated(view: ObfuscatedView): string {
  const button = view.requestAccessAvailable
    ? `<button class="request-access" data-posting="${esc(view.postingId)}">Request access</button>`
    : '';
  return `<div class="posting posting-obfuscated">`
    + `<p class="obfuscation-reason">${esc(view.reason)}</p>${button}</div>`;
}
