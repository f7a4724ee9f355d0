/**
 * Dashboard view: the starting point of the flow. Shows a dashboard's
 * widgets; clicking one propagates the selection into the Component
 * Creator.
 */

import type { DashboardDoc } from '../types.js';
import { esc } from './fragments.js';

export function renderDashboard(doc: DashboardDoc): string {
  const widgets = doc.widgets.map((w) => `
    <button class="dash-widget" data-widget="${esc(w.id)}">
      <span class="dash-widget-title">${esc(w.title)}</span>
      <span class="dash-widget-kind">${esc(w.chartKind)}</span>
      <span class="dash-widget-fields">${esc(w.measures.join(', '))}${
        w.dimensions.length > 0 ? ' by ' + esc(w.dimensions.join(', ')) : ''}</span>
    </button>`);
  return `<section class="dashboard">
    <h2>${esc(doc.title)}</h2>
    <div class="dash-grid">${widgets.join('')}</div>
    <p class="dash-hint">Select a widget to start a snapshot component.</p>
  </section>`;
}
