/**
 * Component Creator: pick a widget selection, a template, parameters,
 * annotations, and consumer controls; the preview pane shows exactly what
 * POST /components returned.
 */

import type { ComponentPayload, DashboardDoc, TemplateKind, WidgetDoc } from '../types.js';
import { TEMPLATE_KINDS } from '../types.js';
import { esc, renderCaption, renderChartOrPlaceholder } from './fragments.js';

export interface CreatorState {
  dashboard: DashboardDoc | null;
  widgetId: string | null;
  templateKind: TemplateKind;
  params: Record<string, unknown>;
  overrides: Record<string, unknown>;
  useWidgetScale: boolean;
  annotations: unknown[];
  controls: unknown[];
  preview: ComponentPayload | null;
  error: string | null;
}

export function initialCreatorState(): CreatorState {
  return {
    dashboard: null,
    widgetId: null,
    templateKind: 'categorical-breakdown',
    params: {},
    overrides: {},
    useWidgetScale: false,
    annotations: [],
    controls: [],
    preview: null,
    error: null,
  };
}

/** The exact body the API receives; tests replay this against the service. */
export function componentRequest(state: CreatorState): Record<string, unknown> {
  if (!state.dashboard || !state.widgetId) {
    throw new Error('select a widget first');
  }
  const widget = state.dashboard.widgets.find((w) => w.id === state.widgetId);
  const body: Record<string, unknown> = {
    dashboardId: state.dashboard.id,
    widgetId: state.widgetId,
    templateKind: state.templateKind,
  };
  if (Object.keys(state.overrides).length > 0) body.overrides = state.overrides;
  if (Object.keys(state.params).length > 0) body.params = state.params;
  if (state.useWidgetScale && widget?.colorScale) body.colorScale = widget.colorScale;
  if (state.annotations.length > 0) body.annotations = state.annotations;
  if (state.controls.length > 0) body.controls = state.controls;
  return body;
}

function templatePicker(selected: TemplateKind): string {
  const options = TEMPLATE_KINDS.map((kind) =>
    `<option value="${kind}"${kind === selected ? ' selected' : ''}>${kind}</option>`);
  return `<label>Template <select name="templateKind">${options.join('')}</select></label>`;
}

function paramFields(kind: TemplateKind, params: Record<string, unknown>): string {
  const fields: string[] = [];
  if (kind === 'goal-breakdown') {
    fields.push(`<label>Goal <input name="goal" type="number" value="${esc(String(params.goal ?? ''))}"/></label>`);
  }
  if (kind === 'value-vs-threshold' || kind === 'series-vs-threshold') {
    const threshold = (params.threshold as number[] | undefined) ?? ['', ''];
    fields.push(`<label>Range low <input name="thresholdLow" type="number" value="${threshold[0]}"/></label>`);
    fields.push(`<label>Range high <input name="thresholdHigh" type="number" value="${threshold[1]}"/></label>`);
  }
  if (kind === 'time-over-time') {
    fields.push('<label>Compare against <select name="comparisonOffset">'
      + '<option value="month">prior month</option>'
      + '<option value="week">prior week</option>'
      + '<option value="year">prior year</option>'
      + '</select></label>');
  }
  if (kind === 'trend-correlation') {
    fields.push(`<label>Second measure <input name="secondMeasure" value="${esc(String(params.secondMeasure ?? ''))}"/></label>`);
  }
  return fields.join('');
}

function widgetPicker(dashboard: DashboardDoc, selected: string | null): string {
  const cells = dashboard.widgets.map((w: WidgetDoc) =>
    `<button class="widget-cell${w.id === selected ? ' selected' : ''}" data-widget="${esc(w.id)}">`
    + `${esc(w.title)} <small>${esc(w.chartKind)}</small></button>`);
  return `<div class="widget-grid">${cells.join('')}</div>`;
}

const ANNOTATION_TOOLS = ['circle', 'rect', 'arrow', 'line', 'note'] as const;

export function renderCreator(state: CreatorState): string {
  if (!state.dashboard) {
    return '<section class="creator"><p>Pick a dashboard first.</p></section>';
  }
  const tools = ANNOTATION_TOOLS.map((tool) =>
    `<button class="annotation-tool" data-tool="${tool}">${tool}</button>`).join('');
  const preview = state.preview
    ? `<div class="preview">`
      + renderChartOrPlaceholder(state.preview.chartSpec, 480)
      + renderCaption(state.preview.caption)
      + `<div class="preview-meta">component ${esc(state.preview.id)}</div>`
      + `</div>`
    : '<div class="preview preview-empty">Submit to see the rendered component.</div>';
  const error = state.error
    ? `<div class="banner banner-error">${esc(state.error)}</div>` : '';
  return `<section class="creator">
    <h2>Component Creator</h2>
    ${widgetPicker(state.dashboard, state.widgetId)}
    <form class="creator-form">
      ${templatePicker(state.templateKind)}
      ${paramFields(state.templateKind, state.params)}
      <div class="annotation-tools">${tools}</div>
      <button class="add-control">Add consumer filter</button>
      <button type="submit" class="create-component">Create component</button>
    </form>
    ${error}
    ${preview}
  </section>`;
}
