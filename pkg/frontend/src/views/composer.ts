/**
 * Snapshot Composer: collect components, pick a curation method, target
 * channel, update policy, reshare permission, and completeness note.
 */

import type { ComponentPayload } from '../types.js';
import { esc, renderCaption, renderChartOrPlaceholder } from './fragments.js';

export interface ComposerState {
  components: ComponentPayload[];
  curation: { method: string; intervalSeconds?: number; weights?: Record<string, number> };
  targetChannelId: string | null;
  channels: { id: string; name: string }[];
  policyMode: 'manual' | 'interval';
  intervalDays: number;
  consumerRefreshAllowed: boolean;
  reshareable: boolean;
  completenessNote: string;
  error: string | null;
}

export function initialComposerState(): ComposerState {
  return {
    components: [],
    curation: { method: 'stack' },
    targetChannelId: null,
    channels: [],
    policyMode: 'manual',
    intervalDays: 14,
    consumerRefreshAllowed: false,
    reshareable: true,
    completenessNote: '',
    error: null,
  };
}

const CURATION_METHODS = ['stack', 'carousel', 'slideshow', 'mini-dashboard'] as const;

export function curationDisabledReason(method: string, componentCount: number): string | null {
  if (method === 'mini-dashboard' && componentCount < 2) {
    return 'mini-dashboard needs at least 2 components';
  }
  return null;
}

/** The exact body POST /snapshots receives. */
export function composeRequest(state: ComposerState, creatorId: string): Record<string, unknown> {
  if (!state.targetChannelId) throw new Error('pick a target channel');
  const policy: Record<string, unknown> = {
    mode: state.policyMode,
    consumerRefreshAllowed: state.consumerRefreshAllowed,
  };
  if (state.policyMode === 'interval') policy.intervalDays = state.intervalDays;
  const body: Record<string, unknown> = {
    componentIds: state.components.map((c) => c.id),
    curation: state.curation,
    targetChannelId: state.targetChannelId,
    policy,
    reshareable: state.reshareable,
    creatorId,
  };
  if (state.completenessNote) body.completenessNote = state.completenessNote;
  return body;
}

export function renderComposer(state: ComposerState): string {
  const curationButtons = CURATION_METHODS.map((method) => {
    const reason = curationDisabledReason(method, state.components.length);
    const selected = state.curation.method === method ? ' selected' : '';
    const disabled = reason ? ` disabled title="${esc(reason)}"` : '';
    return `<button class="curation-pick${selected}" data-method="${method}"${disabled}>`
      + `${method}</button>`;
  }).join('');
  const channelOptions = state.channels.map((c) =>
    `<option value="${esc(c.id)}"${c.id === state.targetChannelId ? ' selected' : ''}>`
    + `#${esc(c.name)}</option>`).join('');
  const stack = state.components.map((component) =>
    `<div class="composer-component">`
    + renderChartOrPlaceholder(component.chartSpec, 320)
    + renderCaption(component.caption)
    + `</div>`).join('');
  const error = state.error
    ? `<div class="banner banner-error">${esc(state.error)}</div>` : '';
  return `<section class="composer">
    <h2>Snapshot Composer</h2>
    <div class="component-stack">${stack || '<p>No components yet.</p>'}</div>
    <div class="curation-picker">${curationButtons}</div>
    <form class="composer-form">
      <label>Channel <select name="channel">${channelOptions}</select></label>
      <label>Updates <select name="policyMode">
        <option value="manual"${state.policyMode === 'manual' ? ' selected' : ''}>manual</option>
        <option value="interval"${state.policyMode === 'interval' ? ' selected' : ''}>on an interval</option>
      </select></label>
      <label>Every <input name="intervalDays" type="number" min="1" value="${state.intervalDays}"/> days</label>
      <label><input name="consumerRefresh" type="checkbox"${state.consumerRefreshAllowed ? ' checked' : ''}/>
        consumers may refresh</label>
      <label><input name="reshareable" type="checkbox"${state.reshareable ? ' checked' : ''}/>
        can be re-shared</label>
      <label>Completeness note <input name="completenessNote" value="${esc(state.completenessNote)}"/></label>
      <button type="submit" class="compose">Share snapshot</button>
    </form>
    ${error}
  </section>`;
}
