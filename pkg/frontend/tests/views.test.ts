import { describe, expect, it } from 'vitest';

import { renderPosting, renderPrivateOverlay } from '../src/views/channel.js';
import { curationDisabledReason, composeRequest, initialComposerState } from '../src/views/composer.js';
import { componentRequest, initialCreatorState } from '../src/views/creator.js';
import { renderHome } from '../src/views/home.js';
import type {
  ComponentPayload,
  DashboardDoc,
  HomeFeedEntry,
  PostingView,
  PrivateRenderedView,
  Status,
} from '../src/types.js';

const FRESH: Status = {
  freshness: 'fresh', freshnessDate: '2022-06-01', staleSince: null,
  completeness: 'complete', note: null,
};

function renderedView(status: Status): PostingView {
  return {
    kind: 'rendered',
    postingId: 'post-1',
    snapshotId: 'snap-1',
    version: 2,
    sizeClass: 'wide',
    status,
    curation: { method: 'stack' },
    components: [{
      id: 'comp-1',
      chartSpec: null,
      caption: { text: 'East leads with 574 (53.8% of 1,066).', stats: {} },
      annotations: [],
      controls: [{
        id: 'ctl-region', field: 'region', allowedValues: ['East', 'West'],
        defaultValue: 'East', isCallToAction: false,
      }],
    }],
  };
}

describe('channel postings', () => {
  it('shows the API caption verbatim, numbers included', () => {
    const html = renderPosting(renderedView(FRESH), 800);
    expect(html).toContain('East leads with 574 (53.8% of 1,066).');
  });

  it('shows a stale banner only when the API says stale', () => {
    const fresh = renderPosting(renderedView(FRESH), 800);
    expect(fresh).not.toContain('banner-stale');
    const stale = renderPosting(renderedView({
      ...FRESH, freshness: 'stale', staleSince: '2022-05-01',
    }), 800);
    expect(stale).toContain('banner-stale');
    expect(stale).toContain('2022-05-01');
  });

  it('shows the incomplete banner with the service note', () => {
    const html = renderPosting(renderedView({
      ...FRESH, completeness: 'incomplete', note: 'comp-1: no data for 2022-04-15',
    }), 800);
    expect(html).toContain('banner-incomplete');
    expect(html).toContain('comp-1: no data for 2022-04-15');
  });

  it('obfuscated postings show the reason and a request button, nothing else', () => {
    const html = renderPosting({
      kind: 'obfuscated', postingId: 'post-9',
      reason: 'You do not have access to the underlying data of this snapshot.',
      requestAccessAvailable: true,
    }, 800);
    expect(html).toContain('request-access');
    expect(html).toContain('underlying data');
    expect(html).not.toContain('caption');
    expect(html).not.toContain('svg');
  });

  it('renders controls with the allowed values', () => {
    const html = renderPosting(renderedView(FRESH), 800);
    expect(html).toContain('data-control="ctl-region"');
    expect(html).toContain('<option value="East" selected>');
    expect(html).toContain('<option value="West">');
  });

  it('private overlays carry the interaction result only', () => {
    const result: PrivateRenderedView = {
      kind: 'private-rendered', postingId: 'post-1', componentId: 'comp-1',
      control: { id: 'ctl-region', value: 'East' },
      chartSpec: null,
      caption: { text: 'East leads with 310 (100.0% of 310).', stats: {} },
    };
    const html = renderPrivateOverlay(result, 800);
    expect(html).toContain('Only you can see this');
    expect(html).toContain('East leads with 310');
  });
});

describe('composer rules', () => {
  it('mini-dashboard disabled below two components with a reason', () => {
    expect(curationDisabledReason('mini-dashboard', 1)).toMatch(/at least 2/);
    expect(curationDisabledReason('mini-dashboard', 2)).toBeNull();
    expect(curationDisabledReason('stack', 1)).toBeNull();
  });

  it('compose request mirrors the state', () => {
    const state = initialComposerState();
    state.components = [{ id: 'comp-1' } as ComponentPayload];
    state.targetChannelId = 'ch-sales';
    state.policyMode = 'interval';
    state.intervalDays = 7;
    state.reshareable = false;
    const body = composeRequest(state, 'u-ana');
    expect(body).toEqual({
      componentIds: ['comp-1'],
      curation: { method: 'stack' },
      targetChannelId: 'ch-sales',
      policy: { mode: 'interval', consumerRefreshAllowed: false, intervalDays: 7 },
      reshareable: false,
      creatorId: 'u-ana',
    });
  });
});

describe('creator request building', () => {
  const dashboard: DashboardDoc = {
    id: 'db-sales', title: 'Sales', globalFilters: [], colorScales: {},
    widgets: [{
      id: 'w-by-region', title: 'By region', chartKind: 'bar',
      measures: ['sales'], dimensions: ['region'], temporalField: 'order_date',
      filters: [], colorScale: 'regions', datasetId: 'ds-1',
    }],
  };

  it('builds the API body from UI state', () => {
    const state = initialCreatorState();
    state.dashboard = dashboard;
    state.widgetId = 'w-by-region';
    state.templateKind = 'categorical-breakdown';
    state.useWidgetScale = true;
    expect(componentRequest(state)).toEqual({
      dashboardId: 'db-sales',
      widgetId: 'w-by-region',
      templateKind: 'categorical-breakdown',
      colorScale: 'regions',
    });
  });

  it('refuses to build without a widget', () => {
    const state = initialCreatorState();
    state.dashboard = dashboard;
    expect(() => componentRequest(state)).toThrow(/widget/);
  });
});

describe('home feed', () => {
  it('renders the empty state', () => {
    expect(renderHome('u-ana', [], new Map())).toContain('No snapshots yet');
  });

  it('shows counts verbatim and the update button only when due', () => {
    const entry: HomeFeedEntry = {
      snapshotId: 'snap-1', latestVersion: 3,
      status: { ...FRESH, freshness: 'stale', staleSince: '2022-06-01' },
      summary: {
        views: 12, uniqueViewers: 5, obfuscatedViews: 1, reshares: 2,
        reactions: { '+1': 3 }, comments: 4, interactions: 6, activeCount: 2,
        perChannel: { 'ch-sales': 12 },
      },
      staleAndDue: true,
      latestActivity: 40,
    };
    const calm: HomeFeedEntry = {
      ...entry, snapshotId: 'snap-2', staleAndDue: false,
      status: FRESH,
    };
    const html = renderHome('u-ana', [entry, calm], new Map());
    expect(html).toContain('needs-attention');
    const updateButtons = html.match(/class="update-now"/g) ?? [];
    expect(updateButtons.length).toBe(1);
    expect(html).toContain('>12<');
    expect(html).toContain('>5<');
  });
});
