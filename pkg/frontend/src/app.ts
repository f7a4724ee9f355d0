/**
 * Browser shell: one session (acting user, active channel, viewport
 * width), five screens, all state authoritative at the service.
 */

import { ApiClient, ApiRequestError } from './api.js';
import { sizeClassForWidth } from './sizeclass.js';
import type { ComponentPayload, PostingView, TemplateKind } from './types.js';
import { renderChannelFeed, renderPrivateOverlay } from './views/channel.js';
import {
  componentRequest,
  initialCreatorState,
  renderCreator,
  type CreatorState,
} from './views/creator.js';
import {
  composeRequest,
  initialComposerState,
  renderComposer,
  type ComposerState,
} from './views/composer.js';
import { renderDashboard } from './views/dashboard.js';
import { renderHome } from './views/home.js';
import type { PropagationGraph } from './types.js';

export interface UiSession {
  actingUserId: string;
  activeChannelId: string | null;
  viewportWidth: number;
}

type Screen = 'dashboard' | 'creator' | 'composer' | 'channel' | 'home';

export class App {
  session: UiSession;
  api: ApiClient;
  creator: CreatorState = initialCreatorState();
  composer: ComposerState = initialComposerState();
  screen: Screen = 'dashboard';

  constructor(private readonly root: HTMLElement, baseUrl: string) {
    this.session = {
      actingUserId: '',
      activeChannelId: null,
      viewportWidth: window.innerWidth,
    };
    this.api = new ApiClient({ baseUrl });
    window.addEventListener('resize', () => {
      this.session.viewportWidth = window.innerWidth;
      if (this.screen === 'channel') void this.showChannel();
    });
  }

  setUser(userId: string): void {
    this.session.actingUserId = userId;
    this.api.userId = userId;
  }

  async start(): Promise<void> {
    const users = await this.api.get<{ id: string }[]>('/users');
    this.setUser(users[0]?.id ?? '');
    const channels = await this.api.listChannels();
    this.composer.channels = channels;
    this.session.activeChannelId = channels[0]?.id ?? null;
    await this.showDashboard();
  }

  private nav(): string {
    const tabs: [Screen, string][] = [
      ['dashboard', 'Dashboard'],
      ['creator', 'Component Creator'],
      ['composer', 'Snapshot Composer'],
      ['channel', 'Channel'],
      ['home', 'My Snapshot Home'],
    ];
    const buttons = tabs.map(([screen, label]) =>
      `<button class="nav-tab${screen === this.screen ? ' active' : ''}" `
      + `data-screen="${screen}">${label}</button>`).join('');
    return `<nav class="topnav">${buttons}`
      + `<span class="whoami">acting as <b>${this.session.actingUserId}</b></span></nav>`;
  }

  private mount(body: string): void {
    this.root.innerHTML = this.nav() + body;
    this.root.querySelectorAll<HTMLButtonElement>('.nav-tab').forEach((tab) => {
      tab.addEventListener('click', () => void this.show(tab.dataset.screen as Screen));
    });
  }

  async show(screen: Screen): Promise<void> {
    this.screen = screen;
    if (screen === 'dashboard') return this.showDashboard();
    if (screen === 'creator') return this.showCreator();
    if (screen === 'composer') return this.showComposer();
    if (screen === 'channel') return this.showChannel();
    return this.showHome();
  }

  async showDashboard(): Promise<void> {
    this.screen = 'dashboard';
    const boards = await this.api.listDashboards();
    const first = boards[0];
    if (!first) {
      this.mount('<section class="dashboard"><p>No dashboards loaded.</p></section>');
      return;
    }
    const doc = await this.api.getDashboard(first.id);
    this.creator.dashboard = doc;
    this.mount(renderDashboard(doc));
    this.root.querySelectorAll<HTMLButtonElement>('.dash-widget').forEach((cell) => {
      cell.addEventListener('click', () => {
        this.creator.widgetId = cell.dataset.widget ?? null;
        void this.show('creator');
      });
    });
  }

  async showCreator(): Promise<void> {
    this.screen = 'creator';
    this.mount(renderCreator(this.creator));
    this.root.querySelectorAll<HTMLButtonElement>('.widget-cell').forEach((cell) => {
      cell.addEventListener('click', (event) => {
        event.preventDefault();
        this.creator.widgetId = cell.dataset.widget ?? null;
        void this.showCreator();
      });
    });
    const kindPicker = this.root.querySelector<HTMLSelectElement>('select[name=templateKind]');
    kindPicker?.addEventListener('change', () => {
      this.creator.templateKind = kindPicker.value as TemplateKind;
      void this.showCreator();
    });
    const form = this.root.querySelector<HTMLFormElement>('.creator-form');
    form?.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submitComponent(form);
    });
  }

  private async submitComponent(form: HTMLFormElement): Promise<void> {
    const data = new FormData(form);
    const params: Record<string, unknown> = {};
    const goal = data.get('goal');
    if (goal) params.goal = Number(goal);
    const lo = data.get('thresholdLow');
    const hi = data.get('thresholdHigh');
    if (lo && hi) params.threshold = [Number(lo), Number(hi)];
    const offset = data.get('comparisonOffset');
    if (offset) params.comparisonOffset = { count: 1, unit: String(offset) };
    const second = data.get('secondMeasure');
    if (second) params.secondMeasure = String(second);
    this.creator.params = params;
    try {
      const component = await this.api.createComponent(componentRequest(this.creator));
      this.creator.preview = component;
      this.creator.error = null;
      this.composer.components.push(component);
    } catch (error) {
      this.creator.error = error instanceof ApiRequestError
        ? `${error.code}: ${error.message}` : String(error);
    }
    await this.showCreator();
  }

  async showComposer(): Promise<void> {
    this.screen = 'composer';
    this.composer.channels = await this.api.listChannels();
    if (!this.composer.targetChannelId) {
      this.composer.targetChannelId = this.session.activeChannelId;
    }
    this.mount(renderComposer(this.composer));
    this.root.querySelectorAll<HTMLButtonElement>('.curation-pick').forEach((button) => {
      button.addEventListener('click', (event) => {
        event.preventDefault();
        if (button.disabled) return;
        this.composer.curation = { method: button.dataset.method ?? 'stack' };
        void this.showComposer();
      });
    });
    const form = this.root.querySelector<HTMLFormElement>('.composer-form');
    form?.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submitSnapshot(form);
    });
  }

  private async submitSnapshot(form: HTMLFormElement): Promise<void> {
    const data = new FormData(form);
    this.composer.targetChannelId = String(data.get('channel') ?? '');
    this.composer.policyMode = data.get('policyMode') === 'interval' ? 'interval' : 'manual';
    this.composer.intervalDays = Number(data.get('intervalDays') ?? 14);
    this.composer.consumerRefreshAllowed = data.get('consumerRefresh') !== null;
    this.composer.reshareable = data.get('reshareable') !== null;
    this.composer.completenessNote = String(data.get('completenessNote') ?? '');
    try {
      const result = await this.api.composeSnapshot(
        composeRequest(this.composer, this.session.actingUserId));
      await this.api.postSnapshot(result.snapshotId, this.composer.targetChannelId!);
      this.composer = initialComposerState();
      this.session.activeChannelId = String(data.get('channel') ?? '');
      await this.show('channel');
    } catch (error) {
      this.composer.error = error instanceof ApiRequestError
        ? `${error.code}: ${error.message}` : String(error);
      await this.showComposer();
    }
  }

  async showChannel(): Promise<void> {
    this.screen = 'channel';
    const channelId = this.session.activeChannelId;
    if (!channelId) {
      this.mount('<section class="channel"><p>No channel selected.</p></section>');
      return;
    }
    const feed = await this.api.channelFeed(channelId);
    const size = sizeClassForWidth(this.session.viewportWidth);
    const views = new Map<string, PostingView>();
    for (const posting of feed.postings) {
      try {
        views.set(posting.id, await this.api.viewPosting(posting.id, size));
      } catch {
        // Skip postings the member cannot address at all.
      }
    }
    this.mount(renderChannelFeed(feed, views, this.session.viewportWidth));
    this.wireChannelActions(channelId);
  }

  private wireChannelActions(channelId: string): void {
    this.root.querySelectorAll<HTMLSelectElement>('.controls select').forEach((select) => {
      select.addEventListener('change', () => {
        void this.runInteraction(select);
      });
    });
    this.root.querySelectorAll<HTMLButtonElement>('.react').forEach((button) => {
      button.addEventListener('click', () => {
        void this.api.react(button.dataset.posting ?? '', button.dataset.emoji ?? '+1')
          .then(() => this.showChannel());
      });
    });
    this.root.querySelectorAll<HTMLButtonElement>('.request-access').forEach((button) => {
      button.addEventListener('click', () => {
        void this.api.requestAccess(button.dataset.posting ?? '')
          .then(() => this.showChannel());
      });
    });
    const form = this.root.querySelector<HTMLFormElement>('.composer-line');
    form?.addEventListener('submit', (event) => {
      event.preventDefault();
      const input = form.querySelector<HTMLInputElement>('input[name=text]');
      if (input?.value) {
        void this.api.comment(channelId, input.value).then(() => this.showChannel());
      }
    });
  }

  private async runInteraction(select: HTMLSelectElement): Promise<void> {
    const postingId = select.dataset.posting ?? '';
    const controlId = select.dataset.control ?? '';
    const result = await this.api.interact(postingId, controlId, select.value);
    const overlay = this.root.querySelector<HTMLElement>(
      `[data-overlay-for="${postingId}"]`);
    if (overlay) {
      overlay.hidden = false;
      overlay.innerHTML = renderPrivateOverlay(result, this.session.viewportWidth);
    }
  }

  async showHome(): Promise<void> {
    this.screen = 'home';
    const entries = await this.api.homeFeed(this.session.actingUserId);
    const graphs = new Map<string, PropagationGraph>();
    for (const entry of entries) {
      try {
        graphs.set(entry.snapshotId, await this.api.propagation(entry.snapshotId));
      } catch {
        // Snapshots never posted have no propagation graph.
      }
    }
    this.mount(renderHome(this.session.actingUserId, entries, graphs));
    this.root.querySelectorAll<HTMLButtonElement>('.update-now').forEach((button) => {
      button.addEventListener('click', () => {
        void this.api.updateSnapshot(button.dataset.snapshot ?? '')
          .then(() => this.showHome());
      });
    });
  }
}

export function boot(rootId = 'app', baseUrl = ''): App {
  const root = document.getElementById(rootId);
  if (!root) throw new Error(`no #${rootId} element`);
  const app = new App(root, baseUrl || window.location.origin.replace(/:\d+$/, ':8000'));
  void app.start();
  return app;
}

export { componentRequest, composeRequest };

declare global {
  interface Window {
    snapshothubApp?: App;
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  window.snapshothubApp = boot();
}
