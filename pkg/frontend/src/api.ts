/**
 * Typed client for the snapshothub HTTP API.
 *
 * Every screen goes through this module; there are no other data sources.
 * The acting user rides in the X-User-Id header, matching the service's
 * simulated-identity model.
 */

import type {
  ChannelFeed,
  ComponentPayload,
  DashboardDoc,
  HomeFeedEntry,
  PostingView,
  PrivateRenderedView,
  PropagationGraph,
  SizeClass,
  TelemetrySummary,
} from './types.js';

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly details: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

export interface ClientOptions {
  baseUrl: string;
  userId?: string;
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: typeof fetch;
  userId: string;

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, '');
    this.userId = options.userId ?? '';
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.userId) headers['X-User-Id'] = this.userId;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiRequestError(
        response.status,
        payload.code ?? 'UnknownError',
        payload.message ?? response.statusText,
        payload.details ?? {},
      );
    }
    return payload as T;
  }

  get<T>(path: string): Promise<T> {
    return this.request<T>('GET', path);
  }

  post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>('POST', path, body);
  }

  // -- data --------------------------------------------------------------

  uploadCsvDataset(name: string, content: string, schemaHint?: Record<string, string>) {
    return this.post<{ datasetId: string; rowCount: number }>('/datasets', {
      format: 'csv', name, content, schemaHint,
    });
  }

  createDashboard(doc: Record<string, unknown>) {
    return this.post<{ dashboardId: string }>('/dashboards', doc);
  }

  listDashboards() {
    return this.get<{ id: string; title: string }[]>('/dashboards');
  }

  getDashboard(id: string) {
    return this.get<DashboardDoc>(`/dashboards/${id}`);
  }

  resolveSelection(payload: unknown) {
    return this.post<{ selection: unknown; table: unknown }>('/selections/resolve', payload);
  }

  // -- authoring ----------------------------------------------------------

  createComponent(payload: unknown) {
    return this.post<ComponentPayload>('/components', payload);
  }

  addAnnotation(componentId: string, annotation: unknown) {
    return this.post<ComponentPayload>(`/components/${componentId}/annotations`, {
      annotation,
    });
  }

  addControl(componentId: string, control: unknown) {
    return this.post<ComponentPayload>(`/components/${componentId}/controls`, { control });
  }

  composeSnapshot(payload: unknown) {
    return this.post<{ snapshotId: string; version: { version: number } }>('/snapshots', payload);
  }

  updateSnapshot(snapshotId: string, trigger = 'manual') {
    return this.post<{ snapshotId: string; version: { version: number } }>(
      `/snapshots/${snapshotId}/update`, { trigger, actorId: this.userId });
  }

  versionHash(snapshotId: string, version?: number) {
    const query = version === undefined ? '' : `?version=${version}`;
    return this.get<{ snapshotId: string; version: number; hash: string }>(
      `/snapshots/${snapshotId}/hash${query}`);
  }

  // -- platform ------------------------------------------------------------

  createUser(doc: { id: string; displayName?: string; datasetGrants?: string[] }) {
    return this.post<{ userId: string }>('/users', doc);
  }

  createChannel(doc: { id?: string; name: string; visibility?: string; members?: string[] }) {
    return this.post<{ channelId: string }>('/channels', doc);
  }

  listChannels() {
    return this.get<{ id: string; name: string; visibility: string; members: string[] }[]>('/channels');
  }

  channelFeed(channelId: string) {
    return this.get<ChannelFeed>(`/channels/${channelId}`);
  }

  postSnapshot(snapshotId: string, channelId: string, version?: number) {
    return this.post<{ id: string }>('/postings', {
      snapshotId, channelId, version, authorId: this.userId,
    });
  }

  viewPosting(postingId: string, size: SizeClass) {
    return this.get<PostingView>(`/postings/${postingId}/view?size=${size}`);
  }

  interact(postingId: string, controlId: string, value: string) {
    return this.post<PrivateRenderedView>(`/postings/${postingId}/interact`, {
      controlId, value,
    });
  }

  react(postingId: string, emoji: string) {
    return this.post<{ emoji: string }>(`/postings/${postingId}/reactions`, { emoji });
  }

  comment(channelId: string, text: string, threadParent?: string) {
    return this.post<{ id: string }>(`/channels/${channelId}/messages`, {
      text, threadParent,
    });
  }

  resharePosting(postingId: string, targetChannelId: string) {
    return this.post<{ id: string }>(`/postings/${postingId}/reshare`, { targetChannelId });
  }

  requestAccess(postingId: string) {
    return this.post<{ id: string; state: string }>('/access-requests', { postingId });
  }

  decideAccess(requestId: string, decision: 'granted' | 'denied') {
    return this.post<{ id: string; state: string }>(
      `/access-requests/${requestId}/decision`, { decision });
  }

  // -- telemetry ------------------------------------------------------------

  telemetrySummary(snapshotId: string) {
    return this.get<TelemetrySummary>(`/telemetry/snapshots/${snapshotId}`);
  }

  propagation(snapshotId: string) {
    return this.get<PropagationGraph>(`/telemetry/snapshots/${snapshotId}/propagation`);
  }

  homeFeed(creatorId: string) {
    return this.get<HomeFeedEntry[]>(`/home/${creatorId}`);
  }

  tick(to: string) {
    return this.post<{ now: string; performed: unknown[] }>('/admin/tick', { to });
  }
}
