/**
 * Payload types mirrored from the snapshothub HTTP API.
 *
 * The frontend treats these as opaque data: every number, caption, and
 * status string shown on screen comes straight out of one of these
 * structures, never from client-side computation.
 */

export type SizeClass = 'narrow' | 'medium' | 'wide';

export type TemplateKind =
  | 'categorical-breakdown'
  | 'goal-breakdown'
  | 'ratio-breakdown'
  | 'time-series'
  | 'value-vs-threshold'
  | 'series-vs-threshold'
  | 'time-over-time'
  | 'trend-correlation'
  | 'preserve-original';

export const TEMPLATE_KINDS: TemplateKind[] = [
  'categorical-breakdown',
  'goal-breakdown',
  'ratio-breakdown',
  'time-series',
  'value-vs-threshold',
  'series-vs-threshold',
  'time-over-time',
  'trend-correlation',
  'preserve-original',
];

export interface AxisEncoding {
  field: string;
  type: 'nominal' | 'temporal' | 'quantitative';
  maxTicks: number | null;
  labelLimit: number | null;
  domain?: [number, number];
}

export interface ColorEncoding {
  field?: string;
  type?: string;
  legend?: boolean;
  scale?: string | null;
  value?: string;
  label?: string;
}

export interface Encodings {
  x?: AxisEncoding;
  y?: AxisEncoding;
  y2?: AxisEncoding;
  text?: AxisEncoding;
  color?: ColorEncoding;
  columns?: { fields: string[] };
}

export interface Layer {
  mark: string;
  encodings: Encodings;
}

export type DataRow = Record<string, string | number | null>;

export interface BoundColorScale {
  name: string;
  kind: string;
  mapping: Record<string, string>;
  fallbackAssigned: string[];
}

export interface ChartSpec {
  mark: string;
  layers: Layer[];
  encodings: Encodings;
  inlineData: DataRow[];
  sizeVariants: Record<SizeClass, { maxTicks: number | null; legendVisible: boolean; labelLimit: number | null }>;
  colorScale: BoundColorScale | null;
  size: SizeClass | null;
  bestEffort: boolean;
}

export interface Caption {
  text: string;
  stats: Record<string, number | string>;
}

export interface Status {
  freshness: 'fresh' | 'stale';
  freshnessDate: string | null;
  staleSince: string | null;
  completeness: 'complete' | 'incomplete';
  note: string | null;
}

export interface Annotation {
  kind: 'circle' | 'rect' | 'arrow' | 'line' | 'note';
  anchor: Record<string, number>;
  text: string | null;
  authorId: string;
}

export interface Control {
  id: string;
  field: string;
  allowedValues: string[];
  defaultValue: string;
  isCallToAction: boolean;
}

export interface ComponentPayload {
  id: string;
  templateKind: TemplateKind;
  chartSpec: ChartSpec | null;
  caption: Caption | null;
  annotations: Annotation[];
  controls: Control[];
  timeFrame: unknown;
}

export interface RenderedComponent {
  id: string;
  chartSpec: ChartSpec | null;
  caption: Caption | null;
  annotations: Annotation[];
  controls: Control[];
}

export interface RenderedView {
  kind: 'rendered';
  postingId: string;
  snapshotId: string;
  version: number;
  sizeClass: SizeClass;
  status: Status;
  curation: { method: string; intervalSeconds?: number; weights?: Record<string, number> };
  components: RenderedComponent[];
}

export interface ObfuscatedView {
  kind: 'obfuscated';
  postingId: string;
  reason: string;
  requestAccessAvailable: boolean;
}

export type PostingView = RenderedView | ObfuscatedView;

export interface PrivateRenderedView {
  kind: 'private-rendered';
  postingId: string;
  componentId: string;
  control: { id: string; value: string };
  chartSpec: ChartSpec | null;
  caption: Caption | null;
}

export interface Posting {
  id: string;
  channelId: string;
  authorId: string;
  snapshotRef: { snapshotId: string; version: number };
  parentPostingId: string | null;
  postedAt: string;
}

export interface Message {
  id: string;
  channelId: string;
  authorId: string;
  text: string;
  threadParent: string | null;
  at: string;
}

export interface Reaction {
  targetId: string;
  userId: string;
  emoji: string;
  at: string;
}

export interface ChannelFeed {
  channel: { id: string; name: string; visibility: string; members: string[] };
  postings: Posting[];
  messages: Message[];
  reactions: Reaction[];
}

export interface TelemetrySummary {
  views: number;
  uniqueViewers: number;
  obfuscatedViews: number;
  reshares: number;
  reactions: Record<string, number>;
  comments: number;
  interactions: number;
  activeCount: number;
  perChannel: Record<string, number>;
  viewerNames?: string[];
}

export interface PropagationGraph {
  nodes: { postingId: string; channelId: string; version: number; postedAt: string }[];
  edges: { from: string; to: string }[];
  roots: string[];
}

export interface HomeFeedEntry {
  snapshotId: string;
  latestVersion: number;
  status: Status;
  summary: TelemetrySummary;
  staleAndDue: boolean;
  latestActivity: number;
}

export interface DashboardDoc {
  id: string;
  title: string;
  widgets: WidgetDoc[];
  globalFilters: unknown[];
  colorScales: Record<string, { kind: string; mapping: Record<string, string> }>;
}

export interface WidgetDoc {
  id: string;
  title: string;
  chartKind: string;
  measures: string[];
  dimensions: string[];
  temporalField: string | null;
  filters: unknown[];
  colorScale: string | null;
  datasetId: string;
}

export interface ApiError {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
