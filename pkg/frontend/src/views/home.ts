/**
 * My Snapshot Home: every snapshot the creator owns with status, telemetry
 * counts, propagation edges, and a one-click update for stale entries.
 */

import type { HomeFeedEntry, PropagationGraph } from '../types.js';
import { esc, renderStatusBanner } from './fragments.js';

function countBar(label: string, value: number, max: number): string {
  const width = max > 0 ? Math.round((value / max) * 120) : 0;
  return `<div class="count-row"><span class="count-label">${esc(label)}</span>`
    + `<span class="count-bar" style="width:${width}px"></span>`
    + `<span class="count-value">${value}</span></div>`;
}

export function renderPropagation(graph: PropagationGraph): string {
  if (graph.nodes.length === 0) return '<p class="no-propagation">Not posted yet.</p>';
  const byId = new Map(graph.nodes.map((n) => [n.postingId, n]));
  const edges = graph.edges.map((edge) => {
    const from = byId.get(edge.from);
    const to = byId.get(edge.to);
    return `<li>${esc(from?.channelId ?? edge.from)} &rarr; ${esc(to?.channelId ?? edge.to)}</li>`;
  });
  const roots = graph.roots.map((r) => esc(byId.get(r)?.channelId ?? r)).join(', ');
  return `<div class="propagation">`
    + `<span class="propagation-roots">posted in ${roots}</span>`
    + (edges.length > 0 ? `<ul class="propagation-edges">${edges.join('')}</ul>` : '')
    + `</div>`;
}

export function renderHomeEntry(entry: HomeFeedEntry,
                                graph: PropagationGraph | null): string {
  const s = entry.summary;
  const max = Math.max(s.views, s.reshares, s.comments, s.interactions, 1);
  const updateButton = entry.staleAndDue
    ? `<button class="update-now" data-snapshot="${esc(entry.snapshotId)}">Update now</button>`
    : '';
  return `<article class="home-entry${entry.staleAndDue ? ' needs-attention' : ''}"
    data-snapshot="${esc(entry.snapshotId)}">
    <header><h3>${esc(entry.snapshotId)} <small>v${entry.latestVersion}</small></h3>
      ${updateButton}</header>
    ${renderStatusBanner(entry.status)}
    <div class="counts">
      ${countBar('views', s.views, max)}
      ${countBar('unique', s.uniqueViewers, max)}
      ${countBar('re-shares', s.reshares, max)}
      ${countBar('comments', s.comments, max)}
      ${countBar('interactions', s.interactions, max)}
      ${countBar('call-to-action', s.activeCount, max)}
    </div>
    ${graph ? renderPropagation(graph) : ''}
  </article>`;
}

export function renderHome(creatorId: string, entries: HomeFeedEntry[],
                           graphs: Map<string, PropagationGraph>): string {
  if (entries.length === 0) {
    return `<section class="home"><h2>My Snapshot Home</h2>`
      + `<p class="empty-state">No snapshots yet. Create one from a dashboard selection.</p>`
      + `</section>`;
  }
  const cards = entries.map((entry) =>
    renderHomeEntry(entry, graphs.get(entry.snapshotId) ?? null));
  return `<section class="home"><h2>My Snapshot Home</h2>`
    + `<div class="home-feed" data-creator="${esc(creatorId)}">${cards.join('')}</div>`
    + `</section>`;
}
