/**
 * Channel view: live snapshot postings interleaved with the conversation.
 *
 * Each posting is fetched through GET /postings/{id}/view at the size
 * class derived from the viewport width, so the service decides tick
 * budgets and legend visibility. Consumer interactions render into a
 * private overlay only; the channel content itself never changes.
 */

import { sizeClassForWidth } from '../sizeclass.js';
import type {
  ChannelFeed,
  PostingView,
  PrivateRenderedView,
  Reaction,
} from '../types.js';
import {
  esc,
  renderAnnotations,
  renderCaption,
  renderChartOrPlaceholder,
  renderControls,
  renderObfuscated,
  renderStatusBanner,
} from './fragments.js';

export function chartWidthFor(viewportWidth: number): number {
  return Math.min(viewportWidth - 24, 640);
}

export function renderPosting(view: PostingView, viewportWidth: number): string {
  if (view.kind === 'obfuscated') return renderObfuscated(view);
  const width = chartWidthFor(viewportWidth);
  const components = view.components.map((component) => `
    <div class="component" data-component="${esc(component.id)}">
      ${renderChartOrPlaceholder(component.chartSpec, width)}
      ${renderCaption(component.caption)}
      ${renderAnnotations(component.annotations)}
      ${renderControls(view.postingId, component.controls)}
    </div>`);
  const curation = view.curation.method;
  return `<div class="posting posting-rendered curation-${esc(curation)}" `
    + `data-posting="${esc(view.postingId)}" data-size="${esc(view.sizeClass)}">`
    + renderStatusBanner(view.status)
    + `<div class="components">${components.join('')}</div>`
    + `<div class="posting-meta">snapshot ${esc(view.snapshotId)} v${view.version}</div>`
    + `<div class="posting-actions">`
    + `<button class="react" data-posting="${esc(view.postingId)}" data-emoji="+1">+1</button>`
    + `<button class="react" data-posting="${esc(view.postingId)}" data-emoji="eyes">eyes</button>`
    + `<button class="reply" data-posting="${esc(view.postingId)}">Reply in thread</button>`
    + `<button class="reshare" data-posting="${esc(view.postingId)}">Re-share</button>`
    + `</div>`
    + `<div class="private-overlay" data-overlay-for="${esc(view.postingId)}" hidden></div>`
    + `</div>`;
}

export function renderPrivateOverlay(result: PrivateRenderedView,
                                     viewportWidth: number): string {
  const width = chartWidthFor(viewportWidth);
  return `<div class="private-view">`
    + `<div class="private-label">Only you can see this `
    + `(${esc(result.control.id)} = ${esc(result.control.value)})</div>`
    + renderChartOrPlaceholder(result.chartSpec, width)
    + renderCaption(result.caption)
    + `</div>`;
}

function reactionPills(reactions: Reaction[], targetId: string): string {
  const counts = new Map<string, number>();
  for (const r of reactions) {
    if (r.targetId === targetId) counts.set(r.emoji, (counts.get(r.emoji) ?? 0) + 1);
  }
  return [...counts.entries()]
    .map(([emoji, count]) => `<span class="reaction-pill">${esc(emoji)} ${count}</span>`)
    .join('');
}

export function renderChannelFeed(feed: ChannelFeed,
                                  postingViews: Map<string, PostingView>,
                                  viewportWidth: number): string {
  const sizeClass = sizeClassForWidth(viewportWidth);
  const items: string[] = [];
  const threaded = feed.messages.filter((m) => m.threadParent !== null);
  for (const posting of feed.postings) {
    const view = postingViews.get(posting.id);
    items.push(`<div class="feed-item">`
      + (view ? renderPosting(view, viewportWidth)
              : `<div class="posting posting-loading">loading ${esc(posting.id)}</div>`)
      + reactionPills(feed.reactions, posting.id)
      + threaded.filter((m) => m.threadParent === posting.id)
        .map((m) => `<div class="thread-reply"><b>${esc(m.authorId)}</b> ${esc(m.text)}</div>`)
        .join('')
      + `</div>`);
  }
  for (const message of feed.messages) {
    if (message.threadParent !== null) continue;
    items.push(`<div class="feed-item message"><b>${esc(message.authorId)}</b> `
      + `${esc(message.text)}${reactionPills(feed.reactions, message.id)}</div>`);
  }
  return `<section class="channel" data-size-class="${sizeClass}">`
    + `<h2>#${esc(feed.channel.name)}</h2>`
    + `<div class="feed">${items.join('')}</div>`
    + `<form class="composer-line"><input name="text" placeholder="Message #${esc(feed.channel.name)}"/>`
    + `<button type="submit">Send</button></form>`
    + `</section>`;
}
