// DOM rendering. Everything here is presentational; state lives in the
// models and every render is a full redraw of the view's container.

import type { AnnotationModel } from "./annotation.js";
import type { DashboardModel } from "./dashboard.js";
import { formatCount, formatKappa, formatPct, formatToxicity } from "./format.js";
import type { ModerationModel } from "./moderation.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function banner(disconnected: boolean, lastError: string | null): string {
  if (!disconnected) return "";
  const detail = lastError ? escapeHtml(lastError) : "connection lost";
  return `<div class="banner banner-offline">offline, showing last known data (${detail})</div>`;
}

/**
 * Toxic text is never shown outright. It renders shaded, with the raw text
 * in a data attribute; a delegated click handler in main.ts flips the
 * container to revealed.
 */
function shaded(text: string, revealed: boolean): string {
  const safe = escapeHtml(text);
  if (revealed) return `<span class="tweet-text revealed">${safe}</span>`;
  return `<span class="tweet-text shade" role="button" tabindex="0" title="click to reveal">${safe}</span>`;
}

export function renderDashboard(root: HTMLElement, model: DashboardModel): void {
  const report = model.report;
  let counters = "<p class=\"muted\">no report yet</p>";
  if (report !== null) {
    const e = report.election;
    counters = `
      <div class="counters">
        <div class="counter"><span class="num">${formatCount(e.tweets_analyzed)}</span><span class="label">analyzed</span></div>
        <div class="counter"><span class="num">${formatCount(e.tweets_flagged)}</span><span class="label">flagged</span></div>
        <div class="counter"><span class="num">${formatCount(e.positives_sent)}</span><span class="label">positivtweets sent</span></div>
        <div class="counter"><span class="num">${formatCount(e.days_in_operation)}</span><span class="label">days</span></div>
      </div>`;
  }
  const candidates = model
    .topCandidates(10)
    .map(
      (c) => `
        <tr>
          <td>@${escapeHtml(c.handle)}</td>
          <td class="num">${formatCount(c.total_tweets)}</td>
          <td class="num">${formatCount(c.toxic_tweets)}</td>
          <td class="num">${c.share_of_total_toxic}%</td>
        </tr>`,
    )
    .join("");
  const lexicon = model
    .lexiconRows()
    .map(
      (row) => `
        <tr>
          <td>${escapeHtml(row.term)}</td>
          <td>@${escapeHtml(row.handle)}</td>
          <td class="num">${formatCount(row.matches)}</td>
          <td class="num">${formatCount(row.toxic_matches)}</td>
          <td class="num warn">${formatCount(row.false_negatives)}</td>
        </tr>`,
    )
    .join("");
  const feed = model.items
    .map(
      (item) => `
        <li class="feed-item" data-id="${escapeHtml(item.tweet_id)}">
          <div class="feed-meta">
            <span class="handle">@${escapeHtml(item.author_handle)}</span>
            <span class="arrow">on</span>
            <span class="handle">@${escapeHtml(item.candidate_handle)}</span>
            <span class="score">${formatToxicity(item.toxicity)}</span>
            <time>${escapeHtml(item.created_at)}</time>
          </div>
          ${shaded(item.text, false)}
        </li>`,
    )
    .join("");
  root.innerHTML = `
    ${banner(model.disconnected, model.lastError)}
    ${counters}
    <div class="columns">
      <section>
        <h2>most targeted</h2>
        <table>
          <thead><tr><th>candidate</th><th>tweets</th><th>toxic</th><th>share</th></tr></thead>
          <tbody>${candidates || "<tr><td colspan=\"4\" class=\"muted\">no data</td></tr>"}</tbody>
        </table>
      </section>
      <section>
        <h2>lexicon misses</h2>
        <table>
          <thead><tr><th>term</th><th>target</th><th>matches</th><th>caught</th><th>missed</th></tr></thead>
          <tbody>${lexicon || "<tr><td colspan=\"5\" class=\"muted\">no lexicon loaded</td></tr>"}</tbody>
        </table>
      </section>
    </div>
    <section>
      <h2>flagged feed</h2>
      <ul class="feed">${feed || "<li class=\"muted\">nothing flagged yet</li>"}</ul>
    </section>`;
}

export function renderModeration(root: HTMLElement, model: ModerationModel): void {
  const conflicts = [...model.conflicts.entries()]
    .map(
      ([id, note]) => `
        <div class="banner banner-conflict" data-id="${id}">
          entry ${id}: ${escapeHtml(note)}
          <button class="dismiss" data-action="dismiss" data-id="${id}">dismiss</button>
        </div>`,
    )
    .join("");
  const cards = model.pending
    .map(
      (entry) => `
        <li class="card" data-id="${entry.id}">
          <p class="card-text">${escapeHtml(entry.effective_text)}</p>
          <p class="card-meta">
            ${escapeHtml(entry.origin)}
            ${entry.attribution ? " / " + escapeHtml(entry.attribution) : ""}
            ${entry.submitted_at ? " / " + escapeHtml(entry.submitted_at) : ""}
          </p>
          <textarea class="edit-box" data-id="${entry.id}" maxlength="600">${escapeHtml(entry.effective_text)}</textarea>
          <div class="card-actions">
            <button data-action="approve" data-id="${entry.id}">approve</button>
            <button data-action="reject" data-id="${entry.id}">reject</button>
          </div>
        </li>`,
    )
    .join("");
  root.innerHTML = `
    ${banner(model.disconnected, model.lastError)}
    ${conflicts}
    <section>
      <h2>submit a positivtweet</h2>
      <form id="submit-form">
        <textarea id="submit-text" placeholder="something encouraging" maxlength="600"></textarea>
        <input id="submit-attribution" placeholder="attribution (optional)">
        <button type="submit">submit for review</button>
        <span id="submit-error" class="error"></span>
      </form>
    </section>
    <section>
      <h2>pending review (${model.pending.length})</h2>
      <ul class="cards">${cards || "<li class=\"muted\">queue is empty</li>"}</ul>
    </section>`;
}

export function renderAnnotation(root: HTMLElement, model: AnnotationModel): void {
  if (model.phase === "no_plan") {
    root.innerHTML = `
      <div class="empty-state">
        <h2>no study is running</h2>
        <p>Start one from the command line with <code>parity annotate plan</code>
        and restart the server, then come back here.</p>
      </div>`;
    return;
  }
  if (model.phase === "error") {
    root.innerHTML = `<div class="banner banner-offline">${escapeHtml(model.lastError ?? "request failed")}</div>`;
    return;
  }
  if (model.phase === "complete") {
    const a = model.agreementReport;
    if (a === null) {
      root.innerHTML = "<p class=\"muted\">queue finished</p>";
      return;
    }
    root.innerHTML = `
      <div class="completion">
        <h2>all yours are done, thank you</h2>
        <table>
          <tbody>
            <tr><th>sample size</th><td class="num">${formatCount(a.sample_size)}</td></tr>
            <tr><th>items fully labeled</th><td class="num">${formatCount(a.labeled_items)}</td></tr>
            <tr><th>toxic</th><td class="num">${formatCount(a.toxic_count)} (${formatPct(a.toxic_pct)})</td></tr>
            <tr><th>not toxic</th><td class="num">${formatCount(a.not_toxic_count)} (${formatPct(a.not_toxic_pct)})</td></tr>
            <tr><th>undecided</th><td class="num">${formatCount(a.undecided_count)}</td></tr>
            <tr><th>agreement (kappa)</th><td class="num">${formatKappa(a.kappa)}</td></tr>
          </tbody>
        </table>
        ${a.kappa_note ? `<p class="muted">${escapeHtml(a.kappa_note)}</p>` : ""}
      </div>`;
    return;
  }
  const task = model.task;
  if (task === null) {
    root.innerHTML = "<p class=\"muted\">loading…</p>";
    return;
  }
  root.innerHTML = `
    <div class="task">
      <p class="progress">${formatCount(task.labeled)} of ${formatCount(task.assigned)} labeled</p>
      <p class="instructions">${escapeHtml(task.instructions)}</p>
      <div class="task-text">${shaded(task.text, model.revealed)}</div>
      <div class="task-actions">
        <button data-action="label" data-value="TOXIC" ${model.revealed ? "" : "disabled"}>toxic</button>
        <button data-action="label" data-value="NOT_TOXIC" ${model.revealed ? "" : "disabled"}>not toxic</button>
      </div>
    </div>`;
}
