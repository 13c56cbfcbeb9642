import { ApiClient } from "./api.js";
import type {
  CandidateReport,
  FeedItem,
  LexiconRow,
  ReportPayload,
} from "./types.js";

export interface DashboardOptions {
  pageSize?: number;
  maxItems?: number;
}

/**
 * State behind the dashboard view: the flagged-tweet feed plus the report
 * counters. Refreshes are incremental; after the first full fetch only
 * tweets at or after the newest seen timestamp are requested, and the map
 * keyed by tweet_id swallows the duplicates an inclusive `since` produces.
 *
 * On any fetch failure the previous state stays visible and `disconnected`
 * flips on; stale data is better than a blank screen.
 */
export class DashboardModel {
  readonly election: string;
  disconnected = false;
  lastError: string | null = null;
  report: ReportPayload | null = null;

  private readonly client: ApiClient;
  private readonly pageSize: number;
  private readonly maxItems: number;
  private readonly byId = new Map<string, FeedItem>();
  private since: string | null = null;

  constructor(client: ApiClient, election: string, options: DashboardOptions = {}) {
    this.client = client;
    this.election = election;
    this.pageSize = options.pageSize ?? 50;
    this.maxItems = options.maxItems ?? 200;
  }

  /** Feed items newest first. */
  get items(): FeedItem[] {
    const rows = [...this.byId.values()];
    rows.sort((a, b) => {
      if (a.created_at !== b.created_at) return a.created_at < b.created_at ? 1 : -1;
      return a.tweet_id < b.tweet_id ? 1 : -1;
    });
    return rows.slice(0, this.maxItems);
  }

  async refresh(): Promise<void> {
    try {
      await this.pullFeed();
      this.report = await this.client.reports(this.election);
      this.disconnected = false;
      this.lastError = null;
    } catch (err) {
      this.disconnected = true;
      this.lastError = err instanceof Error ? err.message : String(err);
    }
  }

  private async pullFeed(): Promise<void> {
    let cursor: string | undefined;
    let fetched = 0;
    let newest = this.since;
    // The feed is newest first, so page one already holds everything fresh;
    // deeper pages only matter on the initial fill.
    for (;;) {
      const page = await this.client.feed(this.election, {
        since: this.since ?? undefined,
        cursor,
        page_size: this.pageSize,
      });
      for (const item of page.items) {
        this.byId.set(item.tweet_id, item);
        if (newest === null || item.created_at > newest) newest = item.created_at;
      }
      fetched += page.items.length;
      if (page.next_cursor === null || fetched >= this.maxItems) break;
      cursor = page.next_cursor;
    }
    this.since = newest;
    this.trim();
  }

  private trim(): void {
    if (this.byId.size <= this.maxItems) return;
    const rows = [...this.byId.values()];
    rows.sort((a, b) => {
      if (a.created_at !== b.created_at) return a.created_at < b.created_at ? 1 : -1;
      return a.tweet_id < b.tweet_id ? 1 : -1;
    });
    for (const drop of rows.slice(this.maxItems)) {
      this.byId.delete(drop.tweet_id);
    }
  }

  /** Candidates ordered by their share of total toxic tweets, largest first. */
  topCandidates(limit = 10): CandidateReport[] {
    if (this.report === null) return [];
    const rows = [...this.report.candidates];
    rows.sort((a, b) => {
      if (a.share_of_total_toxic !== b.share_of_total_toxic) {
        return b.share_of_total_toxic - a.share_of_total_toxic;
      }
      return a.handle < b.handle ? -1 : 1;
    });
    return rows.slice(0, limit);
  }

  /** Lexicon rows across all candidates, for the false-negative panel. */
  lexiconRows(): Array<LexiconRow & { handle: string }> {
    if (this.report === null) return [];
    const out: Array<LexiconRow & { handle: string }> = [];
    for (const candidate of this.report.candidates) {
      for (const row of candidate.lexicon_rows) {
        out.push({ handle: candidate.handle, ...row });
      }
    }
    return out;
  }
}
