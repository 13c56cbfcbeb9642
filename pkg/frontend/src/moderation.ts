import { ApiClient, ApiError } from "./api.js";
import type { PositivTweet } from "./types.js";

export const MAX_TWEET_CHARS = 280;

export interface ReviewResult {
  ok: boolean;
  /** "conflict" when someone else reviewed the entry first. */
  error: string | null;
}

/**
 * State behind the moderation queue. Mutations are never optimistic: a card
 * leaves the pending list only after the server confirms the review, via the
 * refresh that follows every 2xx. A 409 means a second moderator got there
 * first; the card is marked as a conflict and the queue refreshed so the
 * stale entry disappears.
 */
export class ModerationModel {
  pending: PositivTweet[] = [];
  disconnected = false;
  lastError: string | null = null;
  /** entry id -> notice, kept until dismissed so the view can show it */
  readonly conflicts = new Map<number, string>();

  constructor(private readonly client: ApiClient) {}

  async refresh(): Promise<void> {
    try {
      const page = await this.client.positivtweets("PENDING");
      this.pending = page.items;
      this.disconnected = false;
      this.lastError = null;
    } catch (err) {
      this.disconnected = true;
      this.lastError = err instanceof Error ? err.message : String(err);
    }
  }

  dismissConflict(id: number): void {
    this.conflicts.delete(id);
  }

  /**
   * Client-side length check, applied before any network call. Returns an
   * error string, or null when the text fits. The server trims before
   * counting, so the check trims too.
   */
  validateText(text: string): string | null {
    const trimmed = text.trim();
    if (trimmed.length === 0) return "text is empty";
    if (trimmed.length > MAX_TWEET_CHARS) {
      return `${trimmed.length} characters is over the ${MAX_TWEET_CHARS} limit`;
    }
    return null;
  }

  async submit(text: string, attribution?: string): Promise<ReviewResult> {
    const problem = this.validateText(text);
    if (problem !== null) return { ok: false, error: problem };
    try {
      await this.client.submitPositivtweet(text.trim(), attribution);
    } catch (err) {
      return { ok: false, error: err instanceof Error ? err.message : String(err) };
    }
    await this.refresh();
    return { ok: true, error: null };
  }

  async approve(id: number, editedText?: string): Promise<ReviewResult> {
    if (editedText !== undefined) {
      const problem = this.validateText(editedText);
      if (problem !== null) return { ok: false, error: problem };
    }
    return this.review(id, "APPROVE", editedText?.trim());
  }

  async reject(id: number): Promise<ReviewResult> {
    return this.review(id, "REJECT", undefined);
  }

  private async review(
    id: number,
    verdict: "APPROVE" | "REJECT",
    editedText: string | undefined,
  ): Promise<ReviewResult> {
    try {
      await this.client.review(id, verdict, editedText);
    } catch (err) {
      if (err instanceof ApiError && err.code === "NOT_PENDING") {
        this.conflicts.set(id, "already reviewed");
        await this.refresh();
        return { ok: false, error: "already reviewed" };
      }
      return { ok: false, error: err instanceof Error ? err.message : String(err) };
    }
    await this.refresh();
    return { ok: true, error: null };
  }
}
