import type { Settings } from "./types.js";

const DEFAULT_POLL_SECONDS = 5;

/**
 * Connection settings for one console session. The token lives only in this
 * object; it is never written to storage of any kind, so a reload always
 * returns to the login screen.
 */
export class ConsoleSession {
  readonly apiBaseUrl: string;
  readonly token: string | null;
  readonly annotatorId: string | null;
  readonly pollIntervalSeconds: number;

  constructor(
    apiBaseUrl: string,
    token: string | null,
    annotatorId?: string | null,
    pollIntervalSeconds?: number,
  ) {
    if (!apiBaseUrl) throw new Error("apiBaseUrl is required");
    const interval = pollIntervalSeconds ?? DEFAULT_POLL_SECONDS;
    if (!Number.isFinite(interval) || interval < 1) {
      throw new Error(`poll interval must be at least 1 second, got ${interval}`);
    }
    this.apiBaseUrl = apiBaseUrl;
    this.token = token;
    this.annotatorId = annotatorId ?? null;
    this.pollIntervalSeconds = interval;
  }

  static fromSettings(
    settings: Settings,
    token: string | null,
    annotatorId?: string | null,
  ): ConsoleSession {
    return new ConsoleSession(
      settings.apiBaseUrl,
      token,
      annotatorId,
      settings.pollIntervalSeconds,
    );
  }
}
