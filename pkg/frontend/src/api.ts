import type {
  Agreement,
  FeedPage,
  LabelOut,
  LabelValue,
  PositivState,
  PositivTweet,
  PositivTweetList,
  ReportPayload,
  Task,
} from "./types.js";

/** Error raised for any non-2xx response, carrying the server's error code. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

export interface FeedQuery {
  since?: string;
  min_toxicity?: number;
  cursor?: string;
  page_size?: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed wrapper over the HTTP API. Holds the bearer token in memory
 * only; nothing here touches storage. Every method rejects with ApiError on
 * a non-2xx response and with the underlying error on network failure.
 */
export class ApiClient {
  private readonly baseUrl: string;
  private readonly token: string | null;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, token: string | null, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.token = token;
    // bind: the global fetch loses its receiver when passed around as a value
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(
    method: string,
    path: string,
    query?: Record<string, string | number | undefined>,
    body?: unknown,
  ): Promise<T | null> {
    let url = this.baseUrl + path;
    if (query) {
      const params = new URLSearchParams();
      for (const [key, value] of Object.entries(query)) {
        if (value !== undefined) params.set(key, String(value));
      }
      const qs = params.toString();
      if (qs) url += "?" + qs;
    }
    const headers: Record<string, string> = {};
    if (this.token !== null) headers["Authorization"] = `Bearer ${this.token}`;
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(url, init);
    if (response.status === 204) return null;
    if (!response.ok) throw await this.toApiError(response);
    return (await response.json()) as T;
  }

  private async toApiError(response: Response): Promise<ApiError> {
    let code = "HTTP_" + response.status;
    let message = response.statusText || "request failed";
    try {
      const payload = (await response.json()) as {
        error?: { code?: string; message?: string };
      };
      if (payload.error?.code) code = payload.error.code;
      if (payload.error?.message) message = payload.error.message;
    } catch {
      // non-JSON error body; keep the status-derived defaults
    }
    return new ApiError(response.status, code, message);
  }

  async healthz(): Promise<{ status: string }> {
    return (await this.request("GET", "/v1/healthz")) as { status: string };
  }

  async feed(electionId: string, query: FeedQuery = {}): Promise<FeedPage> {
    return (await this.request("GET", "/v1/feed", {
      election: electionId,
      ...query,
    })) as FeedPage;
  }

  async reports(electionId: string, threshold?: number): Promise<ReportPayload> {
    return (await this.request("GET", "/v1/reports", {
      election: electionId,
      threshold,
    })) as ReportPayload;
  }

  async positivtweets(state?: PositivState): Promise<PositivTweetList> {
    return (await this.request("GET", "/v1/positivtweets", {
      state,
    })) as PositivTweetList;
  }

  async submitPositivtweet(
    text: string,
    attribution?: string,
  ): Promise<PositivTweet> {
    return (await this.request("POST", "/v1/positivtweets", undefined, {
      text,
      attribution: attribution ?? null,
    })) as PositivTweet;
  }

  async review(
    id: number,
    verdict: "APPROVE" | "REJECT",
    editedText?: string,
  ): Promise<PositivTweet> {
    return (await this.request(
      "POST",
      `/v1/positivtweets/${id}/review`,
      undefined,
      { verdict, edited_text: editedText ?? null },
    )) as PositivTweet;
  }

  /** Returns null when the annotator's queue is exhausted (204). */
  async nextTask(annotatorId: string): Promise<Task | null> {
    return await this.request<Task>("GET", "/v1/annotation/next", {
      annotator: annotatorId,
    });
  }

  async submitLabel(
    annotatorId: string,
    tweetId: string,
    value: LabelValue,
  ): Promise<LabelOut> {
    return (await this.request("POST", "/v1/annotation/labels", undefined, {
      tweet_id: tweetId,
      annotator_id: annotatorId,
      value,
    })) as LabelOut;
  }

  async agreement(): Promise<Agreement> {
    return (await this.request("GET", "/v1/annotation/agreement")) as Agreement;
  }
}
