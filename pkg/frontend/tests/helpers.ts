// Shared test plumbing: a recording fetch stub and response builders.

export interface RecordedCall {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: unknown;
}

type Handler = (call: RecordedCall) => Response | Promise<Response>;

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function emptyResponse(status = 204): Response {
  return new Response(null, { status });
}

export function errorResponse(status: number, code: string, message = "boom"): Response {
  return jsonResponse(status, { error: { code, message } });
}

/**
 * A fetch double that records every call and routes it to the handler.
 * Tests inspect `calls` for URLs, headers, and decoded JSON bodies.
 */
export function stubFetch(handler: Handler) {
  const calls: RecordedCall[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    const call: RecordedCall = {
      url,
      method: init?.method ?? "GET",
      headers: (init?.headers as Record<string, string>) ?? {},
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    };
    calls.push(call);
    return handler(call);
  };
  return { fetchImpl, calls };
}

/** Routes by "METHOD /path" prefix; unmatched requests return 404. */
export function routedFetch(routes: Record<string, Handler>) {
  return stubFetch((call) => {
    const path = new URL(call.url).pathname;
    const key = `${call.method} ${path}`;
    const handler = routes[key];
    if (handler === undefined) {
      return errorResponse(404, "NO_ROUTE", `no stub for ${key}`);
    }
    return handler(call);
  });
}
