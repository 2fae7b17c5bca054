import type {
  ElementId,
  EventRecord,
  HttpReply,
  RecommendResponseBody,
  SessionContext,
  Transport,
} from "./types.js";

/** Transport backed by fetch. Network failures reject; HTTP errors resolve. */
export function fetchTransport(apiBase: string): Transport {
  const url = (path: string) => `${apiBase}${path}`;
  const decode = async (response: Response): Promise<HttpReply> => {
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    return { status: response.status, body };
  };
  return {
    async post(path, body, signal) {
      const response = await fetch(url(path), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal,
      });
      return decode(response);
    },
    async get(path) {
      return decode(await fetch(url(path)));
    },
  };
}

export type RecommendOutcome =
  | { kind: "ok"; body: RecommendResponseBody }
  | { kind: "not_ready" }
  | { kind: "rejected"; status: number };

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  /**
   * Uploads one batch of events; true means the service processed the
   * batch. Per-record rejections inside a 200 are final, so resending
   * the batch would change nothing.
   */
  async postEvents(records: EventRecord[]): Promise<boolean> {
    const reply = await this.transport.post("/api/events", { events: records });
    return reply.status === 200;
  }

  async recommend(
    context: SessionContext,
    recent: ElementId[],
    k: number,
    signal?: AbortSignal,
  ): Promise<RecommendOutcome> {
    const reply = await this.transport.post(
      "/api/recommend",
      { role: context.role, shift: context.shift, recent, k },
      signal,
    );
    if (reply.status === 200) {
      return { kind: "ok", body: reply.body as RecommendResponseBody };
    }
    if (reply.status === 409) return { kind: "not_ready" };
    return { kind: "rejected", status: reply.status };
  }

  async health(): Promise<boolean> {
    try {
      const reply = await this.transport.get("/api/health");
      return reply.status === 200;
    } catch {
      return false;
    }
  }
}
