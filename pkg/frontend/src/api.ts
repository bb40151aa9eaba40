// Thin fetch client for the emorank service; every displayed number in
// the UI originates from one of these responses.

import {
  MalformedPayloadError,
  parseProfilePayload,
  parseRecommendation,
  parseSessionPayload,
  type ProfilePayload,
  type RecommendationItem,
  type SessionPayload,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readError(response: Response): Promise<ApiRequestError> {
  let code = "http_error";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiRequestError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(this.url(path), init);
    if (!response.ok) {
      throw await readError(response);
    }
    try {
      return await response.json();
    } catch (exc) {
      throw new MalformedPayloadError(`response is not JSON: ${String(exc)}`);
    }
  }

  async createSession(candidateId: string): Promise<SessionPayload> {
    const raw = await this.request("/v1/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ candidate_id: candidateId }),
    });
    return parseSessionPayload(raw);
  }

  async getSession(sessionId: string): Promise<SessionPayload> {
    const raw = await this.request(`/v1/sessions/${encodeURIComponent(sessionId)}`);
    return parseSessionPayload(raw);
  }

  /** Submits one round; round_index doubles as the idempotency key. */
  async submitRatings(
    sessionId: string,
    ratings: Record<string, number>,
    roundIndex: number,
  ): Promise<SessionPayload> {
    const raw = await this.request(
      `/v1/sessions/${encodeURIComponent(sessionId)}/ratings`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ratings, round_index: roundIndex }),
      },
    );
    return parseSessionPayload(raw);
  }

  async getProfile(candidateId: string): Promise<ProfilePayload> {
    const raw = await this.request(
      `/v1/candidates/${encodeURIComponent(candidateId)}/profile`,
    );
    return parseProfilePayload(raw);
  }

  async getRecommendations(
    candidateId: string,
    context?: string,
  ): Promise<RecommendationItem[]> {
    const query = context ? `?context=${encodeURIComponent(context)}` : "";
    const raw = (await this.request(
      `/v1/candidates/${encodeURIComponent(candidateId)}/recommendations${query}`,
    )) as { items?: unknown[] };
    if (!Array.isArray(raw.items)) {
      throw new MalformedPayloadError("recommendations payload missing items");
    }
    return raw.items.map(parseRecommendation);
  }
}
