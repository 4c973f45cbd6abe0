// Typed API client. The console is a pure client of the moderation service:
// every number it displays comes from here, never from local recomputation.

import type {
  ApiErrorBody,
  Flag,
  FlagPage,
  LeaderboardEntry,
  PersonasResponse,
  Reward,
  SentimentBucket,
  WeightsResponse,
} from "./types.js";

export interface ConsoleSession {
  baseUrl: string;
  token: string | null;
  moderatorId: string;
  communityId: string;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: ApiErrorBody["code"],
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function freshKey(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `key-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class ApiClient {
  constructor(
    private readonly session: ConsoleSession,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    idempotencyKey?: string,
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.session.token) {
      headers["Authorization"] = `Bearer ${this.session.token}`;
    }
    if (idempotencyKey) {
      headers["Idempotency-Key"] = idempotencyKey;
    }
    const response = await this.fetchImpl(`${this.session.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let parsed: Partial<ApiErrorBody> = {};
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; fall through to the generic message
      }
      throw new ApiError(
        response.status,
        parsed.code ?? "internal",
        parsed.message ?? `request failed: ${response.status}`,
      );
    }
    return (await response.json()) as T;
  }

  listFlags(state = "pending", limit = 50, cursor = 0): Promise<FlagPage> {
    return this.request("GET", `/api/flags?state=${state}&limit=${limit}&cursor=${cursor}`);
  }

  decideFlag(
    flagId: string,
    verdict: "upheld" | "overturned",
    options: { note?: string; label?: string; idempotencyKey?: string } = {},
  ): Promise<Flag> {
    return this.request(
      "POST",
      `/api/flags/${flagId}/decision`,
      {
        verdict,
        moderator_id: this.session.moderatorId,
        note: options.note ?? null,
        label: options.label ?? null,
      },
      options.idempotencyKey ?? freshKey(),
    );
  }

  listRewards(state = "pending"): Promise<{ items: Reward[] }> {
    return this.request("GET", `/api/rewards?state=${state}`);
  }

  decideReward(
    rewardId: string,
    verdict: "approved" | "rejected",
    idempotencyKey?: string,
  ): Promise<Reward> {
    return this.request(
      "POST",
      `/api/rewards/${rewardId}/decision`,
      { verdict, moderator_id: this.session.moderatorId },
      idempotencyKey ?? freshKey(),
    );
  }

  personas(persona?: string): Promise<PersonasResponse> {
    const query = persona ? `?persona=${persona}` : "";
    return this.request("GET", `/api/personas${query}`);
  }

  sentiment(params: { channel?: string; from?: string; to?: string } = {}): Promise<{
    items: SentimentBucket[];
  }> {
    const search = new URLSearchParams({ window: "daily" });
    if (params.channel) search.set("channel", params.channel);
    if (params.from) search.set("from", params.from);
    if (params.to) search.set("to", params.to);
    return this.request("GET", `/api/sentiment?${search.toString()}`);
  }

  leaderboard(limit = 20): Promise<{ items: LeaderboardEntry[] }> {
    return this.request("GET", `/api/contributions/leaderboard?limit=${limit}`);
  }

  getWeights(): Promise<WeightsResponse> {
    return this.request("GET", "/api/config/weights");
  }

  putWeights(weights: Record<string, number>): Promise<WeightsResponse> {
    return this.request("PUT", "/api/config/weights", { weights });
  }

  exportRetraining(task: string): Promise<{ path: string; count: number }> {
    return this.request("POST", "/api/export/retraining", { task, source: "curation" });
  }
}
