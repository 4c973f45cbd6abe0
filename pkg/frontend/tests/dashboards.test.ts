import { describe, expect, it } from "vitest";

import { ApiClient, ConsoleSession, FetchLike } from "../src/client.js";
import { loadComposition, loadSentiment } from "../src/dashboards.js";

const SESSION: ConsoleSession = {
  baseUrl: "http://svc.test",
  token: null,
  moderatorId: "mod-1",
  communityId: "c",
};

function fetchReturning(routes: Record<string, unknown>): FetchLike {
  return async (url) => {
    for (const [prefix, body] of Object.entries(routes)) {
      if (url.includes(prefix)) return new Response(JSON.stringify(body), { status: 200 });
    }
    throw new Error(`no route for ${url}`);
  };
}

describe("dashboards", () => {
  it("derives the overlap call-out from the server report", async () => {
    const client = new ApiClient(
      SESSION,
      fetchReturning({
        "/api/personas": {
          report: {
            active_users: 1121,
            n_crypto: 343,
            n_fan: 243,
            n_casual: 716,
            pct_crypto: 31,
            pct_fan: 22,
            pct_casual: 64,
            message_distribution: { crypto: 0.18, fan: 0.25, casual: 0.57 },
          },
          profiles: [],
          next: null,
        },
      }),
    );
    const view = await loadComposition(client);
    expect(view).not.toBeNull();
    expect(view!.overlap).toBe(181);
    expect(view!.report.pct_crypto).toBe(31);
  });

  it("returns null for an empty community", async () => {
    const client = new ApiClient(
      SESSION,
      fetchReturning({
        "/api/personas": {
          report: {
            active_users: 0, n_crypto: 0, n_fan: 0, n_casual: 0,
            pct_crypto: 0, pct_fan: 0, pct_casual: 0, message_distribution: {},
          },
          profiles: [],
          next: null,
        },
      }),
    );
    expect(await loadComposition(client)).toBeNull();
  });

  it("groups sentiment buckets into per-channel series", async () => {
    const client = new ApiClient(
      SESSION,
      fetchReturning({
        "/api/sentiment": {
          items: [
            { channel_id: "ALL", window_start: "2024-01-02T00:00:00+00:00", window_end: "2024-01-03T00:00:00+00:00", n_positive: 1, n_neutral: 0, n_negative: 0, mean_score: 1.0 },
            { channel_id: "ALL", window_start: "2024-01-01T00:00:00+00:00", window_end: "2024-01-02T00:00:00+00:00", n_positive: 1, n_neutral: 1, n_negative: 1, mean_score: 0.0 },
          ],
        },
      }),
    );
    const series = await loadSentiment(client);
    expect(series).toHaveLength(1);
    expect(series[0]!.points.map((p) => p.day)).toEqual(["2024-01-01", "2024-01-02"]);
    expect(series[0]!.points[0]!.mean).toBe(0.0);
  });
});
