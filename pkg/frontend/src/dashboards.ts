// Read-only dashboards: community composition and the daily sentiment pulse.
// Every figure is fetched; the only client-side arithmetic is the overlap
// call-out, which restates the server's own counts.

import { ApiClient } from "./client.js";
import type { CompositionReport, SentimentBucket } from "./types.js";

export interface CompositionView {
  report: CompositionReport;
  /** Users counted in both the crypto and fan groups (why counts exceed users). */
  overlap: number;
}

export async function loadComposition(client: ApiClient): Promise<CompositionView | null> {
  const response = await client.personas();
  const report = response.report;
  if (report.active_users === 0) return null;
  const overlap = report.n_crypto + report.n_fan - (report.active_users - report.n_casual);
  return { report, overlap };
}

export interface SentimentSeries {
  channel: string;
  points: { day: string; mean: number | null; total: number }[];
}

export async function loadSentiment(
  client: ApiClient,
  channel?: string,
): Promise<SentimentSeries[]> {
  const { items } = await client.sentiment(channel ? { channel } : {});
  const byChannel = new Map<string, SentimentBucket[]>();
  for (const bucket of items) {
    const list = byChannel.get(bucket.channel_id) ?? [];
    list.push(bucket);
    byChannel.set(bucket.channel_id, list);
  }
  return [...byChannel.entries()].map(([channelId, buckets]) => ({
    channel: channelId,
    points: buckets
      .sort((a, b) => a.window_start.localeCompare(b.window_start))
      .map((b) => ({
        day: b.window_start.slice(0, 10),
        mean: b.mean_score,
        total: b.n_positive + b.n_neutral + b.n_negative,
      })),
  }));
}
