// Payload shapes for the moderation service API.

export interface FlagMessage {
  content: string;
  author_id: string;
  channel_id: string;
  timestamp: string;
}

export interface Flag {
  flag_id: string;
  message_id: string;
  predicted_label: string; // toxic | spam | needs_label
  scores: Record<string, number> | null;
  state: "pending" | "upheld" | "overturned";
  decided_by: string | null;
  decided_at: string | null;
  note: string | null;
  message: FlagMessage | null;
  context: string[];
  cursor?: number;
}

export interface FlagPage {
  items: Flag[];
  next: number | null;
}

export interface ContributionEvent {
  message_id: string;
  author_id: string;
  label: string;
  weight: number;
  occurred_at: string;
}

export interface Reward {
  reward_id: string;
  author_id: string;
  trigger_score: number;
  multiple: number;
  state: "pending" | "approved" | "rejected";
  decided_by: string | null;
  decided_at: string | null;
  current_score: number;
  recent_events: ContributionEvent[];
}

export interface CompositionReport {
  active_users: number;
  n_crypto: number;
  n_fan: number;
  n_casual: number;
  pct_crypto: number;
  pct_fan: number;
  pct_casual: number;
  message_distribution: Record<string, number>;
}

export interface PersonaProfile {
  author_id: string;
  counts: Record<string, number>;
  is_crypto_enthusiast: boolean;
  is_fan: boolean;
  is_casual: boolean;
}

export interface PersonasResponse {
  report: CompositionReport;
  profiles: PersonaProfile[];
  next: number | null;
}

export interface SentimentBucket {
  channel_id: string;
  window_start: string;
  window_end: string;
  n_positive: number;
  n_neutral: number;
  n_negative: number;
  mean_score: number | null;
}

export interface LeaderboardEntry {
  author_id: string;
  score: number;
  high_water_mark: number;
  event_count: number;
  personas: string[];
}

export interface WeightsResponse {
  community_id: string;
  weights: Record<string, number>;
}

export interface ApiErrorBody {
  code: "not_found" | "conflict" | "validation" | "backend_unavailable" | "internal";
  message: string;
}

export const CONTRIBUTION_LABELS = [
  "na",
  "onboarding",
  "knowledge_tcg",
  "knowledge_fan",
  "knowledge_crypto",
  "content",
  "moderation",
  "suggestion",
] as const;
