// Reward recommendation review: pending items with the author's recent
// contribution events for context; approve/reject mirrors the flag flow.

import { ApiClient, ApiError } from "./client.js";
import type { Reward } from "./types.js";
import type { Toast } from "./flagQueue.js";

export class RewardReviewController {
  rewards: Reward[] = [];
  toasts: Toast[] = [];
  private inFlight = new Set<string>();
  private decisionKeys = new Map<string, string>();

  constructor(private readonly client: ApiClient) {}

  get empty(): boolean {
    return this.rewards.length === 0;
  }

  async refresh(): Promise<void> {
    this.rewards = (await this.client.listRewards("pending")).items;
  }

  async decide(rewardId: string, verdict: "approved" | "rejected"): Promise<Reward | null> {
    if (this.inFlight.has(rewardId)) return null;
    let key = this.decisionKeys.get(rewardId);
    if (key === undefined) {
      key = `${rewardId}-${Date.now()}-${Math.random().toString(36).slice(2)}`;
      this.decisionKeys.set(rewardId, key);
    }
    this.inFlight.add(rewardId);
    try {
      const decided = await this.client.decideReward(rewardId, verdict, key);
      this.rewards = this.rewards.filter((r) => r.reward_id !== rewardId);
      this.decisionKeys.delete(rewardId);
      return decided;
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.toasts.push({
          kind: "conflict",
          text: `Reward ${rewardId} was already decided elsewhere.`,
        });
        this.rewards = this.rewards.filter((r) => r.reward_id !== rewardId);
        return null;
      }
      throw error;
    } finally {
      this.inFlight.delete(rewardId);
    }
  }

  takeToasts(): Toast[] {
    const out = this.toasts;
    this.toasts = [];
    return out;
  }
}
