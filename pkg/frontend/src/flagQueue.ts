// Flag review flow: a cursor over the pending queue, oldest first.
// Deciding posts to the service and advances; decided flags leave the local
// queue immediately, no reload. A 409 means another moderator got there
// first: surface it and drop the flag from view.

import { ApiClient, ApiError } from "./client.js";
import type { Flag } from "./types.js";

export interface Toast {
  kind: "info" | "conflict" | "error";
  text: string;
}

export interface DecisionOutcome {
  status: "decided" | "conflict" | "error";
  flag: Flag | null;
}

export class FlagReviewController {
  flags: Flag[] = [];
  index = 0;
  decidedCount = 0;
  toasts: Toast[] = [];
  private inFlight = new Set<string>();
  private decisionKeys = new Map<string, string>();

  constructor(private readonly client: ApiClient) {}

  get current(): Flag | null {
    return this.flags[this.index] ?? null;
  }

  get empty(): boolean {
    return this.flags.length === 0;
  }

  async refresh(): Promise<void> {
    const page = await this.client.listFlags("pending", 100);
    const currentId = this.current?.flag_id;
    this.flags = page.items; // server order: oldest first
    const kept = this.flags.findIndex((f) => f.flag_id === currentId);
    this.index = kept >= 0 ? kept : Math.min(this.index, Math.max(this.flags.length - 1, 0));
  }

  next(): void {
    if (this.index < this.flags.length - 1) this.index += 1;
  }

  previous(): void {
    if (this.index > 0) this.index -= 1;
  }

  /** Uphold/overturn the focused flag and advance. Safe against double-clicks:
   * repeat calls while a decision is in flight are ignored, and retries reuse
   * the same idempotency key. */
  async decide(
    verdict: "upheld" | "overturned",
    options: { note?: string; label?: string } = {},
  ): Promise<DecisionOutcome> {
    const flag = this.current;
    if (flag === null) return { status: "error", flag: null };
    if (this.inFlight.has(flag.flag_id)) return { status: "error", flag };
    let key = this.decisionKeys.get(flag.flag_id);
    if (key === undefined) {
      key = `${flag.flag_id}-${Date.now()}-${Math.random().toString(36).slice(2)}`;
      this.decisionKeys.set(flag.flag_id, key);
    }
    this.inFlight.add(flag.flag_id);
    try {
      const decided = await this.client.decideFlag(flag.flag_id, verdict, {
        ...options,
        idempotencyKey: key,
      });
      this.decidedCount += 1;
      this.removeFromQueue(flag.flag_id);
      return { status: "decided", flag: decided };
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.toasts.push({
          kind: "conflict",
          text: `Flag ${flag.flag_id} was already decided by another moderator.`,
        });
        this.removeFromQueue(flag.flag_id);
        await this.safeRefresh();
        return { status: "conflict", flag };
      }
      this.toasts.push({
        kind: "error",
        text: error instanceof Error ? error.message : String(error),
      });
      return { status: "error", flag };
    } finally {
      this.inFlight.delete(flag.flag_id);
    }
  }

  private removeFromQueue(flagId: string): void {
    const at = this.flags.findIndex((f) => f.flag_id === flagId);
    if (at >= 0) {
      this.flags.splice(at, 1);
      if (this.index >= this.flags.length) {
        this.index = Math.max(this.flags.length - 1, 0);
      }
    }
    this.decisionKeys.delete(flagId);
  }

  private async safeRefresh(): Promise<void> {
    try {
      await this.refresh();
    } catch {
      // keep the local queue; the next poll will reconcile
    }
  }

  takeToasts(): Toast[] {
    const out = this.toasts;
    this.toasts = [];
    return out;
  }
}
