// Browser shell: tabbed views, keyboard-first review flow, 10s polling.
// Keys: u uphold, o overturn, j/k move, r refresh.

import { ApiClient, ConsoleSession } from "./client.js";
import { loadComposition, loadSentiment } from "./dashboards.js";
import { FlagReviewController, Toast } from "./flagQueue.js";
import { RewardReviewController } from "./rewards.js";
import { CONTRIBUTION_LABELS } from "./types.js";
import { WeightTuner } from "./weights.js";

const POLL_MS = 10_000;
const SESSION_KEY = "hypermod-console-session";

type View = "flags" | "rewards" | "weights" | "dashboards" | "settings";

function loadSession(): ConsoleSession {
  const raw = localStorage.getItem(SESSION_KEY);
  if (raw) {
    try {
      return JSON.parse(raw) as ConsoleSession;
    } catch {
      // fall through to defaults
    }
  }
  return { baseUrl: "http://127.0.0.1:8800", token: null, moderatorId: "", communityId: "" };
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ConsoleApp {
  session: ConsoleSession;
  client: ApiClient;
  flagQueue: FlagReviewController;
  rewardQueue: RewardReviewController;
  weightTuner: WeightTuner;
  view: View = "flags";
  private pollTimer: number | null = null;

  constructor(private readonly root: HTMLElement) {
    this.session = loadSession();
    this.client = new ApiClient(this.session);
    this.flagQueue = new FlagReviewController(this.client);
    this.rewardQueue = new RewardReviewController(this.client);
    this.weightTuner = new WeightTuner(this.client);
  }

  async start(): Promise<void> {
    document.addEventListener("keydown", (event) => this.onKey(event));
    if (!this.session.moderatorId) this.view = "settings";
    await this.show(this.view);
    this.pollTimer = window.setInterval(() => void this.poll(), POLL_MS);
  }

  private async poll(): Promise<void> {
    if (this.view === "flags" || this.view === "rewards" || this.view === "dashboards") {
      await this.show(this.view);
    }
  }

  private onKey(event: KeyboardEvent): void {
    if (this.view !== "flags" || event.target instanceof HTMLInputElement) return;
    if (event.key === "u") void this.decideCurrent("upheld");
    else if (event.key === "o") void this.decideCurrent("overturned");
    else if (event.key === "j") {
      this.flagQueue.next();
      this.renderFlags();
    } else if (event.key === "k") {
      this.flagQueue.previous();
      this.renderFlags();
    } else if (event.key === "r") void this.show("flags");
  }

  private async decideCurrent(verdict: "upheld" | "overturned"): Promise<void> {
    const current = this.flagQueue.current;
    const needsLabel = current?.predicted_label === "needs_label" && verdict === "upheld";
    const label = needsLabel
      ? window.prompt("Gold label for this message (toxic or spam):") ?? undefined
      : undefined;
    await this.flagQueue.decide(verdict, label ? { label } : {});
    this.renderFlags();
  }

  async show(view: View): Promise<void> {
    this.view = view;
    try {
      if (view === "flags") {
        await this.flagQueue.refresh();
        this.renderFlags();
      } else if (view === "rewards") {
        await this.rewardQueue.refresh();
        this.renderRewards();
      } else if (view === "weights") {
        await this.weightTuner.load();
        this.renderWeights();
      } else if (view === "dashboards") {
        await this.renderDashboards();
      } else {
        this.renderSettings();
      }
    } catch (error) {
      this.renderShell();
      this.main().append(
        el("p", "error", `Service unreachable: ${error instanceof Error ? error.message : error}`),
      );
    }
  }

  private main(): HTMLElement {
    return this.root.querySelector("main") as HTMLElement;
  }

  private renderShell(): void {
    this.root.textContent = "";
    const nav = el("nav");
    for (const view of ["flags", "rewards", "weights", "dashboards", "settings"] as View[]) {
      const button = el("button", this.view === view ? "active" : "", view);
      button.addEventListener("click", () => void this.show(view));
      nav.append(button);
    }
    this.root.append(nav, el("main"));
    this.renderToasts([...this.flagQueue.takeToasts(), ...this.rewardQueue.takeToasts()]);
  }

  private renderToasts(toasts: Toast[]): void {
    if (!toasts.length) return;
    const holder = el("div", "toasts");
    for (const toast of toasts) holder.append(el("div", `toast ${toast.kind}`, toast.text));
    this.root.append(holder);
  }

  private renderFlags(): void {
    this.renderShell();
    const main = this.main();
    main.append(
      el("p", "meta", `decided this session: ${this.flagQueue.decidedCount}`),
    );
    if (this.flagQueue.empty) {
      main.append(el("p", "empty", "No pending flags."));
      return;
    }
    const flag = this.flagQueue.current;
    if (!flag) return;
    const card = el("section", "flag-card");
    card.append(
      el("h2", "", `${flag.predicted_label} · ${flag.flag_id}`),
      el(
        "p",
        "position",
        `${this.flagQueue.index + 1} of ${this.flagQueue.flags.length} pending`,
      ),
    );
    for (const prior of flag.context) card.append(el("p", "context", prior));
    card.append(el("p", "message", flag.message?.content ?? "(message unavailable)"));
    if (flag.scores) {
      const scores = Object.entries(flag.scores)
        .map(([label, score]) => `${label} ${score.toFixed(2)}`)
        .join("  ");
      card.append(el("p", "scores", scores));
    }
    card.append(el("p", "hint", "u = uphold · o = overturn · j/k = move · r = refresh"));
    main.append(card);
  }

  private renderRewards(): void {
    this.renderShell();
    const main = this.main();
    if (this.rewardQueue.empty) {
      main.append(el("p", "empty", "No pending reward recommendations."));
      return;
    }
    for (const reward of this.rewardQueue.rewards) {
      const card = el("section", "reward-card");
      card.append(
        el("h2", "", `${reward.author_id} · m=${reward.multiple}`),
        el("p", "", `score ${reward.current_score.toFixed(1)} (triggered at ${reward.trigger_score.toFixed(1)})`),
      );
      for (const event of reward.recent_events) {
        card.append(el("p", "context", `${event.label} (+${event.weight}) ${event.message_id}`));
      }
      for (const verdict of ["approved", "rejected"] as const) {
        const button = el("button", "", verdict);
        button.addEventListener("click", () => {
          void this.rewardQueue.decide(reward.reward_id, verdict).then(() => this.renderRewards());
        });
        card.append(button);
      }
      main.append(card);
    }
  }

  private renderWeights(): void {
    this.renderShell();
    const main = this.main();
    const form = el("form", "weights");
    for (const label of CONTRIBUTION_LABELS) {
      const row = el("label", "", `${label} `);
      const input = document.createElement("input");
      input.type = "number";
      input.step = "0.5";
      input.value = String(this.weightTuner.weights[label] ?? 0);
      input.disabled = label === "na"; // locked at 0
      input.addEventListener("input", () => {
        this.weightTuner.edit(label, Number(input.value));
        const message = this.weightTuner.errors[label];
        row.querySelector(".field-error")?.remove();
        if (message) row.append(el("span", "field-error", message));
      });
      row.append(input);
      form.append(row);
    }
    const save = el("button", "", "save");
    save.addEventListener("click", (event) => {
      event.preventDefault();
      void this.weightTuner.save().then(() => this.renderWeights());
    });
    form.append(save);
    if (this.weightTuner.serverError) form.append(el("p", "error", this.weightTuner.serverError));
    if (this.weightTuner.saved) form.append(el("p", "saved", "weights saved"));
    main.append(form);
  }

  private async renderDashboards(): Promise<void> {
    const [composition, sentiment, leaderboard] = await Promise.all([
      loadComposition(this.client),
      loadSentiment(this.client),
      this.client.leaderboard(10),
    ]);
    this.renderShell();
    const main = this.main();
    if (composition === null) {
      main.append(el("p", "empty", "No persona data yet."));
    } else {
      const r = composition.report;
      main.append(
        el("h2", "", "Community composition"),
        el(
          "p",
          "",
          `${r.active_users} active users · crypto ${r.n_crypto} (${r.pct_crypto}%) · ` +
            `fan ${r.n_fan} (${r.pct_fan}%) · casual ${r.n_casual} (${r.pct_casual}%)`,
        ),
        el("p", "meta", `${composition.overlap} users are both crypto and fan`),
      );
    }
    main.append(el("h2", "", "Sentiment pulse (daily mean)"));
    if (!sentiment.length) {
      main.append(el("p", "empty", "No sentiment data yet."));
    } else {
      for (const series of sentiment) {
        const line = series.points
          .map((p) => `${p.day} ${p.mean === null ? "-" : p.mean.toFixed(2)}`)
          .join("  ");
        main.append(el("p", "series", `${series.channel}: ${line}`));
      }
    }
    main.append(el("h2", "", "Top contributors"));
    for (const entry of leaderboard.items) {
      main.append(
        el(
          "p",
          "series",
          `${entry.author_id} · ${entry.score.toFixed(1)} · ${entry.personas.join(", ") || "casual"}`,
        ),
      );
    }
  }

  private renderSettings(): void {
    this.renderShell();
    const main = this.main();
    const form = el("form", "settings");
    const fields: [keyof ConsoleSession, string][] = [
      ["baseUrl", "service URL"],
      ["token", "bearer token"],
      ["moderatorId", "moderator id"],
      ["communityId", "community id"],
    ];
    const inputs = new Map<keyof ConsoleSession, HTMLInputElement>();
    for (const [key, label] of fields) {
      const row = el("label", "", `${label} `);
      const input = document.createElement("input");
      input.value = String(this.session[key] ?? "");
      inputs.set(key, input);
      row.append(input);
      form.append(row);
    }
    const save = el("button", "", "save");
    save.addEventListener("click", (event) => {
      event.preventDefault();
      this.session = {
        baseUrl: inputs.get("baseUrl")!.value.replace(/\/$/, ""),
        token: inputs.get("token")!.value || null,
        moderatorId: inputs.get("moderatorId")!.value,
        communityId: inputs.get("communityId")!.value,
      };
      localStorage.setItem(SESSION_KEY, JSON.stringify(this.session));
      this.client = new ApiClient(this.session);
      this.flagQueue = new FlagReviewController(this.client);
      this.rewardQueue = new RewardReviewController(this.client);
      this.weightTuner = new WeightTuner(this.client);
      void this.show("flags");
    });
    form.append(save);
    main.append(form);
  }
}

export function mount(rootId = "app"): ConsoleApp {
  const root = document.getElementById(rootId);
  if (!root) throw new Error(`no #${rootId} element`);
  const app = new ConsoleApp(root);
  void app.start();
  return app;
}
