// DOM layer: renders the ranked feed, the persona affinity panel and the
// video query box, and wires the like/dislike feedback loop to the gateway.

import { ApiError, GatewayClient, type FeedCard } from "./api.js";
import {
  affinityBars,
  beginMutation,
  endMutation,
  formatScore,
  initialState,
  validateQuestion,
  type FeedState,
} from "./viewmodel.js";

export interface AppOptions {
  userId: string;
  apiBaseUrl?: string;
  limit?: number;
}

export class FeedApp {
  private client: GatewayClient;
  private state: FeedState = initialState();

  constructor(private root: HTMLElement, private options: AppOptions) {
    this.client = new GatewayClient(options.apiBaseUrl ?? "");
  }

  async start(): Promise<void> {
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const scrollAnchor = window.scrollY ?? 0;
    try {
      const [page, persona] = await Promise.all([
        this.client.getFeed(this.options.userId, this.options.limit ?? 20),
        this.client.getPersona(this.options.userId),
      ]);
      this.state.cards = [...page.feed];
      this.state.bars = affinityBars(persona.affinities);
      this.state.error = null;
    } catch (err) {
      this.state.error =
        err instanceof ApiError
          ? `Server error (${err.status}); showing last known state.`
          : "Network error; showing last known state.";
    }
    this.render();
    window.scrollTo?.(0, scrollAnchor);
  }

  private async submitFeedback(postId: string, verdict: "like" | "dislike"): Promise<void> {
    if (!beginMutation(this.state, postId)) return; // in-flight guard
    this.render();
    try {
      await this.client.postFeedback(this.options.userId, postId, verdict);
      endMutation(this.state, postId);
      await this.refresh();
    } catch {
      endMutation(this.state, postId);
      this.state.error = "Feedback failed; try again.";
      this.render();
    }
  }

  private async submitQuestion(card: FeedCard, input: HTMLInputElement, out: HTMLElement): Promise<void> {
    const problem = validateQuestion(input.value);
    if (problem !== null) {
      out.textContent = problem;
      out.className = "query-error";
      return;
    }
    try {
      const result = await this.client.queryVideo(card.post_id, input.value);
      out.className = "query-answer";
      out.textContent = `${result.answer} (similarity ${formatScore(result.similarity)})`;
    } catch (err) {
      out.className = "query-error";
      out.textContent =
        err instanceof ApiError ? `Query failed (${err.status}).` : "Query failed (network).";
    }
  }

  render(): void {
    this.root.textContent = "";
    if (this.state.error !== null) {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.textContent = this.state.error;
      this.root.appendChild(banner);
    }
    this.root.appendChild(this.renderPersonaPanel());
    this.root.appendChild(this.renderFeed());
  }

  private renderPersonaPanel(): HTMLElement {
    const panel = document.createElement("section");
    panel.className = "persona-panel";
    for (const bar of this.state.bars) {
      const row = document.createElement("div");
      row.className = "affinity-row";
      row.dataset.category = bar.category;

      const label = document.createElement("span");
      label.textContent = `${bar.category} ${bar.percent.toFixed(1)}%`;

      const track = document.createElement("div");
      track.className = "affinity-track";
      const fill = document.createElement("div");
      fill.className = "affinity-fill";
      fill.style.width = `${bar.percent}%`;
      track.appendChild(fill);

      row.append(label, track);
      panel.appendChild(row);
    }
    return panel;
  }

  private renderFeed(): HTMLElement {
    const list = document.createElement("section");
    list.className = "feed";
    if (this.state.cards.length === 0 && this.state.error === null) {
      const empty = document.createElement("p");
      empty.className = "feed-empty";
      empty.textContent = "No posts match your filters.";
      list.appendChild(empty);
      return list;
    }
    for (const card of this.state.cards) {
      list.appendChild(this.renderCard(card));
    }
    return list;
  }

  private renderCard(card: FeedCard): HTMLElement {
    const el = document.createElement("article");
    el.className = "feed-card";
    el.dataset.postId = card.post_id;

    const badge = document.createElement("span");
    badge.className = "category-badge";
    badge.textContent = card.category;

    const scores = document.createElement("div");
    scores.className = "card-scores";
    scores.textContent =
      `importance ${formatScore(card.importance)} · ` +
      `friend δ ${formatScore(card.friend_delta)} · ` +
      `score ${formatScore(card.score)}`;

    const controls = document.createElement("div");
    controls.className = "card-controls";
    const pending = this.state.inFlight.has(card.post_id);
    for (const verdict of ["like", "dislike"] as const) {
      const btn = document.createElement("button");
      btn.className = `${verdict}-button`;
      btn.textContent = verdict === "like" ? "👍 Like" : "👎 Dislike";
      btn.disabled = pending;
      btn.addEventListener("click", () => void this.submitFeedback(card.post_id, verdict));
      controls.appendChild(btn);
    }

    el.append(badge, scores, controls);
    // the server owns media metadata: non-video cards surface its 404
    el.appendChild(this.renderQueryBox(card));
    return el;
  }

  private renderQueryBox(card: FeedCard): HTMLElement {
    const box = document.createElement("div");
    box.className = "query-box";
    const input = document.createElement("input");
    input.type = "text";
    input.placeholder = "Ask about this video…";
    const button = document.createElement("button");
    button.className = "query-button";
    button.textContent = "Ask";
    const out = document.createElement("div");
    out.className = "query-answer";
    button.addEventListener("click", () => void this.submitQuestion(card, input, out));
    box.append(input, button, out);
    return box;
  }
}

export function mount(selector: string, options: AppOptions): FeedApp {
  const root = document.querySelector<HTMLElement>(selector);
  if (root === null) {
    throw new Error(`no element matches ${selector}`);
  }
  const app = new FeedApp(root, options);
  void app.start();
  return app;
}
