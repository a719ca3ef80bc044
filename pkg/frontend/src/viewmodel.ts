// Pure view-model logic: card ordering (server order, untouched), affinity
// bars, per-card in-flight guards and question validation. Kept DOM-free so
// it is directly unit-testable.

import type { FeedCard, FeedPage } from "./api.js";

export interface AffinityBar {
  category: string;
  fraction: number; // 0..1 as reported by the server
  percent: number; // rounded for display
}

export interface FeedState {
  cards: FeedCard[];
  bars: AffinityBar[];
  error: string | null;
  inFlight: Set<string>; // post ids with an unresolved mutation
}

export function initialState(): FeedState {
  return { cards: [], bars: [], error: null, inFlight: new Set() };
}

// Card order mirrors the API response order exactly; no client-side
// re-scoring or re-sorting.
export function cardsFromPage(page: FeedPage): FeedCard[] {
  return [...page.feed];
}

export function affinityBars(affinities: Record<string, number>): AffinityBar[] {
  return Object.keys(affinities)
    .sort()
    .map((category) => ({
      category,
      fraction: affinities[category],
      percent: Math.round(affinities[category] * 1000) / 10,
    }));
}

export function barsSumToFullWidth(bars: AffinityBar[]): boolean {
  if (bars.length === 0) return true;
  const total = bars.reduce((acc, b) => acc + b.percent, 0);
  return Math.abs(total - 100) <= 0.1 * bars.length;
}

// Returns false when a mutation for this card is already pending; callers
// must skip the request in that case (one API call per user action).
export function beginMutation(state: FeedState, postId: string): boolean {
  if (state.inFlight.has(postId)) return false;
  state.inFlight.add(postId);
  return true;
}

export function endMutation(state: FeedState, postId: string): void {
  state.inFlight.delete(postId);
}

export function validateQuestion(question: string): string | null {
  return question.trim().length === 0 ? "Please enter a question." : null;
}

export function formatScore(value: number): string {
  return value.toFixed(4);
}
