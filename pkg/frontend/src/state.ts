// Session view state: a direct mirror of the server session plus the
// ratings the candidate has picked but not yet submitted. All displayed
// numbers trace back to the last SessionPayload; the UI adds nothing.

import type {
  ProfilePayload,
  RecommendationItem,
  SessionPayload,
  VariantCard,
} from "./types.js";

export type Phase = "rating" | "submitting" | "complete" | "error";

export interface SessionViewState {
  sessionId: string;
  candidateId: string;
  roundIndex: number;
  totalRounds: number;
  cards: VariantCard[];
  pending: Record<string, number>;
  phase: Phase;
  profile?: ProfilePayload;
  recommendations?: RecommendationItem[];
  errorMessage?: string;
}

export const RATING_VALUES = [0, 1, 2, 3, 4] as const;

export function fromSession(payload: SessionPayload): SessionViewState {
  return {
    sessionId: payload.session_id,
    candidateId: payload.candidate_id,
    roundIndex: payload.round_index,
    totalRounds: payload.rounds,
    cards: payload.variants,
    pending: {},
    phase: payload.state === "complete" ? "complete" : "rating",
    profile: payload.profile,
    recommendations: payload.recommendations,
  };
}

export function errorState(previous: SessionViewState | null, message: string): SessionViewState {
  return {
    sessionId: previous?.sessionId ?? "",
    candidateId: previous?.candidateId ?? "",
    roundIndex: previous?.roundIndex ?? 0,
    totalRounds: previous?.totalRounds ?? 0,
    cards: previous?.cards ?? [],
    pending: previous?.pending ?? {},
    phase: "error",
    errorMessage: message,
  };
}

export function setRating(
  state: SessionViewState,
  variantId: string,
  value: number,
): SessionViewState {
  if (state.phase !== "rating") return state;
  if (!state.cards.some((card) => card.variant_id === variantId)) return state;
  if (!RATING_VALUES.includes(value as (typeof RATING_VALUES)[number])) return state;
  return { ...state, pending: { ...state.pending, [variantId]: value } };
}

export function canSubmit(state: SessionViewState): boolean {
  return (
    state.phase === "rating" &&
    state.cards.length > 0 &&
    state.cards.every((card) => state.pending[card.variant_id] !== undefined)
  );
}
