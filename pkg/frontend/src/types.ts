// Payload shapes of the emorank HTTP API (JSON over HTTP/1.1).

export interface VariantCard {
  variant_id: string;
  stimulus_id: string;
  context_id: string;
  headline: string;
  color: string | null;
  background: string | null;
  shape: string | null;
  text_cluster: number | null;
  presentation_order: number | null;
  inscribed_words: string[];
}

export interface ProfilePayload {
  candidate_id: string;
  pv: number[];
  support: boolean[];
  ev: number[];
  emotional_class: number | null;
}

export interface RecommendationItem {
  item_id: string;
  rank: number;
  score: number;
  headline: string;
  features: Record<string, unknown>;
  profile: number[];
}

export type SessionState = "active" | "complete" | "abandoned";

export interface SessionPayload {
  session_id: string;
  candidate_id: string;
  state: SessionState;
  round_index: number;
  rounds: number;
  variants: VariantCard[];
  profile?: ProfilePayload;
  recommendations?: RecommendationItem[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export class MalformedPayloadError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "MalformedPayloadError";
  }
}

function isNumberArray(value: unknown): value is number[] {
  return Array.isArray(value) && value.every((v) => typeof v === "number");
}

function parseVariantCard(raw: unknown): VariantCard {
  if (typeof raw !== "object" || raw === null) {
    throw new MalformedPayloadError("variant card is not an object");
  }
  const card = raw as Record<string, unknown>;
  if (typeof card.variant_id !== "string" || card.variant_id.length === 0) {
    throw new MalformedPayloadError("variant card missing variant_id");
  }
  if (typeof card.headline !== "string") {
    throw new MalformedPayloadError(`variant ${card.variant_id} missing headline`);
  }
  return {
    variant_id: card.variant_id,
    stimulus_id: typeof card.stimulus_id === "string" ? card.stimulus_id : "",
    context_id: typeof card.context_id === "string" ? card.context_id : "",
    headline: card.headline,
    color: typeof card.color === "string" ? card.color : null,
    background: typeof card.background === "string" ? card.background : null,
    shape: typeof card.shape === "string" ? card.shape : null,
    text_cluster: typeof card.text_cluster === "number" ? card.text_cluster : null,
    presentation_order:
      typeof card.presentation_order === "number" ? card.presentation_order : null,
    inscribed_words: Array.isArray(card.inscribed_words)
      ? card.inscribed_words.filter((w): w is string => typeof w === "string")
      : [],
  };
}

export function parseProfilePayload(raw: unknown): ProfilePayload {
  if (typeof raw !== "object" || raw === null) {
    throw new MalformedPayloadError("profile is not an object");
  }
  const profile = raw as Record<string, unknown>;
  if (typeof profile.candidate_id !== "string") {
    throw new MalformedPayloadError("profile missing candidate_id");
  }
  if (!isNumberArray(profile.ev) || !isNumberArray(profile.pv)) {
    throw new MalformedPayloadError("profile ev/pv must be number arrays");
  }
  return {
    candidate_id: profile.candidate_id,
    pv: profile.pv,
    support: Array.isArray(profile.support)
      ? profile.support.map((s) => Boolean(s))
      : profile.pv.map(() => true),
    ev: profile.ev,
    emotional_class:
      typeof profile.emotional_class === "number" ? profile.emotional_class : null,
  };
}

export function parseRecommendation(raw: unknown): RecommendationItem {
  if (typeof raw !== "object" || raw === null) {
    throw new MalformedPayloadError("recommendation is not an object");
  }
  const item = raw as Record<string, unknown>;
  if (typeof item.item_id !== "string" || typeof item.rank !== "number") {
    throw new MalformedPayloadError("recommendation missing item_id/rank");
  }
  return {
    item_id: item.item_id,
    rank: item.rank,
    score: typeof item.score === "number" ? item.score : 0,
    headline: typeof item.headline === "string" ? item.headline : "",
    features:
      typeof item.features === "object" && item.features !== null
        ? (item.features as Record<string, unknown>)
        : {},
    profile: isNumberArray(item.profile) ? item.profile : [],
  };
}

export function parseSessionPayload(raw: unknown): SessionPayload {
  if (typeof raw !== "object" || raw === null) {
    throw new MalformedPayloadError("session payload is not an object");
  }
  const body = raw as Record<string, unknown>;
  if (typeof body.session_id !== "string" || body.session_id.length === 0) {
    throw new MalformedPayloadError("session payload missing session_id");
  }
  const state = body.state;
  if (state !== "active" && state !== "complete" && state !== "abandoned") {
    throw new MalformedPayloadError(`unknown session state ${String(state)}`);
  }
  if (typeof body.round_index !== "number" || typeof body.rounds !== "number") {
    throw new MalformedPayloadError("session payload missing round counters");
  }
  if (!Array.isArray(body.variants)) {
    throw new MalformedPayloadError("session payload missing variants");
  }
  return {
    session_id: body.session_id,
    candidate_id: typeof body.candidate_id === "string" ? body.candidate_id : "",
    state,
    round_index: body.round_index,
    rounds: body.rounds,
    variants: body.variants.map(parseVariantCard),
    profile: body.profile === undefined ? undefined : parseProfilePayload(body.profile),
    recommendations:
      body.recommendations === undefined
        ? undefined
        : (body.recommendations as unknown[]).map(parseRecommendation),
  };
}
