// DOM rendering. Dynamic text always goes through textContent so what
// the candidate sees is byte-equal to the API payload.

import { fillFor, swatchFor } from "./palette.js";
import { RATING_VALUES, canSubmit, type SessionViewState } from "./state.js";

export interface RenderHandlers {
  onRate(variantId: string, value: number): void;
  onSubmit(): void;
  onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderCard(
  state: SessionViewState,
  handlers: RenderHandlers,
  index: number,
): HTMLElement {
  const card = state.cards[index];
  const root = el("article", "variant-card");
  root.dataset.variantId = card.variant_id;
  root.style.backgroundColor = fillFor(card.background);

  const swatch = el("div", "color-swatch");
  swatch.style.backgroundColor = swatchFor(card.color);
  swatch.title = card.color ?? "no color";
  root.appendChild(swatch);

  root.appendChild(el("h3", "headline", card.headline));

  const meta = el("div", "card-meta");
  if (card.color) meta.appendChild(el("span", "meta-color", card.color));
  if (card.background) meta.appendChild(el("span", "meta-background", card.background));
  root.appendChild(meta);

  const ratings = el("fieldset", "rating-group");
  ratings.appendChild(el("legend", undefined, "How much do you want to read this? (0-4)"));
  for (const value of RATING_VALUES) {
    const label = el("label", "rating-option");
    const input = el("input");
    input.type = "radio";
    input.name = `rating-${card.variant_id}`;
    input.value = String(value);
    input.checked = state.pending[card.variant_id] === value;
    input.disabled = state.phase !== "rating";
    input.addEventListener("change", () => handlers.onRate(card.variant_id, value));
    label.appendChild(input);
    label.appendChild(el("span", undefined, String(value)));
    ratings.appendChild(label);
  }
  root.appendChild(ratings);
  return root;
}

function renderRound(state: SessionViewState, handlers: RenderHandlers): HTMLElement {
  const section = el("section", "round");
  section.appendChild(
    el(
      "h2",
      "round-progress",
      `Round ${state.roundIndex + 1} of ${state.totalRounds}`,
    ),
  );

  const grid = el("div", "card-grid");
  for (let i = 0; i < state.cards.length; i += 1) {
    grid.appendChild(renderCard(state, handlers, i));
  }
  section.appendChild(grid);

  const submit = el(
    "button",
    "submit-round",
    state.phase === "submitting" ? "Submitting..." : "Submit ratings",
  );
  submit.disabled = !canSubmit(state);
  submit.addEventListener("click", () => handlers.onSubmit());
  section.appendChild(submit);
  return section;
}

function renderCompletion(state: SessionViewState): HTMLElement {
  const section = el("section", "completion");
  section.appendChild(el("h2", undefined, "Your emotion profile"));

  const badge = el(
    "span",
    "class-badge",
    state.profile?.emotional_class != null
      ? `class ${state.profile.emotional_class}`
      : "unclassified",
  );
  section.appendChild(badge);

  const chart = el("div", "ev-chart");
  const ev = state.profile?.ev ?? [];
  ev.forEach((value, dim) => {
    const row = el("div", "ev-row");
    row.dataset.dim = String(dim);
    const bar = el("div", "ev-bar");
    bar.style.width = `${Math.round(value * 1000) / 10}%`;
    row.appendChild(el("span", "ev-dim", `dim ${dim}`));
    row.appendChild(bar);
    // exact payload value, so the display is traceable to the API field
    row.appendChild(el("span", "ev-value", String(value)));
    chart.appendChild(row);
  });
  section.appendChild(chart);

  const recs = el("ol", "recommendations");
  for (const item of state.recommendations ?? []) {
    const entry = el("li", "recommendation");
    entry.dataset.itemId = item.item_id;
    entry.appendChild(el("span", "rec-rank", String(item.rank)));
    entry.appendChild(el("span", "rec-headline", item.headline));
    entry.appendChild(el("span", "rec-score", String(item.score)));
    recs.appendChild(entry);
  }
  section.appendChild(el("h2", undefined, "Your ranked news"));
  section.appendChild(recs);
  return section;
}

function renderError(state: SessionViewState, handlers: RenderHandlers): HTMLElement {
  const panel = el("section", "error-panel");
  panel.setAttribute("role", "alert");
  panel.appendChild(el("h2", undefined, "Something went wrong"));
  panel.appendChild(el("p", "error-message", state.errorMessage ?? "unknown error"));
  const retry = el("button", "retry", "Retry");
  retry.addEventListener("click", () => handlers.onRetry());
  panel.appendChild(retry);
  return panel;
}

export function renderApp(
  root: HTMLElement,
  state: SessionViewState,
  handlers: RenderHandlers,
): void {
  root.replaceChildren();
  switch (state.phase) {
    case "rating":
    case "submitting":
      root.appendChild(renderRound(state, handlers));
      break;
    case "complete":
      root.appendChild(renderCompletion(state));
      break;
    case "error":
      root.appendChild(renderError(state, handlers));
      break;
  }
}
