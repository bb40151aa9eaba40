// Fixed palette for the symbolic color/background categories the engine
// emits, so swatch rendering is deterministic. Unknown categories fall
// back to neutral gray rather than failing.

export const COLOR_SWATCHES: Record<string, string> = {
  saffron: "#f4a300",
  white: "#f5f5f5",
  crimson: "#d7263d",
  navy: "#1f3a93",
  amber: "#ffbf00",
  teal: "#008080",
};

export const BACKGROUND_FILLS: Record<string, string> = {
  shrine: "#f3e0b8",
  meadow: "#dff2d8",
  arena: "#fde0d9",
  boardroom: "#dde6f2",
  newsroom: "#ececec",
};

export const FALLBACK_SWATCH = "#9e9e9e";
export const FALLBACK_FILL = "#fafafa";

export function swatchFor(color: string | null): string {
  if (color === null) return FALLBACK_SWATCH;
  return COLOR_SWATCHES[color] ?? FALLBACK_SWATCH;
}

export function fillFor(background: string | null): string {
  if (background === null) return FALLBACK_FILL;
  return BACKGROUND_FILLS[background] ?? FALLBACK_FILL;
}
