/** Rendering for the indicator panel shown in the with-indicators
 * condition. Values arrive fully computed from the service; this module
 * only formats them. */

import type { IndicatorRow } from "./api.js";

const FACE_GLYPHS: Record<string, string> = {
  "++": "\u{1F604}",
  "+": "\u{1F642}",
  "0": "\u{1F610}",
  "-": "\u{1F641}",
  "--": "\u{1F620}",
};

export function formatValue(row: IndicatorRow): string {
  if (row.value === null || row.value === undefined) {
    return "n/a";
  }
  switch (row.kind) {
    case "stars": {
      const filled = row.value as number;
      return "★".repeat(filled) + "☆".repeat(5 - filled);
    }
    case "flag":
      return row.value ? "yes" : "no";
    case "face":
      return FACE_GLYPHS[String(row.value)] ?? String(row.value);
  }
}

/** One .indicator-row element per payload row, in payload order. */
export function renderPanel(rows: IndicatorRow[]): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "indicator-panel";
  const heading = document.createElement("h2");
  heading.textContent = "Quality indicators";
  panel.append(heading);
  for (const row of rows) {
    const el = document.createElement("div");
    el.className = "indicator-row";
    el.dataset.name = row.name;
    el.dataset.kind = row.kind;

    const label = document.createElement("span");
    label.className = "indicator-label";
    label.textContent = row.label;

    const value = document.createElement("span");
    value.className = "indicator-value";
    value.textContent = formatValue(row);

    el.append(label, value);
    panel.append(el);
  }
  return panel;
}
