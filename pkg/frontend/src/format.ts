// Pure presentation helpers shared by the views and unit-tested directly.

import { STEP_ORDER, type CaseDoc, type StepName } from "./types";

// Fixed 4-color scale keyed to the rating levels (see the heatmap legend).
export const RATING_COLORS: Record<string, string> = {
  L: "#8fce8f",
  M: "#f5d76e",
  H: "#f0a35e",
  C: "#e06666",
};

export const RATING_LABELS: Record<string, string> = {
  L: "Low",
  M: "Moderate",
  H: "High",
  C: "Critical",
};

export function ratingColor(code: string): string {
  return RATING_COLORS[code] ?? "#d0d0d0";
}

export function formatScore(score: number): string {
  return score.toFixed(4);
}

export function formatCr(cr: number): string {
  return cr.toFixed(3);
}

// The server flags CR > 0.10 as unacceptable; the UI only styles what the
// server already decided via `acceptable`.
export function crBadge(cr: number, acceptable: boolean): { text: string; flag: "ok" | "bad" } {
  return { text: `CR ${formatCr(cr)}`, flag: acceptable ? "ok" : "bad" };
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

// Board grouping: a case sits in the column of its last completed step for
// the current iteration; nothing completed yet means the Profile column.
export function boardColumn(c: CaseDoc): StepName {
  return c.status.last_completed ?? "Profile";
}

export function groupCasesByStep(cases: CaseDoc[]): Map<StepName, CaseDoc[]> {
  const groups = new Map<StepName, CaseDoc[]>(STEP_ORDER.map((step) => [step, []]));
  for (const c of cases) {
    groups.get(boardColumn(c))!.push(c);
  }
  return groups;
}

// Judgment slider: integer -8..8 maps onto the 1-9 scale and its reciprocals.
// 0 -> "1", +k -> String(k+1), -k -> "1/<k+1>".
export function sliderToJudgment(position: number): string {
  if (!Number.isInteger(position) || position < -8 || position > 8) {
    throw new Error(`slider position out of range: ${position}`);
  }
  if (position >= 0) {
    return String(position + 1);
  }
  return `1/${1 - position}`;
}

export function judgmentToSlider(value: string): number {
  const reciprocal = value.match(/^1\/([2-9])$/);
  if (reciprocal) {
    return 1 - Number(reciprocal[1]);
  }
  if (/^[1-9]$/.test(value)) {
    return Number(value) - 1;
  }
  throw new Error(`not a 1-9 scale judgment: ${value}`);
}

export function reciprocalOf(value: string): string {
  const reciprocal = value.match(/^1\/([2-9])$/);
  if (reciprocal) {
    return reciprocal[1];
  }
  if (value === "1") {
    return "1";
  }
  if (/^[2-9]$/.test(value)) {
    return `1/${value}`;
  }
  throw new Error(`not a 1-9 scale judgment: ${value}`);
}
