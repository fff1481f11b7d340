// Pure wizard bookkeeping: which matrices exist, which pairs still need a
// judgment, and what to send on completion. The wizard walks the criteria
// matrix first, then one alternatives matrix per criterion; only the upper
// triangle is entered, reciprocals are derived and shown read-only.

import type { PairwiseDoc, SessionDoc } from "./types";

export const CRITERIA_MATRIX = "criteria";

export interface JudgmentSlot {
  matrix: string;
  i: number; // 1-based, i < j
  j: number;
  leftLabel: string;
  rightLabel: string;
  value: string | null;
}

function matrixSlots(name: string, doc: PairwiseDoc): JudgmentSlot[] {
  const judged = new Map(doc.judgments.map((entry) => [`${entry.i},${entry.j}`, entry.value]));
  const slots: JudgmentSlot[] = [];
  for (let i = 1; i <= doc.labels.length; i++) {
    for (let j = i + 1; j <= doc.labels.length; j++) {
      slots.push({
        matrix: name,
        i,
        j,
        leftLabel: doc.labels[i - 1],
        rightLabel: doc.labels[j - 1],
        value: judged.get(`${i},${j}`) ?? null,
      });
    }
  }
  return slots;
}

export function sessionMatrices(session: SessionDoc): { name: string; doc: PairwiseDoc }[] {
  const matrices: { name: string; doc: PairwiseDoc }[] = [];
  if (session.criteria_matrix) {
    matrices.push({ name: CRITERIA_MATRIX, doc: session.criteria_matrix });
  }
  session.criteria.forEach((criterion, index) => {
    matrices.push({ name: criterion, doc: session.alternative_matrices[index] });
  });
  return matrices;
}

export function allSlots(session: SessionDoc): JudgmentSlot[] {
  return sessionMatrices(session).flatMap(({ name, doc }) => matrixSlots(name, doc));
}

export function nextSlot(session: SessionDoc): JudgmentSlot | null {
  return allSlots(session).find((slot) => slot.value === null) ?? null;
}

export function remainingCount(session: SessionDoc): number {
  return allSlots(session).filter((slot) => slot.value === null).length;
}

export function isFullyJudged(session: SessionDoc): boolean {
  return remainingCount(session) === 0;
}

// Matrices the server previewed as over the CR threshold; completing the
// session needs a justification for each of these.
export function flaggedMatrices(session: SessionDoc): { name: string; cr: number }[] {
  return Object.entries(session.consistency_preview ?? {})
    .filter(([, report]) => !report.acceptable)
    .map(([name, report]) => ({ name, cr: report.cr }));
}

export function completionOverrides(
  session: SessionDoc,
  justifications: Map<string, string>,
): Record<string, string> {
  const overrides: Record<string, string> = {};
  for (const { name } of flaggedMatrices(session)) {
    const justification = (justifications.get(name) ?? "").trim();
    if (justification) {
      overrides[name] = justification;
    }
  }
  return overrides;
}
