/**
 * What-if exploration: build single-level improvement candidates and
 * rank the service's answers by how much annual risk they remove.
 */

import type {
  LevelName,
  ModelPayload,
  Posture,
  PostureChange,
  WhatIfVariantResult,
} from "./types";

export const LEVEL_ORDER: LevelName[] = [
  "not_implemented",
  "partially_implemented",
  "largely_implemented",
  "fully_implemented",
];

const LEVEL_FRACTIONS = [0, 1 / 3, 2 / 3, 1];

/** The next level up from a named level or a fraction; null at the top. */
export function nextLevelAbove(value: LevelName | number): LevelName | null {
  if (typeof value === "number") {
    const index = LEVEL_FRACTIONS.findIndex((f) => f > value + 1e-12);
    return index === -1 ? null : LEVEL_ORDER[index] ?? null;
  }
  const index = LEVEL_ORDER.indexOf(value);
  if (index === -1) {
    throw new Error(`unknown level: ${value}`);
  }
  return LEVEL_ORDER[index + 1] ?? null;
}

/**
 * One variant per control that still has headroom: bump it a single
 * level, leave everything else alone. Controls already fully
 * implemented contribute no variant.
 */
export function buildSingleLevelVariants(
  posture: Posture,
  model: ModelPayload,
): { changes: PostureChange[] }[] {
  const variants: { changes: PostureChange[] }[] = [];
  for (const entry of model.catalog) {
    const current = posture[entry.id];
    if (current === undefined) {
      continue;
    }
    const next = nextLevelAbove(current);
    if (next !== null) {
      variants.push({ changes: [{ control_id: entry.id, level: next }] });
    }
  }
  return variants;
}

/**
 * Biggest risk reduction first; equal reductions fall back to control
 * code order so the listing is stable across refreshes.
 */
export function rankVariants(variants: WhatIfVariantResult[]): WhatIfVariantResult[] {
  return [...variants].sort((a, b) => {
    const deltaA = Number(a.annual_risk_delta_usd);
    const deltaB = Number(b.annual_risk_delta_usd);
    if (deltaA !== deltaB) {
      return deltaA - deltaB;
    }
    const codeA = a.changes[0]?.control_id ?? "";
    const codeB = b.changes[0]?.control_id ?? "";
    return codeA < codeB ? -1 : codeA > codeB ? 1 : 0;
  });
}
