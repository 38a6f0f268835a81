/**
 * Display formatting. Every number shown on screen is a service value
 * passed through one of these; the client never recomputes model math.
 */

/** "9280.00" -> "$9,280" (whole dollars for headline figures). */
export function fmtUsdWhole(decimal: string): string {
  const value = Number(decimal);
  if (!Number.isFinite(value)) {
    throw new Error(`not a currency value: ${decimal}`);
  }
  const rounded = Math.round(Math.abs(value));
  const sign = value < 0 ? "-" : "";
  return `${sign}$${rounded.toLocaleString("en-US")}`;
}

/** "9280.00" -> "$9,280 / year". */
export function fmtAnnualRisk(decimal: string): string {
  return `${fmtUsdWhole(decimal)} / year`;
}

/** Gap multiplier headline, e.g. 1 -> "G = 1.00". */
export function fmtGap(gap: number): string {
  return `G = ${gap.toFixed(2)}`;
}

/** Peer-relative badge, e.g. 5.36 -> "5.4x peer average". */
export function fmtPeerMultiple(gap: number): string {
  return `${gap.toFixed(1)}x peer average`;
}

/** Weighted deviation badge, e.g. -0.25 -> "-25%". */
export function fmtDeviationBadge(deviation: number): string {
  const pct = deviation * 100;
  const sign = pct > 0 ? "+" : "";
  return `${sign}${pct.toFixed(0)}%`;
}

/** Probability for the exceedance chart, e.g. 0.108 -> "10.8%". */
export function fmtProbability(p: number): string {
  return `${(p * 100).toFixed(1)}%`;
}

/** Fraction of full maturity, e.g. 0.78 -> "78%". */
export function fmtMaturity(fraction: number): string {
  return `${Math.round(fraction * 100)}%`;
}

const LEVEL_LABELS: Record<string, string> = {
  not_implemented: "Not implemented",
  partially_implemented: "Partially implemented",
  largely_implemented: "Largely implemented",
  fully_implemented: "Fully implemented",
};

export function levelLabel(level: string): string {
  return LEVEL_LABELS[level] ?? level;
}
