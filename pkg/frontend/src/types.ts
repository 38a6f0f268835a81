/**
 * Payload shapes of the /v1 API. Currency fields are decimal strings
 * ("9280.00"); fractions and probabilities are numbers.
 */

export type LevelName =
  | "not_implemented"
  | "partially_implemented"
  | "largely_implemented"
  | "fully_implemented";

/** A posture entry is a named level or a fraction in [0, 1]. */
export type MaturityValue = LevelName | number;

export interface CatalogEntry {
  id: string;
  name: string;
}

export interface ModelPayload {
  version: string;
  exponent: number;
  no_loss_baseline: boolean;
  catalog: CatalogEntry[];
  group_avg_maturity: Record<string, number>;
  weights: Record<string, number>;
  implicated: string[];
  deviation_bounds: [number, number];
  ratio_cap: number;
  anchors: { deviation: number; loss_usd: string }[];
  maturity_distribution: Record<string, number[]> | null;
  participant_count: number | null;
  provenance: Record<string, string>;
}

export interface BaselinePayload {
  incidents_per_firm_year: number;
  mean_loss_usd: string;
  annual_risk_usd: string;
  window_years: number;
  firm_count: number;
  incident_count: number;
  low_data: boolean;
}

export interface ComparisonRowPayload {
  control_id: string;
  name: string;
  own_level: string | null;
  own_fraction: number;
  peer_avg: number;
  distribution: number[] | null;
  delta: number;
  weight: number;
}

export interface ComparisonPayload {
  weighted_ratio: number;
  deviation: number;
  summary: string;
  rows: ComparisonRowPayload[];
}

export interface ForecastPayload {
  deviation: number;
  gap_multiplier: number;
  annual_risk_usd: string;
  incident_size_usd: string;
  peer_annual_risk_usd: string;
  peer_incident_size_usd: string;
  low_data: boolean;
  comparison?: ComparisonPayload;
}

export interface PostureChange {
  control_id: string;
  level: LevelName;
}

export interface WhatIfVariantResult {
  changes: PostureChange[];
  forecast: ForecastPayload;
  annual_risk_delta_usd: string;
}

export interface WhatIfResponse {
  base: ForecastPayload;
  variants: WhatIfVariantResult[];
}

export interface LecRow {
  threshold_usd: string;
  exceedance_prob: number;
}

export interface LecResponse {
  rows: LecRow[];
}

export type Posture = Record<string, MaturityValue>;
