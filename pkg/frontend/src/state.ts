/**
 * Posture form state: the analyst's selected levels, dirty tracking,
 * and a version stamp that drops stale in-flight forecast responses.
 */

import type { ForecastPayload, MaturityValue, ModelPayload, Posture } from "./types";

export interface FormState {
  values: Posture;
  dirty: Set<string>;
  version: number;
  lastForecast: ForecastPayload | null;
}

export function createFormState(model: ModelPayload): FormState {
  const values: Posture = {};
  for (const entry of model.catalog) {
    values[entry.id] = "largely_implemented";
  }
  return { values, dirty: new Set(), version: 0, lastForecast: null };
}

export function setValue(state: FormState, controlId: string, value: MaturityValue): FormState {
  if (!(controlId in state.values)) {
    throw new Error(`unknown control: ${controlId}`);
  }
  state.values[controlId] = value;
  state.dirty.add(controlId);
  state.version += 1;
  return state;
}

/**
 * Fill the form with the group's exact average fractions. The service
 * accepts fractions as well as level names, which is what makes the
 * peer-average posture enterable at all.
 */
export function applyPeerAverage(state: FormState, model: ModelPayload): FormState {
  for (const entry of model.catalog) {
    const average = model.group_avg_maturity[entry.id];
    if (average === undefined) {
      throw new Error(`model has no group average for ${entry.id}`);
    }
    state.values[entry.id] = average;
  }
  state.dirty.clear();
  state.version += 1;
  return state;
}

/**
 * Record a forecast response. Returns false (and changes nothing) when
 * the response belongs to an older form version than the current one.
 */
export function acceptForecast(
  state: FormState,
  requestVersion: number,
  forecast: ForecastPayload,
): boolean {
  if (requestVersion !== state.version) {
    return false;
  }
  state.lastForecast = forecast;
  return true;
}
