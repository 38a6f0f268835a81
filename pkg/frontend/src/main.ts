/**
 * Page wiring: form construction, debounced forecast refresh, what-if
 * exploration, and the exceedance chart. All math lives on the server.
 */

import { ApiClient, ApiError } from "./api";
import { lecChartSvg } from "./charts";
import { fmtMaturity, levelLabel } from "./format";
import {
  renderComparisonPanel,
  renderEmptyState,
  renderErrorBanner,
  renderForecastPanel,
  renderWhatIfPanel,
} from "./panels";
import { acceptForecast, applyPeerAverage, createFormState, setValue } from "./state";
import type { FormState } from "./state";
import type { LevelName, ModelPayload } from "./types";
import { LEVEL_ORDER, buildSingleLevelVariants, rankVariants } from "./whatif";

const LEC_THRESHOLDS_USD = [
  1_000, 2_500, 5_000, 10_000, 25_000, 50_000, 100_000, 250_000, 500_000, 1_000_000, 2_500_000,
];

const DEBOUNCE_MS = 250;

function element(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing page element: ${id}`);
  }
  return found;
}

function buildForm(model: ModelPayload, state: FormState, onChange: () => void): void {
  const container = element("posture-form");
  container.innerHTML = "";
  for (const entry of model.catalog) {
    const row = document.createElement("label");
    row.className = "control-row";
    const title = document.createElement("span");
    title.textContent = `${entry.id} ${entry.name}`;
    const select = document.createElement("select");
    select.dataset.control = entry.id;
    for (const level of LEVEL_ORDER) {
      const option = document.createElement("option");
      option.value = level;
      option.textContent = levelLabel(level);
      select.append(option);
    }
    select.value = String(state.values[entry.id]);
    select.addEventListener("change", () => {
      setValue(state, entry.id, select.value as LevelName);
      onChange();
    });
    row.append(title, select);
    container.append(row);
  }
}

function syncFormControls(state: FormState): void {
  for (const select of document.querySelectorAll<HTMLSelectElement>("select[data-control]")) {
    const code = select.dataset.control ?? "";
    const value = state.values[code];
    if (typeof value === "string") {
      select.value = value;
      select.removeAttribute("data-fraction");
    } else if (value !== undefined) {
      // fractional preset: keep the nearest level visible, mark the cell
      const nearest = Math.min(3, Math.round(value * 3));
      select.value = LEVEL_ORDER[nearest] ?? "largely_implemented";
      select.setAttribute("data-fraction", fmtMaturity(value));
    }
  }
}

async function start(): Promise<void> {
  const api = new ApiClient();
  const forecastPanel = element("forecast-panel");
  const comparisonPanel = element("comparison-panel");
  const whatifPanel = element("whatif-panel");
  const lecPanel = element("lec-panel");

  let model: ModelPayload;
  try {
    model = await api.getModel();
  } catch (error) {
    forecastPanel.innerHTML = renderErrorBanner(
      `Cannot reach the riskbench service: ${error instanceof Error ? error.message : error}`,
    );
    return;
  }

  const state = createFormState(model);
  const names = new Map(model.catalog.map((entry) => [entry.id, entry.name]));
  let debounceHandle: number | undefined;

  const refreshForecast = async () => {
    const requestVersion = state.version;
    try {
      const forecast = await api.postForecast({ ...state.values });
      if (!acceptForecast(state, requestVersion, forecast)) {
        return; // a newer edit is already in flight
      }
      forecastPanel.innerHTML = renderForecastPanel(forecast);
      comparisonPanel.innerHTML = forecast.comparison
        ? renderComparisonPanel(forecast.comparison)
        : renderEmptyState("No comparison data in the model.");
    } catch (error) {
      // keep the form inputs; only the result panel shows the failure
      forecastPanel.innerHTML = renderErrorBanner(
        error instanceof ApiError ? error.message : "Service unreachable; inputs preserved.",
      );
    }
  };

  const scheduleRefresh = () => {
    window.clearTimeout(debounceHandle);
    debounceHandle = window.setTimeout(refreshForecast, DEBOUNCE_MS);
  };

  const refreshWhatIf = async () => {
    const variants = buildSingleLevelVariants(state.values, model);
    if (variants.length === 0) {
      whatifPanel.innerHTML = renderEmptyState("Every control is already fully implemented.");
      return;
    }
    try {
      const response = await api.postWhatIf({ ...state.values }, variants);
      whatifPanel.innerHTML = renderWhatIfPanel(rankVariants(response.variants), names);
    } catch (error) {
      whatifPanel.innerHTML = renderErrorBanner(
        error instanceof ApiError ? error.message : "What-if request failed.",
      );
    }
  };

  buildForm(model, state, () => {
    syncFormControls(state);
    scheduleRefresh();
  });

  element("peer-average-button").addEventListener("click", () => {
    applyPeerAverage(state, model);
    syncFormControls(state);
    void refreshForecast();
  });
  element("whatif-button").addEventListener("click", () => void refreshWhatIf());

  try {
    const lec = await api.getLec(LEC_THRESHOLDS_USD);
    lecPanel.innerHTML = lecChartSvg(lec.rows);
  } catch {
    lecPanel.innerHTML = renderEmptyState("No exceedance curve available.");
  }

  void refreshForecast();
}

void start();
