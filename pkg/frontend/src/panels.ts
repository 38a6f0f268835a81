/**
 * Panel renderers: HTML strings assembled from service payloads. No
 * model math happens here, only formatting of values the API returned.
 */

import type { ComparisonPayload, ForecastPayload, WhatIfVariantResult } from "./types";
import {
  fmtAnnualRisk,
  fmtDeviationBadge,
  fmtGap,
  fmtMaturity,
  fmtPeerMultiple,
  fmtUsdWhole,
  levelLabel,
} from "./format";
import { comparisonBarSvg, distributionStripSvg } from "./charts";

const escape = (text: string): string =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function renderForecastPanel(forecast: ForecastPayload): string {
  const lowData = forecast.low_data
    ? `<p class="banner warn">Peer baseline rests on very few incidents; read these figures as indicative.</p>`
    : "";
  return `
<div class="forecast-panel">
  <p class="headline" data-field="annual-risk">${fmtAnnualRisk(forecast.annual_risk_usd)}</p>
  <p class="sub" data-field="gap">${fmtGap(forecast.gap_multiplier)}
    <span class="badge" data-field="peer-multiple">${fmtPeerMultiple(forecast.gap_multiplier)}</span></p>
  <dl class="figures">
    <dt>Expected incident size</dt>
    <dd data-field="incident-size">${fmtUsdWhole(forecast.incident_size_usd)}</dd>
    <dt>Peer annual risk</dt>
    <dd data-field="peer-annual">${fmtUsdWhole(forecast.peer_annual_risk_usd)}</dd>
    <dt>Peer incident size</dt>
    <dd data-field="peer-incident">${fmtUsdWhole(forecast.peer_incident_size_usd)}</dd>
  </dl>
  ${lowData}
</div>`;
}

export function renderErrorBanner(message: string): string {
  return `<p class="banner error" role="alert">${escape(message)}</p>`;
}

export function renderComparisonPanel(comparison: ComparisonPayload): string {
  const rows = comparison.rows
    .map(
      (row) => `
    <tr>
      <td class="code">${escape(row.control_id)}</td>
      <td>${escape(row.name)}</td>
      <td data-field="own">${row.own_level ? levelLabel(row.own_level) : fmtMaturity(row.own_fraction)}</td>
      <td>${comparisonBarSvg(row)}</td>
      <td data-field="peer">${fmtMaturity(row.peer_avg)}</td>
      <td>${distributionStripSvg(row.distribution)}</td>
      <td class="num ${row.delta < 0 ? "down" : "up"}">${fmtDeviationBadge(row.delta)}</td>
    </tr>`,
    )
    .join("");
  return `
<div class="comparison-panel">
  <p><span class="badge" data-field="deviation-badge">${fmtDeviationBadge(comparison.deviation)}</span>
     <span data-field="summary">${escape(comparison.summary)}</span></p>
  <table>
    <thead>
      <tr><th>id</th><th>control</th><th>own</th><th>own vs peers</th><th>peer avg</th><th>responses</th><th>delta</th></tr>
    </thead>
    <tbody>${rows}</tbody>
  </table>
</div>`;
}

export function renderWhatIfPanel(ranked: WhatIfVariantResult[], names: Map<string, string>): string {
  if (ranked.length === 0) {
    return `<p class="muted">Every control is already fully implemented.</p>`;
  }
  const items = ranked
    .map((variant) => {
      const change = variant.changes[0];
      if (!change) {
        return "";
      }
      const name = names.get(change.control_id) ?? change.control_id;
      const savings = -Number(variant.annual_risk_delta_usd);
      const direction = savings >= 0 ? "saves" : "adds";
      return `
    <li data-control="${escape(change.control_id)}">
      <span class="code">${escape(change.control_id)}</span>
      <span>${escape(name)} to ${levelLabel(change.level)}</span>
      <span class="num">${direction} ${fmtUsdWhole(String(Math.abs(savings)))} / year</span>
      <span class="num muted">new risk ${fmtAnnualRisk(variant.forecast.annual_risk_usd)}</span>
    </li>`;
    })
    .join("");
  return `<ol class="whatif-list">${items}</ol>`;
}

export function renderEmptyState(message: string): string {
  return `<p class="muted">${escape(message)}</p>`;
}
