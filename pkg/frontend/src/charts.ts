/**
 * Chart builders. Pure string functions producing inline SVG so they
 * are testable without a DOM.
 */

import type { ComparisonRowPayload, LecRow } from "./types";
import { fmtMaturity, fmtProbability, fmtUsdWhole } from "./format";

const escape = (text: string): string =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

/** Own-vs-peer horizontal bars for one control. */
export function comparisonBarSvg(row: ComparisonRowPayload, width = 220): string {
  const scale = (fraction: number) => Math.max(0, Math.min(1, fraction)) * (width - 2);
  const own = scale(row.own_fraction);
  const peer = scale(row.peer_avg);
  return (
    `<svg class="cmp-bar" width="${width}" height="22" role="img" ` +
    `aria-label="${escape(row.name)}: own ${fmtMaturity(row.own_fraction)}, peers ${fmtMaturity(row.peer_avg)}">` +
    `<rect x="1" y="3" width="${own.toFixed(1)}" height="7" class="bar-own"/>` +
    `<rect x="1" y="13" width="${peer.toFixed(1)}" height="7" class="bar-peer"/>` +
    `</svg>`
  );
}

/** Tiny 4-bucket response distribution strip (not/partially/largely/fully). */
export function distributionStripSvg(distribution: number[] | null, width = 84): string {
  if (!distribution || distribution.length !== 4) {
    return `<span class="muted">n/a</span>`;
  }
  const total = distribution.reduce((a, b) => a + b, 0) || 1;
  let x = 0;
  const segments = distribution
    .map((count, index) => {
      const w = (count / total) * width;
      const segment = `<rect x="${x.toFixed(1)}" y="0" width="${w.toFixed(1)}" height="10" class="dist-${index}"/>`;
      x += w;
      return segment;
    })
    .join("");
  return `<svg class="dist-strip" width="${width}" height="10" role="img" aria-label="peer response distribution">${segments}</svg>`;
}

/**
 * Log-x exceedance chart: threshold dollars on a log axis, probability
 * 0..1 linear. Returns a complete SVG element.
 */
export function lecChartSvg(rows: LecRow[], width = 560, height = 220): string {
  const plotted = rows.filter((r) => Number(r.threshold_usd) > 0);
  if (plotted.length < 2) {
    return `<svg class="lec-chart" width="${width}" height="${height}"><text x="12" y="24">not enough curve points</text></svg>`;
  }
  const margin = { left: 48, right: 16, top: 12, bottom: 28 };
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;
  const logs = plotted.map((r) => Math.log10(Number(r.threshold_usd)));
  const minLog = Math.min(...logs);
  const maxLog = Math.max(...logs);
  const x = (log: number) => margin.left + ((log - minLog) / (maxLog - minLog)) * innerW;
  const y = (p: number) => margin.top + (1 - p) * innerH;

  const points = plotted
    .map((r, i) => `${x(logs[i] ?? minLog).toFixed(1)},${y(r.exceedance_prob).toFixed(1)}`)
    .join(" ");

  const gridLines: string[] = [];
  for (let decade = Math.ceil(minLog); decade <= Math.floor(maxLog); decade++) {
    const gx = x(decade).toFixed(1);
    gridLines.push(`<line x1="${gx}" y1="${margin.top}" x2="${gx}" y2="${margin.top + innerH}" class="grid"/>`);
    gridLines.push(
      `<text x="${gx}" y="${height - 8}" text-anchor="middle" class="tick">${fmtUsdWhole(String(10 ** decade))}</text>`,
    );
  }
  for (const p of [0, 0.25, 0.5, 0.75, 1]) {
    const gy = y(p).toFixed(1);
    gridLines.push(`<line x1="${margin.left}" y1="${gy}" x2="${margin.left + innerW}" y2="${gy}" class="grid"/>`);
    gridLines.push(
      `<text x="${margin.left - 6}" y="${gy}" text-anchor="end" dominant-baseline="middle" class="tick">${fmtProbability(p)}</text>`,
    );
  }

  return (
    `<svg class="lec-chart" width="${width}" height="${height}" role="img" aria-label="loss exceedance curve">` +
    gridLines.join("") +
    `<polyline points="${points}" fill="none" class="lec-line"/>` +
    `</svg>`
  );
}
