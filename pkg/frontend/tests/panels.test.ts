import { describe, expect, it } from "vitest";

import { lecChartSvg } from "../src/charts";
import {
  renderComparisonPanel,
  renderErrorBanner,
  renderForecastPanel,
  renderWhatIfPanel,
} from "../src/panels";
import type { ComparisonPayload, ForecastPayload, WhatIfVariantResult } from "../src/types";

const peerAverageForecast: ForecastPayload = {
  deviation: 0,
  gap_multiplier: 1.0,
  annual_risk_usd: "9280.00",
  incident_size_usd: "145000.00",
  peer_annual_risk_usd: "9280.00",
  peer_incident_size_usd: "145000.00",
  low_data: false,
};

describe("forecast panel", () => {
  it("shows the annual headline and the gap exactly as formatted", () => {
    const html = renderForecastPanel(peerAverageForecast);
    expect(html).toContain("$9,280 / year");
    expect(html).toContain("G = 1.00");
    expect(html).toContain("$145,000");
    expect(html).not.toContain("banner warn");
  });

  it("shows a multiple badge for a weak posture", () => {
    const html = renderForecastPanel({
      ...peerAverageForecast,
      gap_multiplier: 5.36,
      annual_risk_usd: "49722.70",
    });
    expect(html).toContain("5.4x peer average");
    expect(html).toContain("$49,723 / year");
  });

  it("flags low-data baselines", () => {
    const html = renderForecastPanel({ ...peerAverageForecast, low_data: true });
    expect(html).toContain("banner warn");
    expect(html).toContain("very few incidents");
  });
});

describe("error banner", () => {
  it("escapes markup in messages", () => {
    const html = renderErrorBanner('<script>alert("x")</script>');
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("comparison panel", () => {
  const comparison: ComparisonPayload = {
    weighted_ratio: 0.75,
    deviation: -0.25,
    summary: "25% lower than the sector's peer average",
    rows: [
      {
        control_id: "5a",
        name: "Eval employee skills",
        own_level: "partially_implemented",
        own_fraction: 1 / 3,
        peer_avg: 0.81,
        distribution: [0, 1, 9, 15],
        delta: 1 / 3 - 0.81,
        weight: 0.42,
      },
    ],
  };

  it("renders the deviation badge and the service summary verbatim", () => {
    const html = renderComparisonPanel(comparison);
    expect(html).toContain("-25%");
    expect(html).toContain("25% lower than the sector&#39;s peer average".replace("&#39;", "'"));
    expect(html).toContain("Eval employee skills");
    expect(html).toContain("Partially implemented");
    expect(html).toContain("81%");
  });

  it("renders zero-delta rows without a negative badge", () => {
    const html = renderComparisonPanel({
      ...comparison,
      deviation: 0,
      summary: "at the sector's weighted peer average",
      rows: [{ ...comparison.rows[0]!, delta: 0, own_fraction: 0.81 }],
    });
    expect(html).toContain("at the sector's weighted peer average");
    expect(html).toContain(">0%<");
  });
});

describe("what-if panel", () => {
  const names = new Map([["5a", "Eval employee skills"]]);
  const variants: WhatIfVariantResult[] = [
    {
      changes: [{ control_id: "5a", level: "fully_implemented" }],
      forecast: { ...peerAverageForecast, annual_risk_usd: "10281.29" },
      annual_risk_delta_usd: "-12916.50",
    },
  ];

  it("describes the saving per variant", () => {
    const html = renderWhatIfPanel(variants, names);
    expect(html).toContain("Eval employee skills");
    expect(html).toContain("saves $12,917 / year");
    expect(html).toContain("new risk $10,281 / year");
  });

  it("handles the nothing-to-improve case", () => {
    expect(renderWhatIfPanel([], names)).toContain("fully implemented");
  });
});

describe("exceedance chart", () => {
  it("draws a polyline over log-spaced thresholds", () => {
    const svg = lecChartSvg([
      { threshold_usd: "1000.00", exceedance_prob: 0.97 },
      { threshold_usd: "10000.00", exceedance_prob: 0.94 },
      { threshold_usd: "100000.00", exceedance_prob: 0.45 },
      { threshold_usd: "1000000.00", exceedance_prob: 0.008 },
    ]);
    expect(svg).toContain("<polyline");
    expect(svg).toContain("$1,000");
    expect(svg).toContain("$1,000,000");
    expect(svg).toContain("100.0%");
  });

  it("degrades gracefully with too few points", () => {
    const svg = lecChartSvg([{ threshold_usd: "1000.00", exceedance_prob: 1 }]);
    expect(svg).toContain("not enough curve points");
  });
});
