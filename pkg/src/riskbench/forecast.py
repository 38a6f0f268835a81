"""Peer baseline and firm-private risk forecasts.

The peer baseline holds the group's incident rate per firm-year and the
mean loss per incident; their product is the expected annual loss for an
average firm. A firm multiplies that baseline by its own gap multiplier
to forecast its annual risk and expected incident size without revealing
its posture to anyone.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .aggregation import AggregateReport
from .catalog import MaturityLevel
from .gapindex import GapIndexModel, gap_multiplier, net_weighted_deviation
from .money import div_round_half_even, format_usd, format_usd_pretty, parse_usd, round_cents

__all__ = [
    "PeerBaseline",
    "FirmForecast",
    "ComparisonRow",
    "PostureComparison",
    "RiskCurveRow",
    "NoIncidents",
    "LOW_DATA_INCIDENT_FLOOR",
    "incident_rate",
    "average_loss",
    "peer_annual_risk",
    "build_baseline",
    "firm_forecast",
    "posture_comparison",
    "describe_deviation",
    "risk_curve_table",
    "risk_curve_csv",
    "baseline_to_json",
    "baseline_from_json",
    "forecast_to_json",
    "render_forecast_text",
]

# Below this many observed incidents, every derived artifact carries a
# low-data caveat.
LOW_DATA_INCIDENT_FLOOR = 3


class NoIncidents(ValueError):
    """Average loss is undefined without incidents."""


@dataclass(frozen=True)
class PeerBaseline:
    """Group-level incident rate, mean loss, and expected annual risk."""

    incidents_per_firm_year: float
    mean_loss_cents: int
    annual_risk_cents: int
    window_years: float
    firm_count: int
    incident_count: int
    low_data: bool = False


@dataclass(frozen=True)
class FirmForecast:
    """A firm's private forecast relative to the peer baseline.

    ``gap`` is the firm's risk multiplier; before currency rounding,
    annual risk / peer annual risk and incident size / peer mean loss
    both equal it exactly.
    """

    deviation: float
    gap: float
    annual_risk_cents: int
    incident_size_cents: int
    peer_annual_risk_cents: int
    peer_incident_size_cents: int
    low_data: bool = False


def incident_rate(report: AggregateReport, window_years: float) -> float:
    """Incidents per firm-year across the peer group."""
    if report.participant_count < 1:
        raise ValueError("report must cover at least one firm")
    if window_years <= 0:
        raise ValueError("window_years must be positive")
    if report.incident_count == 0:
        warnings.warn(
            "no incidents reported: the incident rate and every downstream "
            "risk figure are zero (insufficient incident data)",
            RuntimeWarning,
            stacklevel=2,
        )
    return report.incident_count / (report.participant_count * window_years)


def average_loss(report: AggregateReport) -> int:
    """Mean loss per incident, in cents, rounded half to even."""
    if report.incident_count < 1:
        raise NoIncidents("no incidents in the report")
    return div_round_half_even(report.total_loss_cents, report.incident_count)


def peer_annual_risk(incidents_per_firm_year: float, mean_loss_cents: int) -> int:
    """Expected annual loss per firm at the group-average posture, in cents."""
    if incidents_per_firm_year < 0 or mean_loss_cents < 0:
        raise ValueError("rate and loss must be non-negative")
    return round_cents(incidents_per_firm_year * mean_loss_cents)


def build_baseline(report: AggregateReport, window_years: float) -> PeerBaseline:
    rate = incident_rate(report, window_years)
    mean_loss = 0 if report.incident_count == 0 else average_loss(report)
    return PeerBaseline(
        incidents_per_firm_year=rate,
        mean_loss_cents=mean_loss,
        annual_risk_cents=peer_annual_risk(rate, mean_loss),
        window_years=window_years,
        firm_count=report.participant_count,
        incident_count=report.incident_count,
        low_data=report.incident_count < LOW_DATA_INCIDENT_FLOOR,
    )


def firm_forecast(
    own_maturities: Mapping[str, "MaturityLevel | float"],
    model: GapIndexModel,
    baseline: PeerBaseline,
) -> FirmForecast:
    """Forecast a firm's annual risk and incident size from its posture."""
    deviation = net_weighted_deviation(own_maturities, model)
    gap = gap_multiplier(deviation, model)
    annual = baseline.incidents_per_firm_year * baseline.mean_loss_cents * gap
    incident = baseline.mean_loss_cents * gap
    return FirmForecast(
        deviation=deviation,
        gap=gap,
        annual_risk_cents=round_cents(annual),
        incident_size_cents=round_cents(incident),
        peer_annual_risk_cents=baseline.annual_risk_cents,
        peer_incident_size_cents=baseline.mean_loss_cents,
        low_data=baseline.low_data,
    )


# ---------------------------------------------------------------------------
# Posture comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonRow:
    control_id: str
    name: str
    own_label: str | None
    own_fraction: float
    peer_avg: float
    distribution: tuple[int, int, int, int] | None
    delta: float
    weight: float


@dataclass(frozen=True)
class PostureComparison:
    rows: tuple[ComparisonRow, ...]
    weighted_ratio: float
    deviation: float
    summary: str


def describe_deviation(deviation: float) -> str:
    """Plain-language banding of a weighted deviation."""
    pct = deviation * 100.0
    if abs(pct) < 0.05:
        return "at the sector's weighted peer average"
    direction = "higher" if pct > 0 else "lower"
    return f"{abs(pct):.0f}% {direction} than the sector's peer average"


def posture_comparison(
    own_maturities: Mapping[str, "MaturityLevel | float"],
    report: AggregateReport | None,
    model: GapIndexModel,
) -> PostureComparison:
    """Per-control table of own vs peer posture, plus the weighted headline.

    Peer response distributions come from the report when one is at
    hand, otherwise from the distribution embedded in the model file;
    rows carry None if neither is available.
    """
    if report is not None:
        distributions = report.maturity_flag_counts
    else:
        distributions = model.maturity_distribution or {}
    rows = []
    for code, name in model.catalog.controls:
        value = own_maturities[code]
        own_fraction = value.fraction if isinstance(value, MaturityLevel) else float(value)
        rows.append(
            ComparisonRow(
                control_id=code,
                name=name,
                own_label=value.label if isinstance(value, MaturityLevel) else None,
                own_fraction=own_fraction,
                peer_avg=model.group_avg_maturity[code],
                distribution=distributions.get(code),
                delta=own_fraction - model.group_avg_maturity[code],
                weight=model.weights.weights[code],
            )
        )
    deviation = net_weighted_deviation(own_maturities, model)
    return PostureComparison(
        rows=tuple(rows),
        weighted_ratio=1.0 + deviation,
        deviation=deviation,
        summary=describe_deviation(deviation),
    )


# ---------------------------------------------------------------------------
# Risk curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RiskCurveRow:
    deviation: float
    annual_risk_cents: int
    incident_size_cents: int


def risk_curve_table(
    model: GapIndexModel,
    baseline: PeerBaseline,
    deviation_grid: Sequence[float],
) -> tuple[RiskCurveRow, ...]:
    """Annual risk and incident size evaluated over a deviation grid."""
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for x in deviation_grid:
            gap = gap_multiplier(x, model)
            rows.append(
                RiskCurveRow(
                    deviation=float(x),
                    annual_risk_cents=round_cents(
                        baseline.incidents_per_firm_year * baseline.mean_loss_cents * gap
                    ),
                    incident_size_cents=round_cents(baseline.mean_loss_cents * gap),
                )
            )
    return tuple(rows)


def risk_curve_csv(rows: Sequence[RiskCurveRow]) -> str:
    lines = ["deviation,annual_risk_usd,incident_size_usd"]
    for row in rows:
        lines.append(
            f"{row.deviation:g},{format_usd(row.annual_risk_cents)},"
            f"{format_usd(row.incident_size_cents)}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def baseline_to_json(baseline: PeerBaseline) -> str:
    doc = {
        "version": "1",
        "incidents_per_firm_year": baseline.incidents_per_firm_year,
        "mean_loss_usd": format_usd(baseline.mean_loss_cents),
        "annual_risk_usd": format_usd(baseline.annual_risk_cents),
        "window_years": baseline.window_years,
        "firm_count": baseline.firm_count,
        "incident_count": baseline.incident_count,
        "low_data": baseline.low_data,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def baseline_from_json(text: str) -> PeerBaseline:
    doc = json.loads(text)
    return PeerBaseline(
        incidents_per_firm_year=float(doc["incidents_per_firm_year"]),
        mean_loss_cents=parse_usd(doc["mean_loss_usd"]),
        annual_risk_cents=parse_usd(doc["annual_risk_usd"]),
        window_years=float(doc["window_years"]),
        firm_count=int(doc["firm_count"]),
        incident_count=int(doc["incident_count"]),
        low_data=bool(doc.get("low_data", False)),
    )


def forecast_to_json(
    forecast: FirmForecast, comparison: PostureComparison | None = None
) -> str:
    doc: dict = {
        "version": "1",
        "deviation": forecast.deviation,
        "gap_multiplier": forecast.gap,
        "annual_risk_usd": format_usd(forecast.annual_risk_cents),
        "incident_size_usd": format_usd(forecast.incident_size_cents),
        "peer_annual_risk_usd": format_usd(forecast.peer_annual_risk_cents),
        "peer_incident_size_usd": format_usd(forecast.peer_incident_size_cents),
        "low_data": forecast.low_data,
    }
    if comparison is not None:
        doc["comparison"] = {
            "weighted_ratio": comparison.weighted_ratio,
            "deviation": comparison.deviation,
            "summary": comparison.summary,
            "rows": [
                {
                    "control_id": r.control_id,
                    "name": r.name,
                    "own_level": r.own_label,
                    "own_fraction": r.own_fraction,
                    "peer_avg": r.peer_avg,
                    "distribution": list(r.distribution) if r.distribution else None,
                    "delta": r.delta,
                    "weight": r.weight,
                }
                for r in comparison.rows
            ],
        }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_forecast_text(
    forecast: FirmForecast, comparison: PostureComparison | None = None
) -> str:
    """Human-readable forecast report with aligned columns."""
    lines = [
        "Firm risk forecast",
        "------------------",
        f"weighted deviation    {forecast.deviation:+.4f}",
        f"gap multiplier        {forecast.gap:.4f}",
        f"annual risk           {format_usd_pretty(forecast.annual_risk_cents)}"
        f"  (peers {format_usd_pretty(forecast.peer_annual_risk_cents)})",
        f"incident size         {format_usd_pretty(forecast.incident_size_cents)}"
        f"  (peers {format_usd_pretty(forecast.peer_incident_size_cents)})",
    ]
    if forecast.low_data:
        lines.append("caveat: baseline rests on very few incidents; treat with care")
    if comparison is not None:
        lines.append("")
        lines.append(f"posture: {comparison.summary}")
        lines.append(f"{'control':8} {'name':34} {'own':>6} {'peers':>6} {'delta':>7} {'weight':>7}")
        for r in comparison.rows:
            lines.append(
                f"{r.control_id:8} {r.name:34} {r.own_fraction:6.2f} "
                f"{r.peer_avg:6.2f} {r.delta:+7.2f} {r.weight:7.1%}"
            )
    return "\n".join(lines) + "\n"
