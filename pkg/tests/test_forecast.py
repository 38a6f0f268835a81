"""Peer baseline figures, firm forecasts, comparisons, and the risk curve."""

from __future__ import annotations

import math

import pytest

from riskbench.catalog import ControlCatalog, MaturityLevel
from riskbench.forecast import (
    NoIncidents,
    average_loss,
    baseline_from_json,
    baseline_to_json,
    build_baseline,
    describe_deviation,
    firm_forecast,
    forecast_to_json,
    incident_rate,
    peer_annual_risk,
    posture_comparison,
    render_forecast_text,
    risk_curve_csv,
    risk_curve_table,
)
from riskbench.money import div_round_half_even

from conftest import make_report

CATALOG = ControlCatalog()


# ---------------------------------------------------------------------------
# Baseline pieces
# ---------------------------------------------------------------------------

def test_incident_rate_demo(demo_report):
    assert incident_rate(demo_report, 2.5) == 0.064


def test_incident_rate_simple_cases():
    report = make_report({"5a": 10_000_000} , participants=10, incident_count=10)
    assert incident_rate(report, 1.0) == 1.0
    empty = make_report({}, participants=10)
    with pytest.warns(RuntimeWarning, match="insufficient incident data"):
        assert incident_rate(empty, 1.0) == 0.0


def test_average_loss_demo(demo_report):
    assert average_loss(demo_report) == 14_500_000  # $145,000


def test_average_loss_single_incident():
    report = make_report({"5a": 5_000_000}, incident_count=1)
    assert average_loss(report) == 5_000_000


def test_average_loss_half_even_rounding():
    report = make_report({"5a": 100_001}, incident_count=2)
    assert average_loss(report) == 50_000
    assert div_round_half_even(100_003, 2) == 50_002  # rounds up to the even side


def test_average_loss_requires_incidents():
    with pytest.raises(NoIncidents):
        average_loss(make_report({}))


def test_peer_annual_risk_values():
    assert peer_annual_risk(0.064, 14_500_000) == 928_000  # $9,280
    assert peer_annual_risk(0.0, 14_500_000) == 0
    assert peer_annual_risk(1.0, 14_500_000) == 14_500_000


def test_peer_annual_risk_linear():
    base = peer_annual_risk(0.1, 1_000_000)
    assert peer_annual_risk(0.2, 1_000_000) == 2 * base
    assert peer_annual_risk(0.1, 2_000_000) == 2 * base


def test_build_baseline_demo(demo_report, demo_baseline):
    assert demo_baseline.incidents_per_firm_year == 0.064
    assert demo_baseline.mean_loss_cents == 14_500_000
    assert demo_baseline.annual_risk_cents == 928_000
    assert demo_baseline.firm_count == 25
    assert demo_baseline.low_data is False  # 4 incidents clears the floor


def test_build_baseline_low_data_flag():
    report = make_report({"5a": 10_000_000}, incident_count=2)
    baseline = build_baseline(report, 2.5)
    assert baseline.low_data is True


def test_baseline_json_round_trip(demo_baseline):
    parsed = baseline_from_json(baseline_to_json(demo_baseline))
    assert parsed == demo_baseline


# ---------------------------------------------------------------------------
# Firm forecast
# ---------------------------------------------------------------------------

def test_forecast_at_peer_average(demo_model, demo_baseline):
    own = dict(demo_model.group_avg_maturity)
    fc = firm_forecast(own, demo_model, demo_baseline)
    assert fc.annual_risk_cents == 928_000
    assert fc.incident_size_cents == 14_500_000
    assert fc.gap == pytest.approx(1.0, abs=1e-9)


def test_forecast_reference_endpoints(pinned_model, demo_baseline):
    own_low = {c: 0.65 * v for c, v in pinned_model.group_avg_maturity.items()}
    with pytest.warns(RuntimeWarning):
        fc = firm_forecast(own_low, pinned_model, demo_baseline)
    assert fc.deviation == pytest.approx(-0.35, abs=1e-9)
    assert fc.annual_risk_cents == pytest.approx(4_972_300, rel=0.01)   # ~$49,723
    assert fc.incident_size_cents == pytest.approx(77_690_000, rel=0.01)  # ~$776,900


def test_forecast_thirty_percent_below_with_pinned_exponent(pinned_model, demo_baseline):
    own = {c: 0.7 * v for c, v in pinned_model.group_avg_maturity.items()}
    fc = firm_forecast(own, pinned_model, demo_baseline)
    # 9280 * e^(0.3 * 4.796) ~= $39,100
    assert fc.annual_risk_cents == pytest.approx(3_910_000, rel=0.01)


def test_forecast_ratio_identities(demo_model, demo_baseline):
    own = {c: 0.8 * v for c, v in demo_model.group_avg_maturity.items()}
    fc = firm_forecast(own, demo_model, demo_baseline)
    annual_exact = (
        demo_baseline.incidents_per_firm_year * demo_baseline.mean_loss_cents * fc.gap
    )
    incident_exact = demo_baseline.mean_loss_cents * fc.gap
    peer_annual_exact = (
        demo_baseline.incidents_per_firm_year * demo_baseline.mean_loss_cents
    )
    assert annual_exact / peer_annual_exact == pytest.approx(fc.gap, abs=1e-9)
    assert incident_exact / demo_baseline.mean_loss_cents == pytest.approx(fc.gap, abs=1e-9)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_forecast_monotone_in_each_maturity(demo_model, demo_baseline):
    base = {c: 0.5 for c in CATALOG.codes}
    base_risk = firm_forecast(base, demo_model, demo_baseline).annual_risk_cents
    for code in ("5a", "1a", "10a"):
        better = dict(base)
        better[code] = 0.9
        improved = firm_forecast(better, demo_model, demo_baseline).annual_risk_cents
        assert improved < base_risk


# ---------------------------------------------------------------------------
# Posture comparison
# ---------------------------------------------------------------------------

def test_comparison_at_average_all_deltas_zero(demo_model, demo_report):
    own = dict(demo_model.group_avg_maturity)
    comparison = posture_comparison(own, demo_report, demo_model)
    assert comparison.weighted_ratio == pytest.approx(1.0, abs=1e-12)
    assert all(abs(r.delta) < 1e-12 for r in comparison.rows)
    assert comparison.summary == "at the sector's weighted peer average"


def test_comparison_quarter_below_renders_lower(demo_model):
    own = {c: 0.75 * v for c, v in demo_model.group_avg_maturity.items()}
    comparison = posture_comparison(own, None, demo_model)
    assert comparison.weighted_ratio == pytest.approx(0.75, abs=1e-9)
    assert comparison.summary == "25% lower than the sector's peer average"


def test_comparison_matches_naive_loop_oracle(demo_model, demo_report):
    own = {c: MaturityLevel.LARGELY_IMPLEMENTED for c in CATALOG.codes}
    comparison = posture_comparison(own, demo_report, demo_model)
    for row in comparison.rows:
        # oracle: recompute each column straight from the inputs
        assert row.own_fraction == pytest.approx(2 / 3)
        assert row.peer_avg == demo_report.avg_maturity[row.control_id]
        assert row.delta == pytest.approx(2 / 3 - demo_report.avg_maturity[row.control_id])
        assert row.distribution == demo_report.maturity_flag_counts[row.control_id]
        assert sum(row.distribution) == demo_report.participant_count
        assert row.weight == demo_model.weights.weights[row.control_id]


def test_comparison_distribution_from_model_when_no_report(demo_model):
    own = dict(demo_model.group_avg_maturity)
    comparison = posture_comparison(own, None, demo_model)
    assert all(r.distribution is not None for r in comparison.rows)


def test_describe_deviation_wording():
    assert describe_deviation(0.0) == "at the sector's weighted peer average"
    assert describe_deviation(-0.25) == "25% lower than the sector's peer average"
    assert describe_deviation(0.10) == "10% higher than the sector's peer average"


# ---------------------------------------------------------------------------
# Risk curve
# ---------------------------------------------------------------------------

def test_risk_curve_reference_rows(pinned_model, demo_baseline):
    rows = risk_curve_table(pinned_model, demo_baseline, [-0.35, 0.0, 0.35])
    by_dev = {row.deviation: row for row in rows}
    assert abs(by_dev[-0.35].annual_risk_cents - 4_972_300) <= 1_000   # $49,723 +/- $10
    assert by_dev[0.0].annual_risk_cents == 928_000                    # $9,280
    assert abs(by_dev[0.35].annual_risk_cents - 173_200) <= 1_000      # $1,732 +/- $10
    assert by_dev[0.0].incident_size_cents == 14_500_000


def test_risk_curve_empty_grid(demo_model, demo_baseline):
    assert risk_curve_table(demo_model, demo_baseline, []) == ()


def test_risk_curve_consistent_with_pointwise_forecast(demo_model, demo_baseline):
    grid = [-0.2, -0.05, 0.0, 0.1]
    rows = risk_curve_table(demo_model, demo_baseline, grid)
    for x, row in zip(grid, rows):
        own = {c: (1 + x) * v for c, v in demo_model.group_avg_maturity.items()}
        fc = firm_forecast(own, demo_model, demo_baseline)
        assert abs(fc.annual_risk_cents - row.annual_risk_cents) <= 1
        assert abs(fc.incident_size_cents - row.incident_size_cents) <= 1


def test_risk_curve_csv_shape(demo_model, demo_baseline):
    rows = risk_curve_table(demo_model, demo_baseline, [-0.1, 0.0, 0.1])
    text = risk_curve_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "deviation,annual_risk_usd,incident_size_usd"
    assert len(lines) == 4
    assert lines[2].startswith("0,9280.00,145000.00")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def test_forecast_text_rendering(demo_model, demo_baseline):
    own = dict(demo_model.group_avg_maturity)
    fc = firm_forecast(own, demo_model, demo_baseline)
    comparison = posture_comparison(own, None, demo_model)
    text = render_forecast_text(fc, comparison)
    assert "$9,280.00" in text
    assert "$145,000.00" in text
    assert "at the sector's weighted peer average" in text


def test_forecast_json_fields(demo_model, demo_baseline):
    own = dict(demo_model.group_avg_maturity)
    fc = firm_forecast(own, demo_model, demo_baseline)
    import json

    doc = json.loads(forecast_to_json(fc, posture_comparison(own, None, demo_model)))
    assert doc["annual_risk_usd"] == "9280.00"
    assert doc["incident_size_usd"] == "145000.00"
    assert doc["gap_multiplier"] == pytest.approx(1.0, abs=1e-9)
    assert len(doc["comparison"]["rows"]) == 22


def test_low_data_flag_travels_to_forecast(demo_model):
    report = make_report({"5a": 10_000_000}, incident_count=1)
    baseline = build_baseline(report, 2.5)
    own = dict(demo_model.group_avg_maturity)
    fc = firm_forecast(own, demo_model, baseline)
    assert fc.low_data is True
