"""
A firm forecasts its own risk, offline
======================================

Everything a participant needs comes back from the group computation:
the model file and the baseline. Their own ratings never leave the
machine. This demo scores one hypothetical firm and ranks which single
control improvement would buy the most risk reduction.
"""

import numpy as np

from riskbench.aggregation import AggregationSession, post_process, share_vector
from riskbench.catalog import ControlCatalog, LossBandSchema, MaturityLevel
from riskbench.config import DEFAULT_ANCHORS
from riskbench.forecast import build_baseline, firm_forecast, posture_comparison
from riskbench.gapindex import build_model
from riskbench.money import format_usd_pretty
from riskbench.reference import DEMO_WINDOW_YEARS, demo_submissions
from riskbench.submission import EncodingParams, VectorLayout, encode_submission_vector

# Sector model from the demo group (details in demos 02 and 03).
catalog, bands = ControlCatalog(), LossBandSchema()
layout = VectorLayout(catalog, bands)
submissions = demo_submissions()
session = AggregationSession(
    "forecast-demo", EncodingParams.for_layout(layout, 2),
    [s.participant_id for s in submissions],
)
rng = np.random.default_rng(99)
for sub in submissions:
    for share in share_vector(
        encode_submission_vector(sub, catalog, bands), 2, rng, sub.participant_id
    ):
        session.aggregate_shares(share)
session.seal()
report = post_process(session.decode_aggregate(), len(submissions), catalog, bands)
model = build_model(report, catalog, anchors=DEFAULT_ANCHORS)
baseline = build_baseline(report, DEMO_WINDOW_YEARS)

# A firm sitting below the pack: largely implemented across the board
# (the group averages run higher) and training only partially in place.
own = {code: MaturityLevel.LARGELY_IMPLEMENTED for code in catalog.codes}
own["5b"] = MaturityLevel.PARTIALLY_IMPLEMENTED

forecast = firm_forecast(own, model, baseline)
comparison = posture_comparison(own, report, model)

print(f"posture: {comparison.summary}")
print(f"weighted deviation: {forecast.deviation:+.4f}")
print(f"gap multiplier: {forecast.gap:.3f}")
print(
    f"annual risk: {format_usd_pretty(forecast.annual_risk_cents)} "
    f"(peer average {format_usd_pretty(forecast.peer_annual_risk_cents)})"
)
print(
    f"expected incident size: {format_usd_pretty(forecast.incident_size_cents)} "
    f"(peer average {format_usd_pretty(forecast.peer_incident_size_cents)})"
)

# What-if: bump each lagging control one level and rank the payoff.
print("\nsingle-level what-ifs, best first:")
candidates = []
for code in catalog.codes:
    level = own[code]
    if level is MaturityLevel.FULLY_IMPLEMENTED:
        continue
    variant = dict(own)
    variant[code] = MaturityLevel(level.numerator + 1)
    improved = firm_forecast(variant, model, baseline)
    saved = forecast.annual_risk_cents - improved.annual_risk_cents
    candidates.append((saved, code))
candidates.sort(key=lambda item: (-item[0], item[1]))
for saved, code in candidates[:5]:
    print(
        f"  {code:4} {catalog.name_of(code):28} one level up saves "
        f"{format_usd_pretty(saved)} per year"
    )
