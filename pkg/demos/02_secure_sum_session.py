"""
Secure summation: shares in, column sums out, nothing else
==========================================================

Runs the bundled 25-firm demo sector through an aggregation session and
shows the two properties that matter: the decoded vector equals the
plaintext column sums exactly, and any single share is indistinguishable
from ring noise.
"""

import numpy as np

from riskbench.aggregation import (
    AggregationSession,
    post_process,
    share_vector,
)
from riskbench.catalog import ControlCatalog, LossBandSchema
from riskbench.money import format_usd_pretty
from riskbench.reference import demo_submissions
from riskbench.submission import EncodingParams, VectorLayout, encode_submission_vector

catalog = ControlCatalog()
bands = LossBandSchema()
layout = VectorLayout(catalog, bands)

submissions = demo_submissions()
vectors = {
    sub.participant_id: encode_submission_vector(sub, catalog, bands)
    for sub in submissions
}

# Three aggregator nodes; none of them ever holds more than one share
# per firm, and one share alone is uniform noise on the 2^64 ring.
params = EncodingParams.for_layout(layout, aggregator_count=3)
session = AggregationSession("demo-session", params, vectors.keys())
rng = np.random.default_rng(2718)

example_shown = False
for pid, vector in vectors.items():
    shares = share_vector(vector, params.aggregator_count, rng, pid)
    if not example_shown:
        print(f"plaintext slot 0 for {pid}: {vector[0]}")
        print(f"its three shares: {[int(s.entries[0]) for s in shares]}")
        print(f"share sum mod 2^64: {sum(int(s.entries[0]) for s in shares) % 2**64}")
        example_shown = True
    for share in shares:
        session.aggregate_shares(share)

session.seal()
decoded = session.decode_aggregate()

# Oracle check: plain column sums over the plaintext vectors.
oracle = [sum(vec[i] for vec in vectors.values()) for i in range(layout.length)]
print(f"\ndecoded equals plaintext column sums: {decoded == oracle}")

report = post_process(decoded, len(vectors), catalog, bands, session_id="demo-session")
print(f"participants: {report.participant_count}")
print(f"incidents: {report.incident_count}")
print(f"total losses: {format_usd_pretty(report.total_loss_cents)}")
print(f"overall average maturity: {report.overall_avg_maturity:.0%}")
print(f"loss band counts: {report.band_counts}")
print("attributed losses:")
for code, cents in report.per_control_loss_cents.items():
    if cents:
        print(f"  {code:4} {catalog.name_of(code):28} {format_usd_pretty(cents)}")
