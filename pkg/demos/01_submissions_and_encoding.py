"""
One firm's submission: validation, checksum, and the 161-slot vector
====================================================================

Walks a single private submission from raw ratings and incidents to the
integer vector that actually enters the peer aggregation.
"""

from riskbench.catalog import ControlCatalog, LossBandSchema, MaturityLevel
from riskbench.money import format_usd_pretty
from riskbench.submission import (
    IncidentRecord,
    ParticipantSubmission,
    VectorLayout,
    encode_submission_vector,
    read_vector_fields,
    split_incident_loss,
    validate_submission,
    with_checksum,
)

catalog = ControlCatalog()
bands = LossBandSchema()

# A firm rates all 22 controls on the four-step scale.
maturities = {code: MaturityLevel.LARGELY_IMPLEMENTED for code in catalog.codes}
maturities["1a"] = MaturityLevel.FULLY_IMPLEMENTED       # MFA everywhere
maturities["9b"] = MaturityLevel.PARTIALLY_IMPLEMENTED   # red teaming just started

# Two incidents in the window; each blames up to five controls and the
# loss is split evenly across them.
incidents = (
    IncidentRecord(loss_cents=15_000_000, implicated_controls=frozenset({"6b", "6d"})),
    IncidentRecord(loss_cents=9_000_000, implicated_controls=frozenset({"5b"})),
)

submission = with_checksum(
    ParticipantSubmission(
        participant_id="demo-firm", maturities=maturities, incidents=incidents
    )
)
print(f"checksum over canonical bytes: {submission.checksum:08x}")

result = validate_submission(submission, catalog)
print(f"validation: {'ok' if result.ok else result.violations}")

# Even split of the $150k incident across its two implicated controls.
for inc in incidents:
    shares = {c: format_usd_pretty(v) for c, v in split_incident_loss(inc).items()}
    print(f"{format_usd_pretty(inc.loss_cents)} split -> {shares}")

# The encoded vector: 22 maturity numerators, 88 one-hot flags, incident
# count, 22 failure counts, total loss, 22 attributed losses, 5 band flags.
vector = encode_submission_vector(submission, catalog, bands)
layout = VectorLayout(catalog, bands)
print(f"\nvector length: {len(vector)} (layout says {layout.length})")

fields = read_vector_fields(vector, layout)
print(f"incident count slot: {fields.incident_count}")
print(f"total loss slot: {format_usd_pretty(fields.total_loss_cents)}")
print(f"band flags: {fields.band_counts}  <- one flag, the firm's $240k total")

# Note what the vector does NOT contain: the two incidents are no longer
# separable. Only counts, sums, and a single coarse band flag survive.
nonzero_failures = {
    catalog.codes[i]: c for i, c in enumerate(fields.control_failure_counts) if c
}
print(f"failure counts: {nonzero_failures}")
