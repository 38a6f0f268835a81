from __future__ import annotations

import numpy as np
import pytest

from riskbench.aggregation import (
    AggregateReport,
    AggregationSession,
    post_process,
    share_vector,
)
from riskbench.catalog import ControlCatalog, LossBandSchema
from riskbench.config import DEFAULT_ANCHORS
from riskbench.forecast import PeerBaseline, build_baseline
from riskbench.gapindex import GapIndexModel, build_model
from riskbench.reference import DEMO_WINDOW_YEARS, demo_submissions
from riskbench.submission import (
    EncodingParams,
    VectorLayout,
    encode_submission_vector,
)


@pytest.fixture(scope="session")
def catalog() -> ControlCatalog:
    return ControlCatalog()


@pytest.fixture(scope="session")
def bands() -> LossBandSchema:
    return LossBandSchema()


@pytest.fixture(scope="session")
def demo_report(catalog, bands) -> AggregateReport:
    """Aggregate the bundled demo sector through the real share/decode path."""
    subs = demo_submissions()
    layout = VectorLayout(catalog, bands)
    params = EncodingParams.for_layout(layout, aggregator_count=3)
    session = AggregationSession(
        "fixture-session", params, [s.participant_id for s in subs]
    )
    rng = np.random.default_rng(123)
    for sub in subs:
        vec = encode_submission_vector(sub, catalog, bands)
        for share in share_vector(vec, params.aggregator_count, rng, sub.participant_id):
            session.aggregate_shares(share)
    session.seal()
    raw = session.decode_aggregate()
    return post_process(raw, len(subs), catalog, bands, session_id="fixture-session")


@pytest.fixture(scope="session")
def demo_model(demo_report, catalog) -> GapIndexModel:
    return build_model(demo_report, catalog, anchors=DEFAULT_ANCHORS)


@pytest.fixture(scope="session")
def pinned_model(demo_model) -> GapIndexModel:
    """Demo model with the exponent pinned to the reference curve constant."""
    from dataclasses import replace

    return replace(demo_model, exponent=-4.796)


@pytest.fixture(scope="session")
def demo_baseline(demo_report) -> PeerBaseline:
    return build_baseline(demo_report, DEMO_WINDOW_YEARS)


def make_report(
    losses: dict[str, int] | None = None,
    *,
    participants: int = 10,
    incident_count: int | None = None,
    catalog: ControlCatalog | None = None,
    avg_numerator: int = 3,
) -> AggregateReport:
    """Minimal consistent report for weight and baseline tests.

    Every firm rates every control at the same level; attributed losses
    and the incident count are set directly.
    """
    catalog = catalog or ControlCatalog()
    losses = dict(losses or {})
    n = participants
    flags = [0, 0, 0, 0]
    flags[avg_numerator] = n
    per_control = {c: losses.get(c, 0) for c in catalog.codes}
    count = incident_count if incident_count is not None else len(
        [v for v in losses.values() if v > 0]
    )
    return AggregateReport(
        participant_count=n,
        avg_maturity={c: avg_numerator / 3.0 for c in catalog.codes},
        overall_avg_maturity=avg_numerator / 3.0,
        maturity_flag_counts={c: tuple(flags) for c in catalog.codes},
        incident_count=count,
        control_failure_counts={
            c: (1 if per_control[c] > 0 else 0) for c in catalog.codes
        },
        total_loss_cents=sum(per_control.values()),
        per_control_loss_cents=per_control,
        band_counts=(0,) * 5,
        session_id="synthetic",
    )
