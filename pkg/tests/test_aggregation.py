"""Secret sharing, session mechanics, decoding, and share uniformity."""

from __future__ import annotations

import random

import numpy as np
import pytest
from scipy.stats import chisquare

from riskbench.aggregation import (
    RING_MODULUS,
    AggregationSession,
    DuplicateContribution,
    IncompleteSession,
    LengthMismatch,
    SessionNotSealed,
    SessionSealed,
    ShareVector,
    UnknownParticipant,
    decode_share_message,
    encode_share_message,
    participant_wire_tag,
    post_process,
    report_from_json,
    report_to_json,
    session_wire_tag,
    share_vector,
)
from riskbench.catalog import ControlCatalog, LossBandSchema
from riskbench.submission import EncodingParams


def brute_force_reconstruct(shares) -> list[int]:
    """Oracle: entrywise python-int sum of shares, reduced mod 2^64."""
    length = shares[0].entries.size
    return [
        sum(int(s.entries[i]) for s in shares) % RING_MODULUS for i in range(length)
    ]


def run_session(vectors: dict[str, list[int]], t: int, seed: int = 0,
                min_participants: int = 1) -> list[int]:
    params = EncodingParams(vector_length=len(next(iter(vectors.values()))),
                            aggregator_count=t)
    session = AggregationSession("s", params, vectors.keys(),
                                 min_participants=min_participants)
    rng = np.random.default_rng(seed)
    for pid, vec in vectors.items():
        for share in share_vector(vec, t, rng, pid):
            session.aggregate_shares(share)
    session.seal()
    return session.decode_aggregate()


# ---------------------------------------------------------------------------
# Sharing
# ---------------------------------------------------------------------------

def test_two_party_share_is_residual_arithmetic():
    class FixedRng:
        def integers(self, low, high, size, dtype):
            return np.full(size, 5, dtype=dtype)

    shares = share_vector([7], 2, FixedRng(), "p")
    assert int(shares[0].entries[0]) == 5
    assert int(shares[1].entries[0]) == 2


def test_reconstruction_property_many_random_vectors():
    rng = np.random.default_rng(11)
    py_rng = random.Random(11)
    for _ in range(1000):
        t = py_rng.choice([2, 3, 5])
        vec = [py_rng.randrange(0, 2**63) for _ in range(py_rng.randint(1, 8))]
        shares = share_vector(vec, t, rng, "p")
        assert brute_force_reconstruct(shares) == [v % RING_MODULUS for v in vec]


def test_zero_vector_shares_are_masked():
    rng = np.random.default_rng(3)
    shares = share_vector([0] * 64, 2, rng, "p")
    assert brute_force_reconstruct(shares) == [0] * 64
    for share in shares:
        assert np.any(share.entries != 0)


def test_share_rejects_out_of_ring_entries():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        share_vector([-1], 2, rng)
    with pytest.raises(ValueError):
        share_vector([2**64], 2, rng)


# ---------------------------------------------------------------------------
# Session mechanics
# ---------------------------------------------------------------------------

def test_two_participant_sum():
    decoded = run_session({"a": [3, 1], "b": [2, 2]}, t=2)
    assert decoded == [5, 3]


def test_duplicate_contribution_rejected():
    params = EncodingParams(vector_length=2, aggregator_count=2)
    session = AggregationSession("s", params, ["a"], min_participants=1)
    rng = np.random.default_rng(1)
    shares = share_vector([1, 2], 2, rng, "a")
    session.aggregate_shares(shares[0])
    with pytest.raises(DuplicateContribution):
        session.aggregate_shares(shares[0])


def test_length_mismatch_rejected():
    params = EncodingParams(vector_length=161, aggregator_count=2)
    session = AggregationSession("s", params, ["a"], min_participants=1)
    short = ShareVector("a", 0, np.zeros(160, dtype=np.uint64))
    with pytest.raises(LengthMismatch):
        session.aggregate_shares(short)


def test_sealed_session_rejects_shares():
    params = EncodingParams(vector_length=1, aggregator_count=2)
    session = AggregationSession("s", params, ["a"], min_participants=1)
    session.seal()
    with pytest.raises(SessionSealed):
        session.aggregate_shares(ShareVector("a", 0, np.zeros(1, dtype=np.uint64)))


def test_unknown_participant_rejected():
    params = EncodingParams(vector_length=1, aggregator_count=2)
    session = AggregationSession("s", params, ["a"], min_participants=1)
    with pytest.raises(UnknownParticipant):
        session.aggregate_shares(ShareVector("zz", 0, np.zeros(1, dtype=np.uint64)))


def test_decode_requires_seal_and_completeness():
    params = EncodingParams(vector_length=1, aggregator_count=2)
    session = AggregationSession("s", params, ["a", "b"], min_participants=1)
    rng = np.random.default_rng(5)
    for share in share_vector([4], 2, rng, "a"):
        session.aggregate_shares(share)
    with pytest.raises(SessionNotSealed):
        session.decode_aggregate()
    session.seal()
    with pytest.raises(IncompleteSession):
        session.decode_aggregate()


def test_single_participant_decode_warns_no_privacy():
    params = EncodingParams(vector_length=3, aggregator_count=2)
    session = AggregationSession("s", params, ["only"], min_participants=1)
    rng = np.random.default_rng(5)
    for share in share_vector([9, 8, 7], 2, rng, "only"):
        session.aggregate_shares(share)
    session.seal()
    with pytest.warns(RuntimeWarning, match="no privacy"):
        assert session.decode_aggregate() == [9, 8, 7]


def test_release_threshold_enforced_at_enrollment():
    params = EncodingParams(vector_length=1, aggregator_count=2)
    with pytest.raises(ValueError, match="release threshold"):
        AggregationSession("s", params, ["a", "b"], min_participants=3)


def test_decode_independent_of_arrival_order():
    vectors = {f"p{i}": [i, 100 - i, i * i] for i in range(6)}
    params = EncodingParams(vector_length=3, aggregator_count=3)
    rng = np.random.default_rng(7)
    all_shares = [
        share
        for pid, vec in vectors.items()
        for share in share_vector(vec, 3, rng, pid)
    ]
    expected = None
    for order_seed in (1, 2, 3):
        session = AggregationSession("s", params, vectors.keys(), min_participants=1)
        shuffled = all_shares[:]
        random.Random(order_seed).shuffle(shuffled)
        for share in shuffled:
            session.aggregate_shares(share)
        session.seal()
        decoded = session.decode_aggregate()
        if expected is None:
            expected = decoded
        assert decoded == expected


def test_concurrent_contributions_decode_exactly():
    import threading

    vectors = {f"p{i}": [i * 13 + j for j in range(20)] for i in range(12)}
    params = EncodingParams(vector_length=20, aggregator_count=4)
    session = AggregationSession("threads", params, vectors.keys(), min_participants=1)
    rng = np.random.default_rng(55)
    all_shares = [
        share
        for pid, vec in vectors.items()
        for share in share_vector(vec, 4, rng, pid)
    ]

    def worker(shares):
        for share in shares:
            session.aggregate_shares(share)

    threads = [
        threading.Thread(target=worker, args=(all_shares[i::6],)) for i in range(6)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    session.seal()
    oracle = [sum(vec[i] for vec in vectors.values()) for i in range(20)]
    assert session.decode_aggregate() == oracle


def test_random_sessions_match_plaintext_column_sums():
    py_rng = random.Random(2024)
    for trial in range(25):
        n = py_rng.randint(3, 12)
        length = py_rng.randint(1, 30)
        vectors = {
            f"p{i}": [py_rng.randrange(0, 10**12) for _ in range(length)]
            for i in range(n)
        }
        decoded = run_session(vectors, t=py_rng.randint(2, 5), seed=trial)
        oracle = [sum(vec[i] for vec in vectors.values()) for i in range(length)]
        assert decoded == oracle


def test_sealed_session_retains_only_running_sums():
    """After sealing, no per-participant vector survives inside the session."""
    params = EncodingParams(vector_length=4, aggregator_count=2)
    session = AggregationSession("s", params, ["a", "b", "c"])
    rng = np.random.default_rng(2)
    for pid in ("a", "b", "c"):
        for share in share_vector([1, 2, 3, 4], 2, rng, pid):
            session.aggregate_shares(share)
    session.seal()
    arrays = [
        (name, value)
        for name, value in vars(session).items()
        if isinstance(value, np.ndarray)
    ]
    assert [name for name, _ in arrays] == ["_sums"]
    assert arrays[0][1].shape == (2, 4)
    # contribution ledger holds identities only, not vectors
    assert all(
        isinstance(k, tuple) and isinstance(k[0], str) and isinstance(k[1], int)
        for k in session._seen
    )


# ---------------------------------------------------------------------------
# Share uniformity (structural privacy)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("share_index", [0, 2])
def test_single_share_entries_uniform_chi_square(share_index):
    plaintext = [7, 0, 2**40, 123456789] * 4
    rng = np.random.default_rng(97)
    entries = []
    for _ in range(1200):
        shares = share_vector(plaintext, 3, rng, "p")
        entries.append(shares[share_index].entries)
    pooled = np.concatenate(entries)
    counts = np.bincount((pooled >> np.uint64(58)).astype(np.int64), minlength=64)
    assert chisquare(counts).pvalue > 0.01


# ---------------------------------------------------------------------------
# Post-processing
# ---------------------------------------------------------------------------

def test_post_process_demo_report(demo_report):
    assert demo_report.participant_count == 25
    assert demo_report.incident_count == 4
    assert demo_report.total_loss_cents == 58_000_000
    assert demo_report.overall_avg_maturity == pytest.approx(0.78, abs=1e-12)
    assert demo_report.band_counts == (0, 1, 2, 0, 0)
    for flags in demo_report.maturity_flag_counts.values():
        assert sum(flags) == 25
    assert sum(demo_report.per_control_loss_cents.values()) == 58_000_000


def test_post_process_all_fully():
    catalog, bands = ControlCatalog(), LossBandSchema()
    from riskbench.submission import VectorLayout

    layout = VectorLayout(catalog, bands)
    n = 4
    vec = [0] * layout.length
    for i in range(catalog.count):
        vec[i] = 3 * n
        vec[layout.flags_start + 4 * i + 3] = n
    report = post_process(vec, n, catalog, bands)
    assert all(v == 1.0 for v in report.avg_maturity.values())
    assert report.overall_avg_maturity == 1.0


def test_report_json_round_trip(demo_report, catalog):
    text = report_to_json(demo_report, catalog)
    parsed = report_from_json(text)
    assert parsed == demo_report
    assert report_to_json(parsed, catalog) == text


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------

def test_share_message_round_trip():
    rng = np.random.default_rng(8)
    entries = rng.integers(0, RING_MODULUS, size=161, dtype=np.uint64)
    frame = encode_share_message(
        session_wire_tag("session-1"), participant_wire_tag("org-01"), 1, entries
    )
    message, consumed = decode_share_message(frame)
    assert consumed == len(frame)
    assert message.session_tag == session_wire_tag("session-1")
    assert message.participant_tag == participant_wire_tag("org-01")
    assert message.aggregator_index == 1
    assert np.array_equal(message.entries, entries)


def test_share_message_stream_of_frames():
    rng = np.random.default_rng(9)
    frames = b""
    originals = []
    for i in range(3):
        entries = rng.integers(0, RING_MODULUS, size=5, dtype=np.uint64)
        originals.append(entries)
        frames += encode_share_message(
            session_wire_tag("s"), participant_wire_tag(f"p{i}"), i % 2, entries
        )
    offset = 0
    for i in range(3):
        message, offset = decode_share_message(frames, offset)
        assert np.array_equal(message.entries, originals[i])
    assert offset == len(frames)


def test_share_message_truncation_detected():
    entries = np.arange(4, dtype=np.uint64)
    frame = encode_share_message(
        session_wire_tag("s"), participant_wire_tag("p"), 0, entries
    )
    with pytest.raises(ValueError):
        decode_share_message(frame[:-3])
