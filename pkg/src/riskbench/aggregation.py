"""Desk-scale secure summation over submission vectors.

The peer group's only readable output is the entrywise sum of everyone's
encoded vectors. That contract is simulated here with additive secret
sharing over the 2^64 integer ring:

  * each participant splits its vector into t shares that sum (mod 2^64)
    back to the plaintext; the first t-1 shares are uniform random masks
    and the last is the residual,
  * each of t aggregators only ever sees one share per participant and
    keeps a running entrywise sum,
  * after the session is sealed, the aggregator sums are combined; the
    masks cancel and the result equals the plaintext column sums exactly.

Any t-1 shares of a single submission are jointly uniform on the ring,
so no strict subset of aggregators learns anything about an individual
input. There is no cryptography here, only the sum semantics; key
ceremonies and malicious-party robustness are out of scope.

A session object stands in for the aggregator nodes. It retains only the
per-aggregator running sums, never an individual share or submission,
and share messages round-trip a wire-ready binary frame (see
``encode_share_message``).
"""

from __future__ import annotations

import hashlib
import struct
import threading
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .catalog import ControlCatalog, LossBandSchema
from .money import format_usd
from .submission import EncodingParams, VectorLayout, read_vector_fields

__all__ = [
    "RING_MODULUS",
    "ShareVector",
    "ShareMessage",
    "AggregationError",
    "DuplicateContribution",
    "SessionSealed",
    "SessionNotSealed",
    "LengthMismatch",
    "IncompleteSession",
    "UnknownParticipant",
    "SessionState",
    "AggregationSession",
    "AggregateReport",
    "share_vector",
    "aggregate_shares",
    "decode_aggregate",
    "post_process",
    "encode_share_message",
    "decode_share_message",
    "session_wire_tag",
    "participant_wire_tag",
    "report_to_json",
    "report_from_json",
]

RING_MODULUS = 2 ** 64


class AggregationError(Exception):
    pass


class DuplicateContribution(AggregationError):
    pass


class SessionSealed(AggregationError):
    pass


class SessionNotSealed(AggregationError):
    pass


class LengthMismatch(AggregationError):
    pass


class IncompleteSession(AggregationError):
    pass


class UnknownParticipant(AggregationError):
    pass


@dataclass(frozen=True)
class ShareVector:
    """One participant's share destined for one aggregator."""

    participant_id: str
    aggregator_index: int
    entries: np.ndarray  # uint64, read-only

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.uint64)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)


def share_vector(
    plaintext: Sequence[int],
    aggregator_count: int,
    rng: np.random.Generator,
    participant_id: str = "",
) -> list[ShareVector]:
    """Split a plaintext vector into t additive shares over the 2^64 ring.

    Shares 0..t-2 are drawn uniformly from the ring; share t-1 is the
    residual, so the entrywise modular sum of all t shares equals the
    plaintext exactly.
    """
    if aggregator_count < 2:
        raise ValueError("need at least 2 aggregators")
    try:
        arr = np.array(list(plaintext), dtype=np.uint64)
    except OverflowError as exc:
        raise ValueError(f"plaintext entries must lie in [0, 2^64): {exc}") from exc
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("plaintext must be a non-empty 1-d vector")

    masks = rng.integers(0, RING_MODULUS, size=(aggregator_count - 1, arr.size),
                         dtype=np.uint64)
    residual = arr.copy()
    for row in masks:
        residual = residual - row  # wraps mod 2^64
    shares = [
        ShareVector(participant_id, i, masks[i]) for i in range(aggregator_count - 1)
    ]
    shares.append(ShareVector(participant_id, aggregator_count - 1, residual))
    return shares


class SessionState(Enum):
    OPEN = "open"
    SEALED = "sealed"
    DECODED = "decoded"


class AggregationSession:
    """Collects shares from enrolled participants and decodes the group sum.

    Contribution application is serialized per aggregator index, so
    concurrent callers may submit shares freely; decoding is exclusive
    and transitions the session state once. The session never stores an
    individual share: each one is folded into the destination
    aggregator's running sum on arrival.
    """

    def __init__(
        self,
        session_id: str,
        params: EncodingParams,
        participants: Iterable[str],
        *,
        min_participants: int = 3,
    ):
        self.session_id = session_id
        self.params = params
        self._expected = frozenset(participants)
        if not self._expected:
            raise ValueError("session needs at least one enrolled participant")
        if len(self._expected) < min_participants:
            raise ValueError(
                f"{len(self._expected)} participants enrolled, "
                f"release threshold is {min_participants}"
            )
        self.state = SessionState.OPEN
        self._sums = np.zeros(
            (params.aggregator_count, params.vector_length), dtype=np.uint64
        )
        self._seen: set[tuple[str, int]] = set()
        self._agg_locks = [threading.Lock() for _ in range(params.aggregator_count)]
        self._state_lock = threading.Lock()
        self._decoded: list[int] | None = None

    @property
    def participant_count(self) -> int:
        return len(self._expected)

    @property
    def participants(self) -> frozenset[str]:
        return self._expected

    def aggregate_shares(self, share: ShareVector) -> None:
        """Fold one incoming share into its aggregator's running sum."""
        if self.state is not SessionState.OPEN:
            raise SessionSealed(f"session {self.session_id} no longer accepts shares")
        if share.participant_id not in self._expected:
            raise UnknownParticipant(
                f"participant is not enrolled in session {self.session_id}"
            )
        idx = share.aggregator_index
        if not 0 <= idx < self.params.aggregator_count:
            raise ValueError(f"no aggregator {idx} in this session")
        if share.entries.shape != (self.params.vector_length,):
            raise LengthMismatch(
                f"share has length {share.entries.size}, "
                f"session expects {self.params.vector_length}"
            )
        key = (share.participant_id, idx)
        with self._agg_locks[idx]:
            if key in self._seen:
                raise DuplicateContribution(
                    f"participant already contributed to aggregator {idx}"
                )
            self._seen.add(key)
            self._sums[idx] = self._sums[idx] + share.entries  # wraps mod 2^64

    def seal(self) -> None:
        """Stop accepting contributions; decoding becomes possible."""
        with self._state_lock:
            if self.state is SessionState.OPEN:
                self.state = SessionState.SEALED

    def decode_aggregate(self) -> list[int]:
        """Combine the aggregator sums into the plaintext column sums.

        Requires a sealed session with a full contribution matrix. The
        result is independent of arrival order.
        """
        with self._state_lock:
            if self.state is SessionState.OPEN:
                raise SessionNotSealed("seal the session before decoding")
            if self.state is SessionState.DECODED:
                return list(self._decoded)  # type: ignore[arg-type]
            expected = self.participant_count * self.params.aggregator_count
            if len(self._seen) != expected:
                missing = expected - len(self._seen)
                raise IncompleteSession(
                    f"{missing} of {expected} contributions missing"
                )
            if self.participant_count == 1:
                warnings.warn(
                    "single-participant session: the decoded aggregate equals "
                    "that participant's plaintext, so it provides no privacy",
                    RuntimeWarning,
                    stacklevel=2,
                )
            total = self._sums[0].copy()
            for row in self._sums[1:]:
                total = total + row  # wraps mod 2^64
            self._decoded = [int(v) for v in total]
            self.state = SessionState.DECODED
            return list(self._decoded)


def aggregate_shares(session: AggregationSession, share: ShareVector) -> AggregationSession:
    """Module-level alias for ``AggregationSession.aggregate_shares``."""
    session.aggregate_shares(share)
    return session


def decode_aggregate(session: AggregationSession) -> list[int]:
    """Module-level alias for ``AggregationSession.decode_aggregate``."""
    return session.decode_aggregate()


# ---------------------------------------------------------------------------
# Post-processing into the peer-group report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AggregateReport:
    """The decoded peer-group sums, with averages computed in post-processing.

    This is the only artifact of a session that leaves the aggregation
    boundary.
    """

    participant_count: int
    avg_maturity: dict[str, float]
    overall_avg_maturity: float
    maturity_flag_counts: dict[str, tuple[int, int, int, int]]
    incident_count: int
    control_failure_counts: dict[str, int]
    total_loss_cents: int
    per_control_loss_cents: dict[str, int]
    band_counts: tuple[int, ...]
    session_id: str = ""

    def __post_init__(self):
        n = self.participant_count
        for code, flags in self.maturity_flag_counts.items():
            if sum(flags) != n:
                raise AggregationError(
                    f"flag counts for control {code} sum to {sum(flags)}, expected {n}"
                )
        attributed = sum(self.per_control_loss_cents.values())
        if attributed != self.total_loss_cents:
            raise AggregationError(
                f"per-control losses sum to {format_usd(attributed)}, total is "
                f"{format_usd(self.total_loss_cents)}"
            )
        if sum(self.band_counts) > n:
            raise AggregationError("band counts exceed participant count")


def post_process(
    raw_sums: Sequence[int],
    participant_count: int,
    catalog: ControlCatalog | None = None,
    bands: LossBandSchema | None = None,
    *,
    session_id: str = "",
) -> AggregateReport:
    """Turn a decoded sum vector into per-control averages and counts.

    The overall average maturity is the mean over all participant-control
    ratings, which (with complete submissions) equals the mean of the
    per-control averages.
    """
    if participant_count < 1:
        raise ValueError("participant_count must be >= 1")
    layout = VectorLayout(catalog or ControlCatalog(), bands or LossBandSchema())
    fields = read_vector_fields(raw_sums, layout)
    codes = layout.catalog.codes
    denom = 3.0 * participant_count
    avg = {code: fields.maturity_numerators[i] / denom for i, code in enumerate(codes)}
    overall = sum(fields.maturity_numerators) / (denom * layout.n_controls)
    return AggregateReport(
        participant_count=participant_count,
        avg_maturity=avg,
        overall_avg_maturity=overall,
        maturity_flag_counts={
            code: fields.maturity_flag_counts[i] for i, code in enumerate(codes)
        },
        incident_count=fields.incident_count,
        control_failure_counts={
            code: fields.control_failure_counts[i] for i, code in enumerate(codes)
        },
        total_loss_cents=fields.total_loss_cents,
        per_control_loss_cents={
            code: fields.per_control_loss_cents[i] for i, code in enumerate(codes)
        },
        band_counts=fields.band_counts,
        session_id=session_id,
    )


# ---------------------------------------------------------------------------
# Wire format for share messages
# ---------------------------------------------------------------------------
#
# Frame: u32 payload length (big-endian), then
#   session tag     16 bytes
#   participant tag  8 bytes
#   aggregator index u8
#   vector length    u32 big-endian
#   entries          vector length x u64 little-endian

_HEADER = struct.Struct(">16s8sBI")


@dataclass(frozen=True)
class ShareMessage:
    session_tag: bytes
    participant_tag: bytes
    aggregator_index: int
    entries: np.ndarray


def session_wire_tag(session_id: str) -> bytes:
    return hashlib.sha256(session_id.encode("utf-8")).digest()[:16]


def participant_wire_tag(participant_id: str) -> bytes:
    return hashlib.sha256(participant_id.encode("utf-8")).digest()[:8]


def encode_share_message(
    session_tag: bytes,
    participant_tag: bytes,
    aggregator_index: int,
    entries: np.ndarray,
) -> bytes:
    if len(session_tag) != 16 or len(participant_tag) != 8:
        raise ValueError("session tag must be 16 bytes, participant tag 8 bytes")
    arr = np.asarray(entries, dtype=np.uint64)
    payload = _HEADER.pack(
        session_tag, participant_tag, aggregator_index, arr.size
    ) + arr.astype("<u8").tobytes()
    return struct.pack(">I", len(payload)) + payload


def decode_share_message(data: bytes, offset: int = 0) -> tuple[ShareMessage, int]:
    """Decode one frame; returns the message and the offset past it."""
    (length,) = struct.unpack_from(">I", data, offset)
    start = offset + 4
    if start + length > len(data):
        raise ValueError("truncated share message")
    session_tag, participant_tag, idx, n = _HEADER.unpack_from(data, start)
    body_start = start + _HEADER.size
    expected = n * 8
    if body_start + expected != start + length:
        raise ValueError("share message length does not match vector length")
    entries = np.frombuffer(data, dtype="<u8", count=n, offset=body_start).astype(np.uint64)
    entries.flags.writeable = False
    return (
        ShareMessage(session_tag, participant_tag, idx, entries),
        start + length,
    )


# ---------------------------------------------------------------------------
# Report JSON (dollars as decimal strings, fractions as doubles)
# ---------------------------------------------------------------------------

def report_to_json(report: AggregateReport, catalog: ControlCatalog | None = None) -> str:
    import json

    codes = list((catalog or ControlCatalog()).codes)
    doc = {
        "version": "1",
        "session_id": report.session_id,
        "participant_count": report.participant_count,
        "control_codes": codes,
        "avg_maturity": {c: report.avg_maturity[c] for c in codes},
        "overall_avg_maturity": report.overall_avg_maturity,
        "maturity_flag_counts": {
            c: list(report.maturity_flag_counts[c]) for c in codes
        },
        "incident_count": report.incident_count,
        "control_failure_counts": {
            c: report.control_failure_counts[c] for c in codes
        },
        "total_loss_usd": format_usd(report.total_loss_cents),
        "per_control_loss_usd": {
            c: format_usd(report.per_control_loss_cents[c]) for c in codes
        },
        "band_counts": list(report.band_counts),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> AggregateReport:
    import json

    from .money import parse_usd

    doc = json.loads(text)
    return AggregateReport(
        participant_count=int(doc["participant_count"]),
        avg_maturity={c: float(v) for c, v in doc["avg_maturity"].items()},
        overall_avg_maturity=float(doc["overall_avg_maturity"]),
        maturity_flag_counts={
            c: tuple(int(x) for x in v)
            for c, v in doc["maturity_flag_counts"].items()
        },
        incident_count=int(doc["incident_count"]),
        control_failure_counts={
            c: int(v) for c, v in doc["control_failure_counts"].items()
        },
        total_loss_cents=parse_usd(doc["total_loss_usd"]),
        per_control_loss_cents={
            c: parse_usd(v) for c, v in doc["per_control_loss_usd"].items()
        },
        band_counts=tuple(int(x) for x in doc["band_counts"]),
        session_id=str(doc.get("session_id", "")),
    )
