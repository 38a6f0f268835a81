"""One firm's private submission: validation, checksum, and vector encoding.

A submission carries the firm's 22 maturity ratings plus its incident
records. Before entering the peer aggregation it is flattened into a
fixed-layout integer vector so that only sums, counts, and coarse band
flags survive; individual incident identities do not.

Vector layout (for a catalog of C controls and B loss bands):

    [0, C)            maturity numerators on the 0..3 scale, catalog order
    [C, 5C)           4 one-hot maturity flags per control, control-major
    [5C]              incident count
    [5C+1, 6C+1)      per-control failure counts
    [6C+1]            total loss in cents
    [6C+2, 7C+2)      per-control attributed loss in cents
    [7C+2, 7C+2+B)    loss-band flags

With the default 22 controls and 5 bands the length is 161.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .catalog import ControlCatalog, LossBandSchema, MaturityLevel
from .money import format_usd, parse_usd

__all__ = [
    "IncidentRecord",
    "ParticipantSubmission",
    "Violation",
    "ValidationResult",
    "InvalidSubmission",
    "EncodingParams",
    "VectorLayout",
    "DecodedVectorFields",
    "DEFAULT_LOSS_THRESHOLD_CENTS",
    "DEFAULT_PERIOD",
    "compute_checksum",
    "canonical_bytes",
    "with_checksum",
    "validate_submission",
    "split_incident_loss",
    "encode_submission_vector",
    "read_vector_fields",
    "submission_to_json",
    "submission_from_json",
]

# Incidents below this threshold are not reportable.
DEFAULT_LOSS_THRESHOLD_CENTS = 500_000  # $5,000

DEFAULT_PERIOD = "2021-01/2023-06"

MAX_IMPLICATED_CONTROLS = 5


@dataclass(frozen=True)
class IncidentRecord:
    """A single loss event and the 1-5 controls the firm blames for it."""

    loss_cents: int
    implicated_controls: frozenset[str]
    period: str = DEFAULT_PERIOD

    def __post_init__(self):
        object.__setattr__(
            self, "implicated_controls", frozenset(self.implicated_controls)
        )


@dataclass(frozen=True)
class ParticipantSubmission:
    """A firm's complete private input to one aggregation session."""

    participant_id: str
    maturities: Mapping[str, MaturityLevel]
    incidents: tuple[IncidentRecord, ...] = ()
    checksum: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "maturities", dict(self.maturities))
        object.__setattr__(self, "incidents", tuple(self.incidents))

    @property
    def total_loss_cents(self) -> int:
        return sum(inc.loss_cents for inc in self.incidents)


# ---------------------------------------------------------------------------
# Checksum over the canonical serialization
# ---------------------------------------------------------------------------

def canonical_payload(sub: ParticipantSubmission) -> dict:
    """Checksum payload: everything except the checksum itself.

    Canonical form: keys sorted, implicated lists sorted, losses in
    integer cents, maturity levels as snake_case labels.
    """
    return {
        "incidents": [
            {
                "implicated": sorted(inc.implicated_controls),
                "loss_cents": inc.loss_cents,
                "period": inc.period,
            }
            for inc in sub.incidents
        ],
        "maturities": {
            code: level.label for code, level in sorted(sub.maturities.items())
        },
        "participant_id": sub.participant_id,
    }


def canonical_bytes(sub: ParticipantSubmission) -> bytes:
    """Canonical UTF-8 byte stream: sorted keys, no insignificant whitespace."""
    return json.dumps(
        canonical_payload(sub), sort_keys=True, separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")


def compute_checksum(data: bytes) -> int:
    """CRC-32 of a byte stream (0x00000000 for empty input)."""
    return zlib.crc32(data) & 0xFFFFFFFF


def with_checksum(sub: ParticipantSubmission) -> ParticipantSubmission:
    """Return a copy whose checksum matches its canonical serialization."""
    return replace(sub, checksum=compute_checksum(canonical_bytes(sub)))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


class InvalidSubmission(ValueError):
    """Raised when an operation requires a valid submission."""

    def __init__(self, violations: Iterable[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def validate_submission(
    sub: ParticipantSubmission,
    catalog: ControlCatalog,
    *,
    loss_threshold_cents: int = DEFAULT_LOSS_THRESHOLD_CENTS,
) -> ValidationResult:
    """Check a submission against the catalog, incident rules, and checksum."""
    violations: list[Violation] = []

    for code in catalog.codes:
        if code not in sub.maturities:
            violations.append(
                Violation("MissingControl", f"no maturity rating for control {code}")
            )
    for code in sub.maturities:
        if code not in catalog:
            violations.append(
                Violation("UnknownControl", f"maturity rating for unknown control {code}")
            )

    for i, inc in enumerate(sub.incidents):
        n_impl = len(inc.implicated_controls)
        if n_impl == 0:
            violations.append(
                Violation("EmptyImplicatedControls", f"incident {i} implicates no controls")
            )
        elif n_impl > MAX_IMPLICATED_CONTROLS:
            violations.append(
                Violation(
                    "TooManyImplicatedControls",
                    f"incident {i} implicates {n_impl} controls "
                    f"(limit {MAX_IMPLICATED_CONTROLS})",
                )
            )
        for code in sorted(inc.implicated_controls):
            if code not in catalog:
                violations.append(
                    Violation("UnknownControl", f"incident {i} implicates unknown control {code}")
                )
        if inc.loss_cents <= loss_threshold_cents:
            violations.append(
                Violation(
                    "LossBelowThreshold",
                    f"incident {i} loss {format_usd(inc.loss_cents)} is not above "
                    f"the {format_usd(loss_threshold_cents)} reporting threshold",
                )
            )

    expected = compute_checksum(canonical_bytes(sub))
    if sub.checksum is None:
        violations.append(Violation("ChecksumMismatch", "submission carries no checksum"))
    elif sub.checksum != expected:
        violations.append(
            Violation(
                "ChecksumMismatch",
                f"checksum {sub.checksum:08x} does not match canonical "
                f"serialization ({expected:08x})",
            )
        )

    return ValidationResult(ok=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# Loss attribution
# ---------------------------------------------------------------------------

def split_incident_loss(inc: IncidentRecord) -> dict[str, int]:
    """Divide an incident's loss evenly across its implicated controls.

    Each control receives floor(loss / count) cents; the remainder goes
    to the lexicographically first control id so the total is preserved
    exactly.
    """
    controls = sorted(inc.implicated_controls)
    if not controls:
        raise ValueError("incident implicates no controls")
    base, remainder = divmod(inc.loss_cents, len(controls))
    shares = {code: base for code in controls}
    shares[controls[0]] += remainder
    return shares


# ---------------------------------------------------------------------------
# Vector layout and encoding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorLayout:
    """Slot offsets of the submission vector for a catalog/band schema pair."""

    catalog: ControlCatalog = field(default_factory=ControlCatalog)
    bands: LossBandSchema = field(default_factory=LossBandSchema)

    @property
    def n_controls(self) -> int:
        return self.catalog.count

    @property
    def maturity_start(self) -> int:
        return 0

    @property
    def flags_start(self) -> int:
        return self.n_controls

    @property
    def incident_count_index(self) -> int:
        return self.n_controls * 5

    @property
    def failure_start(self) -> int:
        return self.incident_count_index + 1

    @property
    def total_loss_index(self) -> int:
        return self.failure_start + self.n_controls

    @property
    def loss_start(self) -> int:
        return self.total_loss_index + 1

    @property
    def band_start(self) -> int:
        return self.loss_start + self.n_controls

    @property
    def length(self) -> int:
        return self.band_start + self.bands.count


@dataclass(frozen=True)
class EncodingParams:
    """Ring and shape parameters shared by every party in a session."""

    vector_length: int
    aggregator_count: int = 2
    modulus: int = 2 ** 64

    def __post_init__(self):
        if self.vector_length < 1:
            raise ValueError("vector_length must be positive")
        if self.aggregator_count < 2:
            raise ValueError("need at least 2 aggregators")
        if self.modulus != 2 ** 64:
            raise ValueError("only the 2^64 ring is supported")

    @classmethod
    def for_layout(cls, layout: VectorLayout, aggregator_count: int = 2) -> "EncodingParams":
        return cls(vector_length=layout.length, aggregator_count=aggregator_count)


def encode_submission_vector(
    sub: ParticipantSubmission,
    catalog: ControlCatalog,
    schema: LossBandSchema,
    *,
    band_mode: str = "per_firm",
    encoding: EncodingParams | None = None,
    loss_threshold_cents: int = DEFAULT_LOSS_THRESHOLD_CENTS,
    validate: bool = True,
) -> list[int]:
    """Flatten a submission into its fixed-layout integer vector.

    band_mode "per_firm" sets one flag for the band containing the firm's
    total reported losses (none if there are no incidents); "per_incident"
    counts incidents per band instead.
    """
    if validate:
        result = validate_submission(sub, catalog, loss_threshold_cents=loss_threshold_cents)
        if not result.ok:
            raise InvalidSubmission(result.violations)
    if band_mode not in ("per_firm", "per_incident"):
        raise ValueError(f"unknown band_mode: {band_mode!r}")

    layout = VectorLayout(catalog, schema)
    vec = [0] * layout.length

    for i, code in enumerate(catalog.codes):
        level = sub.maturities[code]
        vec[layout.maturity_start + i] = level.numerator
        vec[layout.flags_start + 4 * i + level.numerator] = 1

    vec[layout.incident_count_index] = len(sub.incidents)
    for inc in sub.incidents:
        for code, cents in split_incident_loss(inc).items():
            idx = catalog.index_of(code)
            vec[layout.failure_start + idx] += 1
            vec[layout.loss_start + idx] += cents
        vec[layout.total_loss_index] += inc.loss_cents
        if band_mode == "per_incident":
            vec[layout.band_start + schema.band_index(inc.loss_cents)] += 1

    if band_mode == "per_firm" and sub.incidents:
        vec[layout.band_start + schema.band_index(sub.total_loss_cents)] = 1

    if encoding is not None and encoding.vector_length != layout.length:
        raise ValueError(
            f"layout length {layout.length} does not match encoding "
            f"vector_length {encoding.vector_length}"
        )
    return vec


@dataclass(frozen=True)
class DecodedVectorFields:
    """Field-wise view of a submission vector (or of a sum of them)."""

    maturity_numerators: tuple[int, ...]
    maturity_flag_counts: tuple[tuple[int, int, int, int], ...]
    incident_count: int
    control_failure_counts: tuple[int, ...]
    total_loss_cents: int
    per_control_loss_cents: tuple[int, ...]
    band_counts: tuple[int, ...]


def read_vector_fields(vector, layout: VectorLayout) -> DecodedVectorFields:
    """Slice a vector (single submission or decoded sum) into named fields."""
    vec = [int(v) for v in vector]
    if len(vec) != layout.length:
        raise ValueError(f"expected length {layout.length}, got {len(vec)}")
    n = layout.n_controls
    flags = tuple(
        tuple(vec[layout.flags_start + 4 * i: layout.flags_start + 4 * i + 4])
        for i in range(n)
    )
    return DecodedVectorFields(
        maturity_numerators=tuple(vec[layout.maturity_start: layout.maturity_start + n]),
        maturity_flag_counts=flags,
        incident_count=vec[layout.incident_count_index],
        control_failure_counts=tuple(vec[layout.failure_start: layout.failure_start + n]),
        total_loss_cents=vec[layout.total_loss_index],
        per_control_loss_cents=tuple(vec[layout.loss_start: layout.loss_start + n]),
        band_counts=tuple(vec[layout.band_start: layout.band_start + layout.bands.count]),
    )


# ---------------------------------------------------------------------------
# JSON file format
# ---------------------------------------------------------------------------

def submission_to_json(sub: ParticipantSubmission) -> str:
    """Serialize to the submission file format (losses as decimal USD strings)."""
    doc = {
        "participant_id": sub.participant_id,
        "maturities": {
            code: level.label for code, level in sorted(sub.maturities.items())
        },
        "incidents": [
            {
                "loss_usd": format_usd(inc.loss_cents),
                "implicated": sorted(inc.implicated_controls),
                "period": inc.period,
            }
            for inc in sub.incidents
        ],
        "checksum": f"{sub.checksum:08x}" if sub.checksum is not None else None,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def submission_from_json(text: str) -> ParticipantSubmission:
    """Parse a submission file. Schema errors raise ValueError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"submission is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("submission must be a JSON object")
    try:
        maturities = {
            str(code): MaturityLevel.from_label(level)
            for code, level in dict(doc["maturities"]).items()
        }
        incidents = tuple(
            IncidentRecord(
                loss_cents=parse_usd(entry["loss_usd"]),
                implicated_controls=frozenset(str(c) for c in entry["implicated"]),
                period=str(entry.get("period", DEFAULT_PERIOD)),
            )
            for entry in doc.get("incidents", [])
        )
        checksum_text = doc.get("checksum")
        checksum = int(str(checksum_text), 16) if checksum_text is not None else None
        return ParticipantSubmission(
            participant_id=str(doc["participant_id"]),
            maturities=maturities,
            incidents=incidents,
            checksum=checksum,
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed submission document: {exc!r}") from exc
