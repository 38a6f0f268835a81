"""Security-control catalog, maturity scale, and loss-band schema.

These are the shared vocabulary of a peer group: which controls are
rated, the four-step maturity scale, and the coarse USD bands used to
report losses without disclosing amounts.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum

from .money import format_usd, parse_usd

__all__ = [
    "MaturityLevel",
    "ControlCatalog",
    "LossBandSchema",
    "BelowAllBands",
    "assign_loss_band",
    "DEFAULT_CONTROLS",
]


class MaturityLevel(Enum):
    """Four-step control maturity, mapped to thirds of full adoption."""

    NOT_IMPLEMENTED = 0
    PARTIALLY_IMPLEMENTED = 1
    LARGELY_IMPLEMENTED = 2
    FULLY_IMPLEMENTED = 3

    @property
    def numerator(self) -> int:
        """Position on the 0..3 scale (fraction = numerator / 3)."""
        return self.value

    @property
    def fraction(self) -> float:
        return self.value / 3.0

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, text: str) -> "MaturityLevel":
        """Parse a level name ('fully_implemented', 'Fully implemented')."""
        key = str(text).strip().lower().replace(" ", "_").replace("-", "_")
        for level in cls:
            if level.label == key:
                return level
        raise ValueError(f"unknown maturity level: {text!r}")


# Default 22-control rating sheet shared by the peer group.
DEFAULT_CONTROLS: tuple[tuple[str, str], ...] = (
    ("1a", "Deploy MFA"),
    ("2a", "Deploy EDR"),
    ("2b", "Hunt malicious activity"),
    ("3a", "Encrypt in transit"),
    ("3b", "Encrypt at rest"),
    ("4a", "Remove sharing barriers"),
    ("4b", "Threat intelligence"),
    ("5a", "Eval employee skills"),
    ("5b", "Deliver regular training"),
    ("6a", "Regular backups"),
    ("6b", "Test backups"),
    ("6c", "Protect backups"),
    ("6d", "Store backups offline"),
    ("7a", "Timely updates & patching"),
    ("7b", "Centralized patch system"),
    ("7c", "Risk-based patching"),
    ("8a", "Codify incident response plan"),
    ("8b", "Test incident response plan"),
    ("8c", "Maintain incident response plan"),
    ("9a", "External pen testing"),
    ("9b", "Red team exercises"),
    ("10a", "Network segmentation"),
)


@dataclass(frozen=True)
class ControlCatalog:
    """Ordered list of (control_id, name) pairs rated by every participant."""

    controls: tuple[tuple[str, str], ...] = DEFAULT_CONTROLS
    version: str = "1"

    def __post_init__(self):
        codes = [code for code, _ in self.controls]
        if len(set(codes)) != len(codes):
            raise ValueError("control ids must be unique")
        if not codes:
            raise ValueError("catalog must contain at least one control")

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(code for code, _ in self.controls)

    @property
    def count(self) -> int:
        return len(self.controls)

    def name_of(self, code: str) -> str:
        for c, name in self.controls:
            if c == code:
                return name
        raise KeyError(code)

    def index_of(self, code: str) -> int:
        for i, (c, _) in enumerate(self.controls):
            if c == code:
                return i
        raise KeyError(code)

    def __contains__(self, code: str) -> bool:
        return any(c == code for c, _ in self.controls)

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "controls": [{"id": c, "name": n} for c, n in self.controls],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ControlCatalog":
        doc = json.loads(text)
        controls = tuple((e["id"], e["name"]) for e in doc["controls"])
        return cls(controls=controls, version=str(doc.get("version", "1")))


class BelowAllBands(ValueError):
    """A loss total falls below the lowest reporting band."""


@dataclass(frozen=True)
class LossBandSchema:
    """Ascending half-open USD bands [edge_i, edge_{i+1}); last band open-ended.

    Bands are stored as lower edges in cents, which makes them contiguous
    and non-overlapping by construction.
    """

    lower_edges_cents: tuple[int, ...] = (
        100_000,       # $1k
        500_000,       # $5k
        5_000_000,     # $50k
        50_000_000,    # $500k
        500_000_000,   # $5m
    )
    version: str = "1"

    def __post_init__(self):
        edges = self.lower_edges_cents
        if not edges:
            raise ValueError("need at least one band")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("band edges must be strictly ascending")
        if edges[0] < 0:
            raise ValueError("band edges must be non-negative")

    @property
    def count(self) -> int:
        return len(self.lower_edges_cents)

    def band_index(self, total_cents: int) -> int:
        """Index of the half-open band containing the value."""
        if total_cents < self.lower_edges_cents[0]:
            raise BelowAllBands(
                f"{format_usd(total_cents)} is below the lowest band edge "
                f"{format_usd(self.lower_edges_cents[0])}"
            )
        return bisect_right(self.lower_edges_cents, total_cents) - 1

    def describe(self, index: int) -> str:
        lo = format_usd(self.lower_edges_cents[index])
        if index + 1 < self.count:
            hi = format_usd(self.lower_edges_cents[index + 1])
            return f"[{lo}, {hi})"
        return f"[{lo}, inf)"

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "lower_edges_usd": [format_usd(e) for e in self.lower_edges_cents],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LossBandSchema":
        doc = json.loads(text)
        edges = tuple(parse_usd(e) for e in doc["lower_edges_usd"])
        return cls(lower_edges_cents=edges, version=str(doc.get("version", "1")))


def assign_loss_band(total_cents: int, schema: LossBandSchema) -> int:
    """Band index for a loss total; raises BelowAllBands under the schema floor."""
    return schema.band_index(total_cents)
