"""Bundled demonstration peer group: 25 firms, 4 incidents, $580k of losses.

A deterministic synthetic sector sized like a real mid-size peer group,
used by the tests, the demos, and the README walkthrough. Its aggregate
lands on round figures: overall average maturity exactly 78%, incident
rate 0.064 per firm-year over a 2.5-year window, mean loss $145,000,
and attributed losses of $325k / $90k / $75k / $75k / $15k across five
implicated controls.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .catalog import ControlCatalog, MaturityLevel
from .submission import (
    IncidentRecord,
    ParticipantSubmission,
    submission_to_json,
    with_checksum,
)

__all__ = ["demo_submissions", "write_demo_sector", "DEMO_FIRM_COUNT", "DEMO_WINDOW_YEARS"]

DEMO_FIRM_COUNT = 25
DEMO_WINDOW_YEARS = 2.5

# Shuffle seed for spreading maturity ratings across firms and controls.
_RATING_SHUFFLE_SEED = 78

# (firm index, loss cents, implicated controls); one firm reports twice.
_DEMO_INCIDENTS: tuple[tuple[int, int, tuple[str, ...]], ...] = (
    (3, 15_000_000, ("6b", "6d")),   # $150k split across two backup controls
    (3, 9_000_000, ("5b",)),         # $90k on training
    (11, 32_500_000, ("5a",)),       # $325k on employee skills
    (19, 1_500_000, ("1a",)),        # $15k on MFA
)


def demo_submissions(catalog: ControlCatalog | None = None) -> list[ParticipantSubmission]:
    """The 25 deterministic demo submissions, checksums included."""
    catalog = catalog or ControlCatalog()
    n_controls = catalog.count
    slots = DEMO_FIRM_COUNT * n_controls

    # Ratings: 200 fully, 13 partially, rest largely implemented. Total
    # numerator 200*3 + 13*1 + 337*2 = 1287 = 0.78 * 3 * 550 exactly.
    order = np.random.default_rng(_RATING_SHUFFLE_SEED).permutation(slots)
    levels = np.full(slots, MaturityLevel.LARGELY_IMPLEMENTED.numerator, dtype=np.int64)
    levels[order[:200]] = MaturityLevel.FULLY_IMPLEMENTED.numerator
    levels[order[200:213]] = MaturityLevel.PARTIALLY_IMPLEMENTED.numerator

    incidents_by_firm: dict[int, list[IncidentRecord]] = {}
    for firm, cents, controls in _DEMO_INCIDENTS:
        incidents_by_firm.setdefault(firm, []).append(
            IncidentRecord(loss_cents=cents, implicated_controls=frozenset(controls))
        )

    submissions = []
    for firm in range(DEMO_FIRM_COUNT):
        maturities = {
            code: MaturityLevel(int(levels[firm * n_controls + i]))
            for i, code in enumerate(catalog.codes)
        }
        submissions.append(
            with_checksum(
                ParticipantSubmission(
                    participant_id=f"org-{firm + 1:02d}",
                    maturities=maturities,
                    incidents=tuple(incidents_by_firm.get(firm, ())),
                )
            )
        )
    return submissions


def write_demo_sector(directory: str | Path) -> list[Path]:
    """Write the demo submissions as one JSON file per firm."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for sub in demo_submissions():
        path = directory / f"{sub.participant_id}.json"
        path.write_text(submission_to_json(sub))
        paths.append(path)
    return paths
