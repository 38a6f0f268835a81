"""Loss-weighted control weights and the exponential defense-gap curve.

Pipeline, starting from a decoded peer-group report:

  1. split the total weight between controls with attributed losses and
     the rest (``allocate_group_split``),
  2. prorate the loss-group weight by attributed loss magnitude and
     spread the remainder evenly (``prorate_weights``),
  3. score a firm's posture as a weighted own-vs-group maturity ratio,
     expressed as a signed deviation that is 0 at the peer average
     (``net_weighted_deviation``),
  4. fit an exponential curve through configured (deviation, loss)
     anchor points, grounded at the group-average loss
     (``fit_gap_curve``), whose value ``gap_multiplier`` scales the peer
     baseline risk up or down for an individual firm.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .aggregation import AggregateReport
from .catalog import ControlCatalog, MaturityLevel
from .money import div_round_half_even, format_usd, parse_usd

__all__ = [
    "GroupWeightSplit",
    "WeightAllocation",
    "AnchorPoint",
    "GapIndexModel",
    "ConstraintUnsatisfiable",
    "DegenerateAnchors",
    "allocate_group_split",
    "prorate_weights",
    "net_weighted_deviation",
    "fit_gap_curve",
    "gap_multiplier",
    "build_model",
    "model_to_json",
    "model_from_json",
    "DEFAULT_GROUP_SPLIT",
    "DEFAULT_DEVIATION_BOUNDS",
    "DEFAULT_RATIO_CAP",
]

DEFAULT_GROUP_SPLIT = 0.75
DEFAULT_DEVIATION_BOUNDS = (-0.30, 0.30)
DEFAULT_RATIO_CAP = 4.0

SPLIT_STEP = 0.05
SPLIT_CEILING = 0.95

WEIGHT_SUM_TOLERANCE = 1e-9


class ConstraintUnsatisfiable(ValueError):
    """No admissible split keeps every implicated weight above the rest."""


class DegenerateAnchors(ValueError):
    """Anchor points do not span distinct deviations."""


@dataclass(frozen=True)
class GroupWeightSplit:
    """Fraction of total weight assigned to controls with attributed losses."""

    loss_group_weight: float
    equal_weighting: bool = False

    def __post_init__(self):
        if self.equal_weighting:
            return
        if not 0.0 < self.loss_group_weight < 1.0:
            raise ValueError("loss_group_weight must lie strictly between 0 and 1")

    @property
    def no_loss_group_weight(self) -> float:
        return 0.0 if self.equal_weighting else 1.0 - self.loss_group_weight

    @classmethod
    def equal(cls) -> "GroupWeightSplit":
        """Degenerate split: every control weighted equally (no loss data)."""
        return cls(loss_group_weight=0.0, equal_weighting=True)


@dataclass(frozen=True)
class WeightAllocation:
    """Per-control weights; sums to 1 and every weight is positive."""

    weights: dict[str, float]
    implicated: frozenset[str]

    def __post_init__(self):
        total = sum(self.weights.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"weights sum to {total}, expected 1")
        if any(w <= 0.0 for w in self.weights.values()):
            raise ValueError("every control weight must be positive")
        object.__setattr__(self, "implicated", frozenset(self.implicated))

    def ordering_ok(self) -> bool:
        """True when the smallest implicated weight exceeds every other weight."""
        impl = [w for c, w in self.weights.items() if c in self.implicated]
        rest = [w for c, w in self.weights.items() if c not in self.implicated]
        if not impl or not rest:
            return True
        return min(impl) > max(rest)


def _split_satisfies(
    loss_group_weight: float, min_loss: int, total_loss: int, non_implicated: int
) -> bool:
    smallest_implicated = loss_group_weight * (min_loss / total_loss)
    largest_other = (1.0 - loss_group_weight) / non_implicated
    return smallest_implicated > largest_other


def allocate_group_split(
    report: AggregateReport,
    requested: float = DEFAULT_GROUP_SPLIT,
    *,
    step: float = SPLIT_STEP,
    ceiling: float = SPLIT_CEILING,
) -> GroupWeightSplit:
    """Choose the loss-group/no-loss-group weight split for a report.

    Accepts the requested split when the resulting prorated weights keep
    the smallest implicated weight above every non-implicated weight.
    Otherwise the split is adjusted in 0.05 steps until the ordering
    holds; more weight on the loss group is the only direction that can
    repair it, so the adjustment walks upward, capped at ``ceiling``.
    With no implicated controls at all, falls back to equal weighting.
    """
    losses = {c: v for c, v in report.per_control_loss_cents.items() if v > 0}
    if not losses:
        return GroupWeightSplit.equal()
    if not 0.0 < requested < 1.0:
        raise ValueError("requested split must lie strictly between 0 and 1")

    non_implicated = len(report.per_control_loss_cents) - len(losses)
    if non_implicated == 0:
        return GroupWeightSplit(requested)

    total = sum(losses.values())
    min_loss = min(losses.values())
    candidate = requested
    while candidate <= ceiling + 1e-12:
        if _split_satisfies(candidate, min_loss, total, non_implicated):
            return GroupWeightSplit(round(candidate, 10))
        candidate = round(candidate + step, 10)
    raise ConstraintUnsatisfiable(
        f"no split in [{requested}, {ceiling}] keeps the smallest implicated "
        f"weight ({format_usd(min_loss)} of {format_usd(total)}) above the "
        f"{non_implicated} equal non-implicated weights"
    )


def prorate_weights(
    split: GroupWeightSplit,
    per_control_losses: Mapping[str, int],
    catalog: ControlCatalog,
) -> WeightAllocation:
    """Spread the split across individual controls.

    Implicated controls share the loss-group weight in proportion to
    their attributed losses; the rest divide the remainder equally.
    """
    unknown = [c for c in per_control_losses if c not in catalog]
    if unknown:
        raise KeyError(f"losses attributed to unknown controls: {unknown}")
    losses = {c: int(per_control_losses.get(c, 0)) for c in catalog.codes}
    if any(v < 0 for v in losses.values()):
        raise ValueError("per-control losses must be non-negative")
    implicated = frozenset(c for c, v in losses.items() if v > 0)

    n = catalog.count
    if split.equal_weighting or not implicated:
        weights = {c: 1.0 / n for c in catalog.codes}
        return WeightAllocation(weights=weights, implicated=implicated)

    total = sum(losses.values())
    others = [c for c in catalog.codes if c not in implicated]
    weights: dict[str, float] = {}
    for code in catalog.codes:
        if code in implicated:
            share = split.loss_group_weight if others else 1.0
            weights[code] = share * losses[code] / total
        else:
            weights[code] = split.no_loss_group_weight / len(others)
    return WeightAllocation(weights=weights, implicated=implicated)


@dataclass(frozen=True)
class AnchorPoint:
    """An assumed (posture deviation, incident loss) observation."""

    deviation: float
    loss_cents: int

    def __post_init__(self):
        if self.loss_cents <= 0:
            raise ValueError("anchor loss must be positive")


@dataclass(frozen=True)
class GapIndexModel:
    """Everything a firm needs to score itself against the peer group offline.

    ``exponent`` is the fitted slope of log loss against posture
    deviation; the multiplier exp(exponent * deviation) equals 1 at the
    peer average by construction.
    """

    catalog: ControlCatalog
    group_avg_maturity: dict[str, float]
    weights: WeightAllocation
    exponent: float
    deviation_bounds: tuple[float, float] = DEFAULT_DEVIATION_BOUNDS
    ratio_cap: float = DEFAULT_RATIO_CAP
    anchors: tuple[AnchorPoint, ...] = ()
    no_loss_baseline: bool = False
    maturity_distribution: dict[str, tuple[int, int, int, int]] | None = None
    participant_count: int | None = None
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.exponent):
            raise ValueError("exponent must be finite")
        lo, hi = self.deviation_bounds
        if not lo < hi:
            raise ValueError("deviation bounds must satisfy lo < hi")
        if self.ratio_cap <= 0:
            raise ValueError("ratio_cap must be positive")
        missing = [c for c in self.catalog.codes if c not in self.group_avg_maturity]
        if missing:
            raise ValueError(f"group averages missing for controls: {missing}")


def _as_fraction(value) -> float:
    if isinstance(value, MaturityLevel):
        return value.fraction
    f = float(value)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"maturity fraction must lie in [0, 1], got {f}")
    return f


def net_weighted_deviation(
    own_maturities: Mapping[str, "MaturityLevel | float"],
    model: GapIndexModel,
) -> float:
    """Signed posture deviation from the weighted peer average.

    Per control the own/group maturity ratio is capped at
    ``model.ratio_cap``; 0/0 counts as exactly average and a positive
    rating against a zero group average counts as the cap. The weighted
    ratio sum minus 1 is returned, so 0 means at the peer average and
    -0.25 reads as 25% below it.
    """
    missing = [c for c in model.catalog.codes if c not in own_maturities]
    if missing:
        raise ValueError(f"own maturities missing for controls: {missing}")
    weighted_ratio = 0.0
    for code in model.catalog.codes:
        own = _as_fraction(own_maturities[code])
        group = model.group_avg_maturity[code]
        if group == 0.0:
            ratio = 1.0 if own == 0.0 else model.ratio_cap
        else:
            ratio = min(max(own / group, 0.0), model.ratio_cap)
        weighted_ratio += ratio * model.weights.weights[code]
    return weighted_ratio - 1.0


def fit_gap_curve(
    anchors: Sequence[AnchorPoint],
    grounding_loss_cents: int,
) -> float:
    """Fit the exponential loss curve and return its exponent.

    Least squares of log loss on deviation over all anchors; only the
    slope is kept. The intercept is pinned afterwards so the curve
    passes exactly through (0, grounding loss), the known group average.
    """
    if grounding_loss_cents <= 0:
        raise ValueError("grounding loss must be positive")
    if len(anchors) < 2:
        raise DegenerateAnchors("need at least two anchor points")
    xs = [a.deviation for a in anchors]
    if len(set(xs)) < 2:
        raise DegenerateAnchors("anchor deviations must not all coincide")
    ys = [math.log(a.loss_cents) for a in anchors]
    x_mean = sum(xs) / len(xs)
    y_mean = sum(ys) / len(ys)
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    return sxy / sxx


def gap_multiplier(deviation: float, model: GapIndexModel) -> float:
    """Risk multiplier exp(exponent * deviation); warns outside the bounds.

    The modeled range is advisory: values beyond it extrapolate the
    fitted curve rather than fail.
    """
    lo, hi = model.deviation_bounds
    if not lo - 1e-9 <= deviation <= hi + 1e-9:
        warnings.warn(
            f"deviation {deviation:+.3f} lies outside the modeled range "
            f"[{lo:+.2f}, {hi:+.2f}]; the multiplier extrapolates",
            RuntimeWarning,
            stacklevel=2,
        )
    return math.exp(model.exponent * deviation)


def build_model(
    report: AggregateReport,
    catalog: ControlCatalog | None = None,
    *,
    requested_split: float = DEFAULT_GROUP_SPLIT,
    anchors: Sequence[AnchorPoint] = (),
    deviation_bounds: tuple[float, float] = DEFAULT_DEVIATION_BOUNDS,
    ratio_cap: float = DEFAULT_RATIO_CAP,
    fit_method: str = "log-linear-pinned",
) -> GapIndexModel:
    """Run the full weight-split / proration / curve-fit pipeline.

    An anchor at deviation 0 is inserted automatically at the group's
    average loss unless the configured anchors already provide one. A
    report without incidents yields the equal-weight no-loss baseline
    whose multiplier is identically 1.
    """
    catalog = catalog or ControlCatalog()
    split = allocate_group_split(report, requested_split)
    weights = prorate_weights(split, report.per_control_loss_cents, catalog)

    if report.incident_count == 0 or report.total_loss_cents == 0:
        exponent = 0.0
        anchor_set: tuple[AnchorPoint, ...] = ()
        no_loss = True
    else:
        avg_loss = div_round_half_even(report.total_loss_cents, report.incident_count)
        anchor_set = tuple(anchors)
        if not any(a.deviation == 0.0 for a in anchor_set):
            anchor_set = anchor_set + (AnchorPoint(0.0, avg_loss),)
        exponent = fit_gap_curve(anchor_set, avg_loss)
        no_loss = False

    return GapIndexModel(
        catalog=catalog,
        group_avg_maturity=dict(report.avg_maturity),
        weights=weights,
        exponent=exponent,
        deviation_bounds=deviation_bounds,
        ratio_cap=ratio_cap,
        anchors=anchor_set,
        no_loss_baseline=no_loss,
        maturity_distribution=dict(report.maturity_flag_counts),
        participant_count=report.participant_count,
        provenance={
            "session_id": report.session_id,
            "fit_method": "no-loss-baseline" if no_loss else fit_method,
        },
    )


# ---------------------------------------------------------------------------
# Model file
# ---------------------------------------------------------------------------

def model_to_json(model: GapIndexModel) -> str:
    codes = list(model.catalog.codes)
    doc = {
        "version": "1",
        "exponent": model.exponent,
        "no_loss_baseline": model.no_loss_baseline,
        "catalog": [{"id": c, "name": n} for c, n in model.catalog.controls],
        "group_avg_maturity": {c: model.group_avg_maturity[c] for c in codes},
        "weights": {c: model.weights.weights[c] for c in codes},
        "implicated": sorted(model.weights.implicated),
        "deviation_bounds": list(model.deviation_bounds),
        "ratio_cap": model.ratio_cap,
        "anchors": [
            {"deviation": a.deviation, "loss_usd": format_usd(a.loss_cents)}
            for a in model.anchors
        ],
        "maturity_distribution": (
            {c: list(model.maturity_distribution[c]) for c in codes}
            if model.maturity_distribution is not None
            else None
        ),
        "participant_count": model.participant_count,
        "provenance": dict(model.provenance),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def model_from_json(text: str) -> GapIndexModel:
    doc = json.loads(text)
    catalog = ControlCatalog(
        controls=tuple((e["id"], e["name"]) for e in doc["catalog"])
    )
    distribution = doc.get("maturity_distribution")
    return GapIndexModel(
        catalog=catalog,
        group_avg_maturity={c: float(v) for c, v in doc["group_avg_maturity"].items()},
        weights=WeightAllocation(
            weights={c: float(v) for c, v in doc["weights"].items()},
            implicated=frozenset(doc.get("implicated", [])),
        ),
        exponent=float(doc["exponent"]),
        deviation_bounds=tuple(doc["deviation_bounds"]),  # type: ignore[arg-type]
        ratio_cap=float(doc["ratio_cap"]),
        anchors=tuple(
            AnchorPoint(float(a["deviation"]), parse_usd(a["loss_usd"]))
            for a in doc.get("anchors", [])
        ),
        no_loss_baseline=bool(doc.get("no_loss_baseline", False)),
        maturity_distribution=(
            {c: tuple(int(x) for x in v) for c, v in distribution.items()}
            if distribution is not None
            else None
        ),
        participant_count=(
            int(doc["participant_count"]) if doc.get("participant_count") is not None else None
        ),
        provenance={k: str(v) for k, v in doc.get("provenance", {}).items()},
    )
