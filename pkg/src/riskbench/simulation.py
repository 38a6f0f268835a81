"""Two-component loss mixture Monte Carlo and loss-exceedance curves.

Sampling contract (fixed so runs are bit-reproducible):

  * PRNG: Philox (counter-based). Draws are processed in fixed chunks of
    ``CHUNK_SIZE``; chunk c uses the generator ``substream(seed, c)``, so
    the output depends only on (spec, n, seed) and never on how many
    worker threads executed the chunks.
  * Each draw consumes exactly two uniforms: the first selects the
    mixture component by cumulative probability, the second becomes a
    normal variate through the inverse CDF, which keeps every draw
    monotone in (and auditable from) its uniform inputs.
  * Draws below the censor floor are clamped to it (losses cannot be
    negative), then rounded to integer cents.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .money import format_usd, parse_usd

__all__ = [
    "CHUNK_SIZE",
    "MixtureComponent",
    "MixtureSpec",
    "SimulationResult",
    "LossExceedanceCurve",
    "substream",
    "sample_losses",
    "histogram",
    "lec_from_samples",
    "lec_query",
    "histogram_csv",
    "lec_csv",
    "mixture_to_json",
    "mixture_from_json",
    "DEFAULT_BIN_WIDTH_CENTS",
]

CHUNK_SIZE = 4096

DEFAULT_BIN_WIDTH_CENTS = 2_500_000  # $25,000 bins


@dataclass(frozen=True)
class MixtureComponent:
    mean_cents: int
    sd_cents: int
    probability: float

    def __post_init__(self):
        if self.sd_cents < 0:
            raise ValueError("standard deviation must be non-negative")
        if not 0.0 < self.probability <= 1.0:
            raise ValueError("component probability must lie in (0, 1]")


@dataclass(frozen=True)
class MixtureSpec:
    """Loss-severity mixture: frequent small losses plus rare large ones."""

    components: tuple[MixtureComponent, ...]
    censor_floor_cents: int = 0

    def __post_init__(self):
        if not self.components:
            raise ValueError("mixture needs at least one component")
        total = sum(c.probability for c in self.components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"component probabilities sum to {total}, expected 1")
        if self.censor_floor_cents < 0:
            raise ValueError("censor floor must be non-negative")

    @classmethod
    def default(cls) -> "MixtureSpec":
        """Default sector severity mixture: 75% around $50k, 25% around $450k."""
        return cls(
            components=(
                MixtureComponent(5_000_000, 2_500_000, 0.75),
                MixtureComponent(45_000_000, 30_000_000, 0.25),
            )
        )


@dataclass(frozen=True)
class SimulationResult:
    """Ordered draw outcomes in integer cents, plus what produced them."""

    samples: np.ndarray  # int64 cents, draw-index order
    seed: int
    spec: MixtureSpec

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.int64)
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return int(self.samples.size)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream for one chunk of draws."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    )


def _sample_chunk(spec: MixtureSpec, seed: int, chunk_index: int, count: int) -> np.ndarray:
    rng = substream(seed, chunk_index)
    u = rng.random((count, 2))
    cum = np.cumsum([c.probability for c in spec.components])
    component = np.searchsorted(cum, u[:, 0], side="right")
    component = np.minimum(component, len(spec.components) - 1)
    means = np.array([c.mean_cents for c in spec.components], dtype=np.float64)
    sds = np.array([c.sd_cents for c in spec.components], dtype=np.float64)
    mean = means[component]
    sd = sds[component]
    with np.errstate(invalid="ignore"):
        # sd == 0 is the degenerate point mass at the mean; ndtri(0) = -inf
        # is harmless either way because the floor clamps it.
        draw = mean + np.where(sd > 0, sd * ndtri(u[:, 1]), 0.0)
    draw = np.maximum(draw, float(spec.censor_floor_cents))
    return np.rint(draw).astype(np.int64)


def sample_losses(
    spec: MixtureSpec, n: int, seed: int, *, workers: int = 1
) -> SimulationResult:
    """Draw n losses from the mixture; identical output for any worker count."""
    if n < 1:
        raise ValueError("n must be >= 1")
    chunks = [
        (c, min((c + 1) * CHUNK_SIZE, n) - c * CHUNK_SIZE)
        for c in range((n + CHUNK_SIZE - 1) // CHUNK_SIZE)
    ]
    out = np.empty(n, dtype=np.int64)
    if workers <= 1:
        for c, count in chunks:
            out[c * CHUNK_SIZE: c * CHUNK_SIZE + count] = _sample_chunk(spec, seed, c, count)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(lambda t: (t[0], _sample_chunk(spec, seed, t[0], t[1])), chunks)
            for c, values in results:
                out[c * CHUNK_SIZE: c * CHUNK_SIZE + values.size] = values
    return SimulationResult(samples=out, seed=seed, spec=spec)


def histogram(result: SimulationResult, bin_width_cents: int = DEFAULT_BIN_WIDTH_CENTS) -> list[tuple[int, int]]:
    """(bin lower edge cents, count) pairs partitioning all samples.

    Bins start at zero and run contiguously through the largest sample,
    so counts always sum to n.
    """
    if bin_width_cents <= 0:
        raise ValueError("bin width must be positive")
    idx = result.samples // bin_width_cents
    counts = np.bincount(idx.astype(np.int64))
    return [(int(i) * bin_width_cents, int(c)) for i, c in enumerate(counts)]


@dataclass(frozen=True)
class LossExceedanceCurve:
    """Empirical survival function of single-incident losses.

    exceedance(l) = share of simulated losses strictly greater than l,
    evaluated by binary search over the sorted sample.
    """

    sorted_samples: np.ndarray
    n: int

    def __post_init__(self):
        arr = np.asarray(self.sorted_samples, dtype=np.int64)
        arr.flags.writeable = False
        object.__setattr__(self, "sorted_samples", arr)

    def exceedance(self, threshold_cents: int) -> float:
        position = int(np.searchsorted(self.sorted_samples, threshold_cents, side="right"))
        return (self.n - position) / self.n


def lec_from_samples(result: SimulationResult) -> LossExceedanceCurve:
    return LossExceedanceCurve(
        sorted_samples=np.sort(result.samples), n=result.n
    )


def lec_query(
    curve: LossExceedanceCurve, thresholds_cents: Sequence[int]
) -> list[tuple[int, float]]:
    """(threshold, exceedance probability) rows; nonincreasing in threshold."""
    return [(int(t), curve.exceedance(int(t))) for t in thresholds_cents]


# ---------------------------------------------------------------------------
# CSV / JSON interfaces
# ---------------------------------------------------------------------------

def histogram_csv(bins: Sequence[tuple[int, int]]) -> str:
    lines = ["bin_lower_usd,count"]
    for edge, count in bins:
        lines.append(f"{format_usd(edge)},{count}")
    return "\n".join(lines) + "\n"


def lec_csv(rows: Sequence[tuple[int, float]]) -> str:
    lines = ["threshold_usd,exceedance_prob"]
    for threshold, prob in rows:
        lines.append(f"{format_usd(threshold)},{prob}")
    return "\n".join(lines) + "\n"


def mixture_to_json(spec: MixtureSpec, n: int, seed: int) -> str:
    doc = {
        "components": [
            {
                "mean_usd": format_usd(c.mean_cents),
                "sd_usd": format_usd(c.sd_cents),
                "prob": c.probability,
            }
            for c in spec.components
        ],
        "n": n,
        "seed": seed,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def mixture_from_json(doc: dict) -> tuple[MixtureSpec, int, int]:
    spec = MixtureSpec(
        components=tuple(
            MixtureComponent(
                mean_cents=parse_usd(c["mean_usd"]),
                sd_cents=parse_usd(c["sd_usd"]),
                probability=float(c["prob"]),
            )
            for c in doc["components"]
        )
    )
    return spec, int(doc.get("n", 10_000)), int(doc.get("seed", 42))
