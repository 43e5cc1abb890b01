"""Top-n motif discovery and per-motif feature extraction.

A motif is a window shape that recurs in the series.  Discovery walks the
matrix profile from its global minimum upward: each minimum seeds a
motif, its occurrences are gathered by a distance-profile scan around the
seed shape, and a zone around every accepted occurrence is masked off
before the next seed is taken.

Each motif reduces to two features: the offset of its first occurrence
and the modal gap between successive occurrences.  Using the mode (not
the mean) keeps the period estimate exact even when discovery skips an
occurrence, since a single doubled gap cannot outvote the common one.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOccurrencesError, InvalidInputError
from .matrix_profile import (
    FLAT_EPSILON,
    MatrixProfile,
    default_exclusion_radius,
    distance_profile,
)
from .timeseries import TimeSeries


@dataclass(frozen=True)
class Motif:
    """A recurring window shape.

    ``representative`` holds the raw (un-normalized) samples at the first
    occurrence; ``occurrences`` are window start indices, strictly
    increasing, at least two of them.
    """

    representative: np.ndarray
    occurrences: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if len(self.occurrences) < 2:
            raise InvalidInputError("a motif needs at least two occurrences")
        if any(b <= a for a, b in zip(self.occurrences, self.occurrences[1:])):
            raise InvalidInputError("occurrences must be strictly increasing")
        if self.rank < 1:
            raise InvalidInputError("rank is 1-based")


@dataclass(frozen=True)
class FeatureSet:
    """Phase and period of a motif, both in samples."""

    offset: int
    modal_period: int


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs for the analysis stage.

    ``radius_factor`` scales the seed-pair distance into the occurrence
    gathering threshold.  ``min_amplitude`` discards motifs whose raw
    peak-to-peak spread is below it (0 disables the filter, the default:
    it exists to stop discovery from picking up background noise).
    ``analysis_cutoff`` is the number of samples collected before
    analysis runs.
    """

    window_length: int = 35
    motif_count: int = 5
    radius_factor: float = 2.0
    min_amplitude: float = 0.0
    analysis_cutoff: int = 600

    def __post_init__(self):
        if self.window_length < 2:
            raise InvalidInputError("window_length must be >= 2")
        if self.motif_count < 1:
            raise InvalidInputError("motif_count must be >= 1")
        if not self.radius_factor > 1.0:
            raise InvalidInputError("radius_factor must exceed 1")
        if self.min_amplitude < 0.0:
            raise InvalidInputError("min_amplitude must be non-negative")
        if self.analysis_cutoff <= self.window_length:
            raise InvalidInputError("analysis_cutoff must exceed window_length")


def top_motifs(
    series: TimeSeries, profile: MatrixProfile, config: AnalysisConfig
) -> list[Motif]:
    """Discover up to ``config.motif_count`` motifs, best first.

    Iteratively seeds from the smallest unmasked profile value, gathers
    occurrences within ``radius_factor`` times the seed distance (with an
    absolute floor of ``FLAT_EPSILON * sqrt(m)`` so exact repeats still
    gather), enforces pairwise separation greater than the profile's
    exclusion radius, then masks ``ceil(m/2)`` around every accepted
    occurrence.  Motifs below ``min_amplitude`` peak-to-peak are dropped
    without counting toward the requested total.

    Returns fewer motifs (possibly none) when the profile is exhausted.
    """
    m = config.window_length
    if profile.window_length != m:
        raise InvalidInputError(
            f"profile window {profile.window_length} != config window {m}"
        )
    if len(profile) != len(series) - m + 1:
        raise InvalidInputError("profile does not belong to this series")

    p = len(profile)
    ez = profile.exclusion_radius
    mask_radius = default_exclusion_radius(m)
    floor = FLAT_EPSILON * math.sqrt(m)
    masked = np.zeros(p, dtype=bool)
    motifs: list[Motif] = []

    def mask_around(idx: int):
        masked[max(0, idx - mask_radius) : min(p, idx + mask_radius + 1)] = True

    while len(motifs) < config.motif_count and not masked.all():
        candidates = np.where(masked, np.inf, profile.distances)
        seed = int(np.argmin(candidates))
        if not np.isfinite(candidates[seed]):
            break
        seed_distance = float(profile.distances[seed])
        threshold = max(config.radius_factor * seed_distance, floor)

        seed_shape = series.values[seed : seed + m]
        dp = distance_profile(series, seed_shape)
        order = np.argsort(dp, kind="stable")
        accepted: list[int] = []
        for j in order:
            j = int(j)
            if dp[j] > threshold:
                break
            if masked[j]:
                continue
            if any(abs(j - a) <= ez for a in accepted):
                continue
            accepted.append(j)

        if len(accepted) < 2:
            mask_around(seed)
            continue

        occurrences = tuple(sorted(accepted))
        for occ in occurrences:
            mask_around(occ)

        representative = np.array(series.values[occurrences[0] : occurrences[0] + m])
        if np.ptp(representative) < config.min_amplitude:
            continue
        motifs.append(Motif(representative, occurrences, rank=len(motifs) + 1))

    return motifs


def motif_features(motif: Motif) -> FeatureSet:
    """Offset and modal period of a motif.

    The offset is the first occurrence index.  The modal period is the
    most common gap between successive occurrences; ties break toward the
    smallest gap.
    """
    if len(motif.occurrences) < 2:
        raise InsufficientOccurrencesError(
            "cannot derive a period from a single occurrence"
        )
    gaps = [b - a for a, b in zip(motif.occurrences, motif.occurrences[1:])]
    counts = Counter(gaps)
    best = max(counts.values())
    modal = min(gap for gap, c in counts.items() if c == best)
    return FeatureSet(offset=motif.occurrences[0], modal_period=int(modal))
