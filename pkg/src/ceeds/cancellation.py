"""Cancellation cycle synthesis and retroactive ranking.

A candidate cancellation cycle is the motif flipped about the x-axis and
padded with zeros out to one full modal period.  Tiling that cycle across
the sample axis (anchored at the motif's offset) produces the signal the
controller would have injected; adding it to the logged error and summing
absolute values scores how much error would have remained.  The lowest
score wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NoCandidateError, PeriodTooShortError
from .motif import FeatureSet, Motif
from .timeseries import TimeSeries


@dataclass(frozen=True)
class CancellationCycle:
    """One period of counter-interference.

    The first ``m`` entries are the negated motif samples; the remaining
    ``modal_period - m`` entries are zeros.  ``offset`` fixes the phase:
    tiled output puts ``cycle_values[0]`` at every sample index congruent
    to ``offset`` modulo the period.
    """

    cycle_values: np.ndarray
    offset: int
    source_rank: int

    def __post_init__(self):
        if self.offset < 0:
            raise InvalidInputError("offset must be non-negative")
        if len(self.cycle_values) < 1:
            raise InvalidInputError("cycle must contain at least one value")

    @property
    def modal_period(self) -> int:
        return len(self.cycle_values)

    def value_at(self, sample_index: int) -> float:
        """Tiled cycle value at an absolute sample index."""
        return float(self.cycle_values[(sample_index - self.offset) % self.modal_period])


def build_cycle(motif: Motif, features: FeatureSet) -> CancellationCycle:
    """Negate a motif and zero-pad it to one full period.

    Raises
    ------
    PeriodTooShortError
        If the modal period is shorter than the motif, in which case the
        candidate is rejected (callers drop it rather than abort).
    """
    m = len(motif.representative)
    if features.modal_period < m:
        raise PeriodTooShortError(
            f"modal period {features.modal_period} is shorter than motif length {m}"
        )
    values = np.zeros(features.modal_period)
    values[:m] = -np.asarray(motif.representative, dtype=np.float64)
    return CancellationCycle(values, offset=features.offset, source_rank=motif.rank)


def tile_cancellation(cycle: CancellationCycle, length: int) -> np.ndarray:
    """Periodic extension of a cycle over ``[0, length)``.

    ``output[t] = cycle_values[(t - offset) mod period]``: the extension
    is periodic in both directions, so phase is preserved before the
    offset as well as after it.
    """
    if length < 1:
        raise InvalidInputError("length must be positive")
    idx = (np.arange(length) - cycle.offset) % cycle.modal_period
    return cycle.cycle_values[idx]


def retroactive_score(error_log: TimeSeries, candidate) -> float:
    """Absolute error sum had the candidate signal been applied.

    Adds the candidate element-wise to the logged error and sums absolute
    values; 0 means perfect cancellation.
    """
    cand = np.asarray(candidate, dtype=np.float64)
    if cand.shape != (len(error_log),):
        raise InvalidInputError(
            f"candidate length {cand.size} != error log length {len(error_log)}"
        )
    return float(np.abs(error_log.values + cand).sum())


def select_best(
    error_log: TimeSeries, candidates: list[CancellationCycle]
) -> CancellationCycle:
    """Pick the candidate whose tiling minimizes the retroactive score.

    Ties break toward the lowest source rank, making selection
    deterministic under any candidate ordering.
    """
    if not candidates:
        raise NoCandidateError("no cancellation candidates to rank")
    scored = [
        (retroactive_score(error_log, tile_cancellation(c, len(error_log))), c.source_rank, c)
        for c in candidates
    ]
    scored.sort(key=lambda item: (item[0], item[1]))
    return scored[0][2]
