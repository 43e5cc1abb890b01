"""Exact z-normalized matrix profile for self-joins.

The production path (:func:`mpx`) streams along diagonals of the
all-pairs distance matrix, updating the window covariance incrementally
so each cell costs O(1) after an O(n) setup.  A quadratic reference
(:func:`brute_force_profile`) evaluates the definition directly and
serves as the test oracle for the streaming path.

Distances are z-normalized Euclidean: each length-``m`` window is shifted
to zero mean and scaled to unit (population) standard deviation before
comparison, so matches are shape-based and invariant to affine transforms
of the raw series.  The correlation identity ``d = sqrt(2m(1 - rho))``
links distances to Pearson correlation and bounds them by ``2*sqrt(m)``.

Windows whose standard deviation falls below ``FLAT_EPSILON`` carry no
shape.  They are treated as the zero vector after normalization:
flat-vs-flat compares at distance 0 and flat-vs-anything-else at
``sqrt(m)``, which keeps every pairwise distance well-defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .timeseries import TimeSeries

# Population stddev below which a window is considered flat (shapeless).
FLAT_EPSILON = 1e-8


def default_exclusion_radius(window_length: int) -> int:
    """Self-match exclusion radius: ceil(m / 2)."""
    return -(-window_length // 2)


@dataclass(frozen=True)
class WindowStats:
    """Rolling per-window statistics for z-normalization.

    All arrays have length ``n - window_length + 1``.
    """

    window_length: int
    means: np.ndarray
    stddevs: np.ndarray
    flat_flags: np.ndarray


@dataclass(frozen=True)
class MatrixProfile:
    """Nearest-neighbor distance and index for every window of a series.

    ``distances[i]`` is the z-normalized Euclidean distance between
    window ``i`` and window ``neighbor_indices[i]``, minimized over all
    windows further than ``exclusion_radius`` from ``i``.
    """

    distances: np.ndarray
    neighbor_indices: np.ndarray
    window_length: int
    exclusion_radius: int

    def __len__(self) -> int:
        return self.distances.size


def _window_view(values: np.ndarray, m: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(values, m)


def compute_window_stats(series: TimeSeries, window_length: int) -> WindowStats:
    """Rolling mean and population standard deviation for every window.

    Parameters
    ----------
    series : TimeSeries
        Input samples, length at least ``window_length``.
    window_length : int
        Window size, at least 2.

    Returns
    -------
    WindowStats
        Means, stddevs, and flat flags (stddev below ``FLAT_EPSILON``)
        for all ``n - window_length + 1`` windows.
    """
    m = int(window_length)
    if m < 2:
        raise InvalidInputError(f"window_length must be >= 2, got {m}")
    if len(series) < m:
        raise InvalidInputError(
            f"series of length {len(series)} is shorter than window_length {m}"
        )
    windows = _window_view(series.values, m)
    means = windows.mean(axis=1)
    dev = windows - means[:, None]
    stddevs = np.sqrt((dev * dev).sum(axis=1) / m)
    flat_flags = stddevs < FLAT_EPSILON
    return WindowStats(m, means, stddevs, flat_flags)


def _znormalized_windows(series: TimeSeries, m: int) -> tuple[np.ndarray, np.ndarray]:
    """All windows z-normalized; flat windows become zero rows.

    Returns the normalized window matrix and the flat flags.  Non-flat
    rows have Euclidean norm ``sqrt(m)``, so the flat conventions
    (flat-flat -> 0, flat-other -> sqrt(m)) fall out of plain row
    differences.
    """
    stats = compute_window_stats(series, m)
    windows = _window_view(series.values, m)
    dev = windows - stats.means[:, None]
    safe = np.where(stats.flat_flags, 1.0, stats.stddevs)
    normed = dev / safe[:, None]
    normed[stats.flat_flags] = 0.0
    return normed, stats.flat_flags


def _znormalize_query(query: np.ndarray) -> np.ndarray:
    mean = query.mean()
    std = math.sqrt(float(((query - mean) ** 2).mean()))
    if std < FLAT_EPSILON:
        return np.zeros_like(query)
    return (query - mean) / std


def subsequence_distance(series: TimeSeries, i: int, j: int, window_length: int) -> float:
    """Z-normalized Euclidean distance between windows ``i`` and ``j``.

    Flat-window rule: both flat -> 0; exactly one flat -> ``sqrt(m)``.
    """
    m = int(window_length)
    if m < 2:
        raise InvalidInputError(f"window_length must be >= 2, got {m}")
    last = len(series) - m
    if not (0 <= i <= last and 0 <= j <= last):
        raise InvalidInputError(
            f"subsequence start indices {i}, {j} out of range [0, {last}]"
        )
    a = np.asarray(series.values[i : i + m], dtype=np.float64)
    b = np.asarray(series.values[j : j + m], dtype=np.float64)
    za = _znormalize_query(a)
    zb = _znormalize_query(b)
    return float(np.linalg.norm(za - zb))


def distance_profile(series: TimeSeries, query) -> np.ndarray:
    """Distance from ``query`` to every window of ``series``.

    Parameters
    ----------
    series : TimeSeries
        Series to scan.
    query : array_like
        Pattern of length ``m`` with ``2 <= m <= len(series)``.

    Returns
    -------
    numpy.ndarray
        ``n - m + 1`` z-normalized distances, one per window.
    """
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.size < 2:
        raise InvalidInputError("query must be one-dimensional with length >= 2")
    if q.size > len(series):
        raise InvalidInputError(
            f"query of length {q.size} is longer than series of length {len(series)}"
        )
    if not np.all(np.isfinite(q)):
        raise InvalidInputError("query values must all be finite")
    normed, _ = _znormalized_windows(series, q.size)
    zq = _znormalize_query(q)
    diff = normed - zq[None, :]
    return np.sqrt((diff * diff).sum(axis=1))


def _validate_profile_input(series: TimeSeries, m: int, exclusion_radius) -> int:
    if m < 2:
        raise InvalidInputError(f"window_length must be >= 2, got {m}")
    if len(series) < m:
        raise InvalidInputError(
            f"series of length {len(series)} is shorter than window_length {m}"
        )
    if exclusion_radius is None:
        exclusion_radius = default_exclusion_radius(m)
    exclusion_radius = int(exclusion_radius)
    if exclusion_radius < 0:
        raise InvalidInputError("exclusion_radius must be non-negative")
    n_windows = len(series) - m + 1
    if n_windows < 2 * exclusion_radius + 2:
        raise InvalidInputError(
            f"{n_windows} windows leave no admissible neighbor outside "
            f"exclusion radius {exclusion_radius}"
        )
    return exclusion_radius


def brute_force_profile(
    series: TimeSeries, window_length: int, exclusion_radius: int | None = None
) -> MatrixProfile:
    """Matrix profile by direct evaluation of the definition.

    For every window ``i`` this scans all ``j`` with
    ``|i - j| > exclusion_radius`` and keeps the minimum distance,
    breaking ties toward the smallest ``j``.  Quadratic; intended as the
    reference oracle for :func:`mpx`.
    """
    m = int(window_length)
    exclusion_radius = _validate_profile_input(series, m, exclusion_radius)
    normed, _ = _znormalized_windows(series, m)
    p = normed.shape[0]
    distances = np.empty(p)
    neighbors = np.empty(p, dtype=np.int64)
    offsets = np.arange(p)
    for i in range(p):
        diff = normed - normed[i]
        row = np.sqrt((diff * diff).sum(axis=1))
        row[np.abs(offsets - i) <= exclusion_radius] = np.inf
        j = int(np.argmin(row))
        if not np.isfinite(row[j]):
            raise InvalidInputError(f"window {i} has no admissible neighbor")
        distances[i] = row[j]
        neighbors[i] = j
    return MatrixProfile(distances, neighbors, m, exclusion_radius)


def mpx(
    series: TimeSeries, window_length: int, exclusion_radius: int | None = None
) -> MatrixProfile:
    """Exact matrix profile via diagonal streaming.

    Walks each diagonal ``k`` of the pairwise matrix once, advancing the
    window covariance with a rank-1 update per cell, then converts
    correlations to distances through ``d = sqrt(2m(1 - rho))``.  Output
    matches :func:`brute_force_profile` exactly up to floating-point
    roundoff; index ties resolve toward the smaller neighbor index.

    Parameters
    ----------
    series : TimeSeries
        Input series.
    window_length : int
        Window size ``m >= 2``.
    exclusion_radius : int, optional
        Self-match exclusion band; defaults to ``ceil(m / 2)``.

    Returns
    -------
    MatrixProfile
    """
    m = int(window_length)
    exclusion_radius = _validate_profile_input(series, m, exclusion_radius)
    x = series.values
    n = x.size
    p = n - m + 1

    stats = compute_window_stats(series, m)
    mu = stats.means
    flat = stats.flat_flags
    ssq = (stats.stddevs * stats.stddevs) * m
    # Inverse centered norm; flat windows get 0 and are patched per-pair below.
    inv_norm = np.where(flat, 0.0, 1.0 / np.sqrt(np.where(flat, 1.0, ssq)))

    # Rank-1 covariance update terms: advancing a diagonal by one cell
    # adds df[i]*dg[i+k] + df[i+k]*dg[i].
    df = np.zeros(p)
    dg = np.zeros(p)
    df[1:] = 0.5 * (x[m:] - x[: n - m])
    dg[1:] = (x[m:] - mu[1:]) + (x[: n - m] - mu[: p - 1])

    best_corr = np.full(p, -np.inf)
    neighbors = np.full(p, -1, dtype=np.int64)

    for k in range(exclusion_radius + 1, p):
        span = p - k
        cov0 = float(np.dot(x[k : k + m] - mu[k], x[:m] - mu[0]))
        if span > 1:
            inc = df[1:span] * dg[k + 1 : k + span] + df[k + 1 : k + span] * dg[1:span]
            cov = np.empty(span)
            cov[0] = cov0
            np.cumsum(inc, out=cov[1:])
            cov[1:] += cov0
        else:
            cov = np.array([cov0])

        corr = cov * inv_norm[:span] * inv_norm[k:]
        left_flat = flat[:span]
        right_flat = flat[k:]
        corr = np.where(left_flat & right_flat, 1.0, corr)
        # One flat side pins the distance at sqrt(m), i.e. rho = 1/2.
        corr = np.where(left_flat ^ right_flat, 0.5, corr)
        np.clip(corr, -1.0, 1.0, out=corr)

        # Row i sees neighbor i+k: candidates arrive in increasing index
        # order, so strict comparison keeps the smallest index on ties.
        update = corr > best_corr[:span]
        rows = np.nonzero(update)[0]
        best_corr[rows] = corr[rows]
        neighbors[rows] = rows + k
        # Row i+k sees neighbor i: candidates arrive in decreasing index
        # order, so >= moves ties toward the smallest index.
        update = corr >= best_corr[k:]
        rows = np.nonzero(update)[0]
        best_corr[rows + k] = corr[rows]
        neighbors[rows + k] = rows

    distances = np.sqrt(np.maximum(2.0 * m * (1.0 - best_corr), 0.0))
    return MatrixProfile(distances, neighbors, m, exclusion_radius)
