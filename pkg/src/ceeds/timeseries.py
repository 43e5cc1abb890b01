"""Fixed-cadence sample sequences.

A control loop with a fixed runtime per iteration gives every sample a
direct index-to-time mapping: sample ``i`` was taken at ``i *
sample_period_ms`` milliseconds.  Everything downstream (profiles, motif
periods, cancellation offsets) is expressed in sample indices and relies
on that mapping.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

DEFAULT_SAMPLE_PERIOD_MS = 50


class TimeSeries:
    """Immutable sequence of real samples taken at a fixed cadence.

    Parameters
    ----------
    values : array_like
        One value per loop iteration.  Must all be finite.
    sample_period_ms : int
        Milliseconds between consecutive samples; must be positive.
    """

    __slots__ = ("values", "sample_period_ms")

    def __init__(self, values, sample_period_ms: int = DEFAULT_SAMPLE_PERIOD_MS):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidInputError("time series must be one-dimensional")
        if arr.size and not np.all(np.isfinite(arr)):
            raise InvalidInputError("time series values must all be finite")
        if not isinstance(sample_period_ms, (int, np.integer)) or sample_period_ms <= 0:
            raise InvalidInputError("sample_period_ms must be a positive integer")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "sample_period_ms", int(sample_period_ms))

    def __setattr__(self, name, value):
        raise AttributeError("TimeSeries is immutable")

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, index):
        return self.values[index]

    def time_ms(self, index: int) -> int:
        """Wall time of sample ``index`` in milliseconds."""
        return index * self.sample_period_ms

    def __repr__(self) -> str:
        return f"TimeSeries(n={len(self)}, sample_period_ms={self.sample_period_ms})"
