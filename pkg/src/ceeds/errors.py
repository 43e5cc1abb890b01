"""Exception hierarchy shared by all ceeds modules."""


class CeedsError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(CeedsError, ValueError):
    """An argument violates an operation's preconditions."""


class PeriodTooShortError(CeedsError):
    """A motif's modal period is shorter than the motif itself; the
    candidate cannot be padded into a full cycle."""


class InsufficientOccurrencesError(CeedsError):
    """A motif has fewer than two occurrences, so no period exists."""


class NoCandidateError(CeedsError):
    """Ranking was asked to choose from an empty candidate list."""


class DegenerateFitError(CeedsError):
    """Calibration points share a single duty value; no line can be fit."""


class NonInvertibleError(CeedsError):
    """A fitted transfer function has non-positive slope and cannot be
    inverted over its duty domain."""


class WaveformError(CeedsError, ValueError):
    """A waveform specification string could not be parsed."""


class UndefinedMetricError(CeedsError):
    """The error-reduction metric is undefined (baseline error sum is 0)."""


class ConfigError(CeedsError, ValueError):
    """An experiment configuration violates its invariants."""


class CeedsIOError(CeedsError, OSError):
    """A log or plot file could not be written."""
