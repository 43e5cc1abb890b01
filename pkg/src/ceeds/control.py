"""Discrete PIDF control with a periodic cancellation term.

The controller output per loop iteration is

    duty = inverse_transfer(setpoint)                      # feedforward
         + (pid + km * cancellation) / transfer_slope      # RPM -> duty

The PID acts on ``setpoint - measured``; the logged error uses the
opposite sign (``measured - setpoint``) so a disturbance that drags the
motor below the setpoint logs as negative error, its flipped motif is
positive, and adding the cancellation term raises duty to counteract it.

Phases advance one way only:

    Collect  -> log error, PIDF control, until the analysis cutoff
    Hold     -> duty pinned to feedforward, PID frozen (analysis window)
    Apply    -> PIDF plus the chosen cancellation cycle
    FallbackPidf -> PIDF only, when analysis produced no usable candidate
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cancellation import CancellationCycle, build_cycle, select_best
from .errors import (
    CeedsError,
    DegenerateFitError,
    InvalidInputError,
    NonInvertibleError,
    PeriodTooShortError,
)
from .matrix_profile import mpx
from .motif import AnalysisConfig, motif_features, top_motifs
from .timeseries import TimeSeries


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    integral_limit: float = math.inf

    def __post_init__(self):
        if self.integral_limit < 0:
            raise InvalidInputError("integral_limit must be non-negative")


@dataclass(frozen=True)
class PidState:
    """Accumulated integral (error * dt) and derivative memory."""

    integral: float = 0.0
    previous_error: float = 0.0
    initialized: bool = False


def pid_step(
    state: PidState, gains: PidGains, error: float, dt: float
) -> tuple[float, PidState]:
    """One PID update; returns (contribution, new state).

    The integral accumulates before use and is clamped to
    ``integral_limit`` (anti-windup).  The derivative term is suppressed
    on the first step, when no previous error exists.
    """
    if not math.isfinite(error):
        raise InvalidInputError("PID error input must be finite")
    if not (dt > 0):
        raise InvalidInputError("dt must be positive")
    integral = state.integral + error * dt
    limit = gains.integral_limit
    integral = max(-limit, min(limit, integral))
    derivative = (error - state.previous_error) / dt if state.initialized else 0.0
    contribution = gains.kp * error + gains.ki * integral + gains.kd * derivative
    return contribution, PidState(integral, error, True)


@dataclass(frozen=True)
class TransferFunction:
    """Affine steady-state map from duty cycle to RPM, valid on
    ``[0, duty_max]``.  Must be invertible (positive slope)."""

    slope: float
    intercept: float = 0.0
    duty_max: float = 400.0

    def __post_init__(self):
        if not (self.slope > 0):
            raise NonInvertibleError(f"slope must be positive, got {self.slope}")
        if not (self.duty_max > 0):
            raise InvalidInputError("duty_max must be positive")

    def forward(self, duty: float) -> float:
        return self.slope * duty + self.intercept

    def inverse(self, rpm: float) -> float:
        return (rpm - self.intercept) / self.slope

    def rpm_to_duty_delta(self, rpm_delta: float) -> float:
        """Duty change producing a given RPM change (exact for an affine
        map, where the intercept is already covered by the feedforward)."""
        return rpm_delta / self.slope

    def clamp(self, duty: float) -> float:
        return max(0.0, min(self.duty_max, duty))


def fit_transfer(calibration, duty_max: float | None = None) -> TransferFunction:
    """Least-squares affine fit of (duty, steady RPM) calibration pairs.

    Raises
    ------
    DegenerateFitError
        All calibration duties are identical.
    NonInvertibleError
        The fitted slope is not positive.
    """
    pairs = [(float(d), float(r)) for d, r in calibration]
    if len(pairs) < 2:
        raise InvalidInputError("calibration needs at least two points")
    duties = np.array([p[0] for p in pairs])
    rpms = np.array([p[1] for p in pairs])
    if np.ptp(duties) == 0.0:
        raise DegenerateFitError("calibration duties are all identical")
    slope, intercept = np.polyfit(duties, rpms, 1)
    if not (slope > 0):
        raise NonInvertibleError(f"fitted slope {slope:.6g} is not invertible")
    if duty_max is None:
        duty_max = float(duties.max())
    return TransferFunction(float(slope), float(intercept), duty_max)


class Phase(str, enum.Enum):
    COLLECT = "collect"
    HOLD = "hold"
    APPLY = "apply"
    FALLBACK_PIDF = "fallback_pidf"


class CeedsController:
    """Single-owner controller state machine.

    Drive it with one :meth:`step` call per loop iteration, passing the
    measured RPM and a sample index that increments by exactly 1.  The
    instance is transferable between threads but not shareable.

    After each step, ``last_phase`` and ``last_cancellation_rpm`` expose
    what that step did (for logging); ``chosen`` is set if and only if
    the controller is in the Apply phase.
    """

    def __init__(
        self,
        gains: PidGains,
        km: float,
        transfer: TransferFunction,
        setpoint_rpm: float,
        analysis: AnalysisConfig,
        hold_samples: int = 40,
        sample_period_ms: int = 50,
    ):
        if not (setpoint_rpm > 0):
            raise InvalidInputError("setpoint_rpm must be positive")
        if hold_samples < 0:
            raise InvalidInputError("hold_samples must be non-negative")
        self.gains = gains
        self.km = float(km)
        self.transfer = transfer
        self.setpoint_rpm = float(setpoint_rpm)
        self.analysis = analysis
        self.hold_samples = int(hold_samples)
        self.sample_period_ms = int(sample_period_ms)

        self.phase = Phase.COLLECT
        self.pid_state = PidState()
        self.chosen: CancellationCycle | None = None
        self.last_phase = Phase.COLLECT
        self.last_cancellation_rpm = 0.0
        self._errors: list[float] = []
        self._pending: CancellationCycle | None = None
        self._next_index = 0

    @property
    def error_log(self) -> TimeSeries:
        """Errors collected so far (at most ``analysis_cutoff`` samples)."""
        return TimeSeries(np.array(self._errors), self.sample_period_ms)

    def _analyze(self) -> CancellationCycle | None:
        try:
            log = self.error_log
            profile = mpx(log, self.analysis.window_length)
            motifs = top_motifs(log, profile, self.analysis)
            candidates = []
            for motif in motifs:
                try:
                    candidates.append(build_cycle(motif, motif_features(motif)))
                except PeriodTooShortError:
                    continue
            if not candidates:
                return None
            return select_best(log, candidates)
        except CeedsError:
            return None

    def step(self, measured_rpm: float, sample_index: int, dt: float) -> float:
        """Advance one loop iteration; returns the commanded duty."""
        if not math.isfinite(measured_rpm):
            raise InvalidInputError("measured_rpm must be finite")
        if not (dt > 0):
            raise InvalidInputError("dt must be positive")
        if sample_index != self._next_index:
            raise InvalidInputError(
                f"sample_index must increment by 1 (expected {self._next_index}, "
                f"got {sample_index})"
            )
        self._next_index += 1

        cutoff = self.analysis.analysis_cutoff
        if self.phase is Phase.HOLD and sample_index >= cutoff + self.hold_samples:
            if self._pending is not None:
                self.chosen = self._pending
                self.phase = Phase.APPLY
            else:
                self.phase = Phase.FALLBACK_PIDF

        phase = self.phase
        error = measured_rpm - self.setpoint_rpm
        feedforward = self.transfer.inverse(self.setpoint_rpm)
        cancellation_rpm = 0.0

        if phase is Phase.COLLECT:
            self._errors.append(error)
            correction, self.pid_state = pid_step(self.pid_state, self.gains, -error, dt)
            duty = feedforward + self.transfer.rpm_to_duty_delta(correction)
            if len(self._errors) >= cutoff:
                self._pending = self._analyze()
                self.phase = Phase.HOLD
        elif phase is Phase.HOLD:
            duty = feedforward
        elif phase is Phase.APPLY:
            correction, self.pid_state = pid_step(self.pid_state, self.gains, -error, dt)
            cancellation_rpm = self.km * self.chosen.value_at(sample_index)
            duty = feedforward + self.transfer.rpm_to_duty_delta(
                correction + cancellation_rpm
            )
        else:  # FallbackPidf: Collect behavior without further logging.
            correction, self.pid_state = pid_step(self.pid_state, self.gains, -error, dt)
            duty = feedforward + self.transfer.rpm_to_duty_delta(correction)

        self.last_phase = phase
        self.last_cancellation_rpm = cancellation_rpm
        return self.transfer.clamp(duty)
