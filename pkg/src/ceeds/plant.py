"""Simulated DC motor with injected periodic interference.

The motor is first-order: one Euler step per control iteration moves the
shaft speed toward ``ku * duty`` with time constant ``tau``.  Interference
is injected in software as an RPM reduction on the measured speed (a
load-like disturbance), so a periodic waveform produces a purely negative
periodic error signature in the logs.  Measurement noise is Gaussian from
a seeded PCG64 generator; equal seeds and equal inputs give bitwise-equal
trajectories.

Waveform DSL
------------
Comma-separated segments, each either ``V*N`` (value V repeated N times)
or ``ramp(A,B,S)`` (arithmetic sequence from A toward B exclusive, step
S).  Examples::

    0*60,50*20                      # square pulse
    0*45,ramp(50,0,-2)              # decaying sawtooth
    0*30,ramp(0,60,4),ramp(60,0,-4) # triangle

Samples are RPM-reduction magnitudes and must be non-negative.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, WaveformError

GENERATOR_NAME = "numpy-pcg64"

_REPEAT_RE = re.compile(r"^\s*([+-]?[0-9.eE+-]+)\s*\*\s*(\d+)\s*$")
_RAMP_RE = re.compile(
    r"^\s*ramp\(\s*([+-]?[0-9.eE+-]+)\s*,\s*([+-]?[0-9.eE+-]+)\s*,\s*([+-]?[0-9.eE+-]+)\s*\)\s*$"
)


@dataclass(frozen=True)
class Waveform:
    """One period of interference, in RPM-reduction per sample."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise WaveformError("waveform needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise WaveformError("waveform samples must be finite")
        if np.any(arr < 0):
            raise WaveformError("waveform samples must be non-negative magnitudes")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def period(self) -> int:
        return self.samples.size


def _split_segments(spec: str) -> list[str]:
    segments, depth, current = [], 0, []
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        if ch == "," and depth == 0:
            segments.append("".join(current))
            current = []
        else:
            current.append(ch)
    segments.append("".join(current))
    return segments


def _parse_number(text: str, position: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise WaveformError(f"segment {position}: bad number {text!r}") from None
    if not math.isfinite(value):
        raise WaveformError(f"segment {position}: non-finite number {text!r}")
    return value


def parse_waveform(spec: str) -> Waveform:
    """Parse the waveform DSL; errors carry the offending segment index."""
    if not spec or not spec.strip():
        raise WaveformError("empty waveform specification")
    values: list[float] = []
    for position, segment in enumerate(_split_segments(spec)):
        if match := _REPEAT_RE.match(segment):
            value = _parse_number(match.group(1), position)
            count = int(match.group(2))
            if count <= 0:
                raise WaveformError(f"segment {position}: repeat count must be positive")
            values.extend([value] * count)
        elif match := _RAMP_RE.match(segment):
            start = _parse_number(match.group(1), position)
            stop = _parse_number(match.group(2), position)
            step = _parse_number(match.group(3), position)
            if step == 0:
                raise WaveformError(f"segment {position}: ramp step must be nonzero")
            if (stop - start) * step <= 0:
                raise WaveformError(
                    f"segment {position}: ramp from {start:g} toward {stop:g} "
                    f"is inconsistent with step {step:g}"
                )
            count = math.ceil((stop - start) / step)
            values.extend(start + step * k for k in range(count))
        else:
            raise WaveformError(f"segment {position}: cannot parse {segment.strip()!r}")
    return Waveform(np.array(values))


def waveform_sample(waveform: Waveform, t: int) -> float:
    """Waveform value at sample ``t``, extended periodically."""
    return float(waveform.samples[t % waveform.period])


class Plant:
    """First-order motor stand-in; single-owner mutable state.

    ``step`` advances the shaft one Euler step and returns the measured
    RPM: shaft speed minus the disturbance plus Gaussian noise.  One noise
    draw happens per step regardless of sigma, so paired runs with equal
    seeds stay aligned.
    """

    def __init__(
        self,
        ku: float,
        tau: float,
        noise_sigma: float = 0.0,
        seed: int = 0,
        omega0: float = 0.0,
    ):
        if not (ku > 0):
            raise InvalidInputError("ku must be positive")
        if not (tau > 0):
            raise InvalidInputError("tau must be positive")
        if noise_sigma < 0:
            raise InvalidInputError("noise_sigma must be non-negative")
        self.ku = float(ku)
        self.tau = float(tau)
        self.noise_sigma = float(noise_sigma)
        self.omega = float(omega0)
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def step(self, duty: float, disturbance_rpm: float, dt: float) -> float:
        if not math.isfinite(duty):
            raise InvalidInputError("duty must be finite")
        if not (dt > 0):
            raise InvalidInputError("dt must be positive")
        self.omega += (dt / self.tau) * (self.ku * duty - self.omega)
        noise = float(self._rng.normal(0.0, self.noise_sigma))
        return self.omega - disturbance_rpm + noise
