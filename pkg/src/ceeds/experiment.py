"""Experiment orchestration: paired baseline/cancellation runs.

Every experiment simulates the same closed loop twice on identical
interference and identical noise draws — once with the cancellation gain
``km`` forced to zero (the PIDF baseline) and once with the configured
``km`` — so the cancellation path is the only difference between the two
logs.  The headline metric is the percentage reduction of the absolute
error sum from a given sample onward.

Simulated time is logical: the loop cadence defines the index-to-time
mapping (``time_ms = sample_index * loop_ms``) but runs complete as fast
as the CPU allows unless ``realtime`` sleeping is requested.
"""

from __future__ import annotations

import dataclasses
import io
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cancellation import CancellationCycle
from .control import CeedsController, PidGains, TransferFunction
from .errors import CeedsIOError, ConfigError, InvalidInputError, UndefinedMetricError
from .motif import AnalysisConfig
from .plant import GENERATOR_NAME, Plant, Waveform, parse_waveform, waveform_sample

STARTUP_REFERENCE_SAMPLE = 55

CSV_COLUMNS = (
    "sample_index",
    "time_ms",
    "phase",
    "setpoint_rpm",
    "measured_rpm",
    "error",
    "duty",
    "interference_rpm",
    "cancellation_rpm",
)


@dataclass
class ExperimentConfig:
    """Flat bag of every knob an experiment run needs.

    Defaults reproduce the square-wave trial: 50 ms loop, 35-sample
    analysis window, 600-sample collection cutoff, five candidate motifs.
    """

    waveform_spec: str = "0*60,50*20"
    setpoint_rpm: float = 400.0
    kp: float = 0.4
    ki: float = 0.4
    kd: float = 0.0
    integral_limit: float = 800.0
    km: float = 1.2
    window_length: int = 35
    motif_count: int = 5
    radius_factor: float = 2.0
    min_amplitude: float = 0.0
    analysis_cutoff: int = 600
    hold_samples: int = 40
    total_samples: int = 1200
    loop_ms: int = 50
    ku: float = 2.0
    tau: float = 0.25
    noise_sigma: float = 2.0
    duty_max: float = 400.0
    seed: int = 0
    output_dir: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.loop_ms <= 0:
            raise ConfigError("loop_ms must be positive")
        if self.total_samples <= self.analysis_cutoff + self.hold_samples:
            raise ConfigError(
                "total_samples must exceed analysis_cutoff + hold_samples"
            )
        if self.analysis_cutoff <= self.window_length:
            raise ConfigError("analysis_cutoff must exceed window_length")
        if self.setpoint_rpm <= 0:
            raise ConfigError("setpoint_rpm must be positive")
        if self.ku <= 0 or self.tau <= 0:
            raise ConfigError("plant ku and tau must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be non-negative")
        if self.duty_max <= 0:
            raise ConfigError("duty_max must be positive")
        if self.hold_samples < 0:
            raise ConfigError("hold_samples must be non-negative")
        # Delegate analysis-parameter checks to AnalysisConfig.
        self.analysis_config()
        return self

    def analysis_config(self) -> AnalysisConfig:
        try:
            return AnalysisConfig(
                window_length=self.window_length,
                motif_count=self.motif_count,
                radius_factor=self.radius_factor,
                min_amplitude=self.min_amplitude,
                analysis_cutoff=self.analysis_cutoff,
            )
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from exc

    def gains(self) -> PidGains:
        return PidGains(self.kp, self.ki, self.kd, self.integral_limit)

    def transfer(self) -> TransferFunction:
        return TransferFunction(slope=self.ku, intercept=0.0, duty_max=self.duty_max)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        config = cls()
        return config.with_overrides(mapping)

    def with_overrides(self, mapping: dict) -> "ExperimentConfig":
        fields = {f.name: f for f in dataclasses.fields(self)}
        changes = {}
        for key, raw in mapping.items():
            if key not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            changes[key] = _coerce(key, raw, type(getattr(self, key)))
        return self.replace(**changes)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls().with_file(path)

    def with_file(self, path) -> "ExperimentConfig":
        mapping = {}
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = stripped.partition("=")
            mapping[key.strip()] = value.strip()
        return self.with_overrides(mapping)


def _coerce(key: str, raw, target_type):
    if raw is None:
        return None
    if isinstance(raw, str):
        if key in ("waveform_spec", "output_dir"):
            return raw
        try:
            if target_type is int:
                return int(raw)
            if target_type is float:
                return float(raw)
        except ValueError:
            raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from None
        return raw
    if target_type is int and isinstance(raw, (int, np.integer)):
        return int(raw)
    if target_type is float and isinstance(raw, (int, float, np.floating)):
        return float(raw)
    return raw


@dataclass(frozen=True)
class ChosenCycle:
    """Flat record of the cancellation cycle a run settled on."""

    cycle_values: tuple[float, ...]
    offset: int
    modal_period: int
    source_rank: int

    @classmethod
    def from_cycle(cls, cycle: CancellationCycle) -> "ChosenCycle":
        return cls(
            cycle_values=tuple(float(v) for v in cycle.cycle_values),
            offset=cycle.offset,
            modal_period=cycle.modal_period,
            source_rank=cycle.source_rank,
        )


@dataclass
class ExperimentLog:
    """Column-oriented per-sample record of one run."""

    header: dict
    sample_index: np.ndarray
    time_ms: np.ndarray
    phase: list[str]
    setpoint_rpm: np.ndarray
    measured_rpm: np.ndarray
    error: np.ndarray
    duty: np.ndarray
    interference_rpm: np.ndarray
    cancellation_rpm: np.ndarray
    chosen: ChosenCycle | None = None

    def __len__(self) -> int:
        return self.sample_index.size


def _run_single(
    config: ExperimentConfig, km: float, waveform: Waveform, realtime: bool
) -> ExperimentLog:
    dt = config.loop_ms / 1000.0
    plant = Plant(config.ku, config.tau, config.noise_sigma, seed=config.seed)
    controller = CeedsController(
        gains=config.gains(),
        km=km,
        transfer=config.transfer(),
        setpoint_rpm=config.setpoint_rpm,
        analysis=config.analysis_config(),
        hold_samples=config.hold_samples,
        sample_period_ms=config.loop_ms,
    )

    n = config.total_samples
    measured = np.empty(n)
    duty_col = np.empty(n)
    interference = np.empty(n)
    cancellation = np.empty(n)
    phases: list[str] = []

    duty = 0.0
    for t in range(n):
        disturbance = waveform_sample(waveform, t)
        rpm = plant.step(duty, disturbance, dt)
        duty = controller.step(rpm, t, dt)
        measured[t] = rpm
        duty_col[t] = duty
        interference[t] = disturbance
        cancellation[t] = controller.last_cancellation_rpm
        phases.append(controller.last_phase.value)
        if realtime:
            time.sleep(config.loop_ms / 1000.0)

    indices = np.arange(n, dtype=np.int64)
    header = dict(config.as_dict())
    header["km"] = km
    header.pop("output_dir", None)
    header["generator"] = GENERATOR_NAME
    chosen = (
        ChosenCycle.from_cycle(controller.chosen) if controller.chosen is not None else None
    )
    return ExperimentLog(
        header=header,
        sample_index=indices,
        time_ms=indices * config.loop_ms,
        phase=phases,
        setpoint_rpm=np.full(n, config.setpoint_rpm),
        measured_rpm=measured,
        error=measured - config.setpoint_rpm,
        duty=duty_col,
        interference_rpm=interference,
        cancellation_rpm=cancellation,
        chosen=chosen,
    )


def run_experiment(
    config: ExperimentConfig, realtime: bool = False
) -> tuple[ExperimentLog, ExperimentLog]:
    """Run the paired baseline (km = 0) and cancellation trials.

    Both runs draw their measurement noise from identically seeded
    generators and see the same interference stream; only the
    cancellation gain differs.
    """
    config.validate()
    waveform = parse_waveform(config.waveform_spec)
    baseline = _run_single(config, km=0.0, waveform=waveform, realtime=realtime)
    ceeds = _run_single(config, km=config.km, waveform=waveform, realtime=realtime)
    return baseline, ceeds


def error_reduction(
    baseline: ExperimentLog, ceeds: ExperimentLog, from_sample: int
) -> float:
    """Percentage reduction of the absolute error sum from a sample on.

    Negative values mean the cancellation run made things worse.
    """
    if len(baseline) != len(ceeds):
        raise InvalidInputError("logs must have equal length")
    if not (0 <= from_sample < len(baseline)):
        raise InvalidInputError(f"from_sample {from_sample} out of range")
    base_sum = float(np.abs(baseline.error[from_sample:]).sum())
    ceeds_sum = float(np.abs(ceeds.error[from_sample:]).sum())
    if base_sum == 0.0:
        raise UndefinedMetricError("baseline absolute error sum is zero")
    return 100.0 * (1.0 - ceeds_sum / base_sum)


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def render_csv(log: ExperimentLog) -> str:
    """Deterministic CSV text: '#'-prefixed header echo, then rows."""
    out = io.StringIO()
    for key in sorted(log.header):
        out.write(f"# {key}={_format_value(log.header[key])}\n")
    if log.chosen is not None:
        out.write(f"# chosen_offset={log.chosen.offset}\n")
        out.write(f"# chosen_modal_period={log.chosen.modal_period}\n")
        out.write(f"# chosen_source_rank={log.chosen.source_rank}\n")
        values = ";".join(f"{v:.6g}" for v in log.chosen.cycle_values)
        out.write(f"# chosen_cycle_values={values}\n")
    out.write(",".join(CSV_COLUMNS) + "\n")
    for i in range(len(log)):
        row = (
            str(int(log.sample_index[i])),
            str(int(log.time_ms[i])),
            log.phase[i],
            f"{log.setpoint_rpm[i]:.6g}",
            f"{log.measured_rpm[i]:.6g}",
            f"{log.error[i]:.6g}",
            f"{log.duty[i]:.6g}",
            f"{log.interference_rpm[i]:.6g}",
            f"{log.cancellation_rpm[i]:.6g}",
        )
        out.write(",".join(row) + "\n")
    return out.getvalue()


def write_csv(log: ExperimentLog, path) -> Path:
    """Write :func:`render_csv` output to ``path``; returns the path."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_csv(log))
    except OSError as exc:
        raise CeedsIOError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv_errors(path) -> np.ndarray:
    """Error column of a log CSV (for metric cross-checks)."""
    errors = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("sample_index"):
                continue
            parts = line.rstrip("\n").split(",")
            errors.append(float(parts[5]))
    return np.array(errors)
