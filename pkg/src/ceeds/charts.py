"""Static SVG charts for experiment logs.

Hand-rolled SVG keeps the output byte-deterministic for a given log (no
plotting framework, no font metrics, no timestamps), which matters
because repeated runs of the same seed must reproduce their artifacts
exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import CeedsIOError
from .experiment import ChosenCycle, ExperimentLog

WIDTH = 960
HEIGHT = 480
MARGIN_LEFT = 64
MARGIN_RIGHT = 24
MARGIN_TOP = 40
MARGIN_BOTTOM = 48

BASELINE_COLOR = "#9aa0a6"
CEEDS_COLOR = "#1a73e8"
MARKER_COLOR = "#d93025"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    magnitude = 10 ** np.floor(np.log10(raw))
    for mult in (1, 2, 5, 10):
        step = mult * magnitude
        if step >= raw:
            break
    first = np.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * step:
        ticks.append(float(value))
        value += step
    return ticks


class _Chart:
    def __init__(self, title: str, x_label: str, y_label: str):
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            '<rect width="100%" height="100%" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_escape(title)}</text>',
        ]
        self.x_label = x_label
        self.y_label = y_label
        self.x_range = (0.0, 1.0)
        self.y_range = (0.0, 1.0)

    def set_ranges(self, xs: np.ndarray, ys_list: list[np.ndarray]):
        x_lo, x_hi = float(xs.min()), float(xs.max())
        y_lo = min(float(ys.min()) for ys in ys_list)
        y_hi = max(float(ys.max()) for ys in ys_list)
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        pad = 0.05 * (y_hi - y_lo)
        self.x_range = (x_lo, x_hi if x_hi > x_lo else x_lo + 1.0)
        self.y_range = (y_lo - pad, y_hi + pad)

    def _x_px(self, x: float) -> float:
        lo, hi = self.x_range
        return MARGIN_LEFT + (x - lo) / (hi - lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)

    def _y_px(self, y: float) -> float:
        lo, hi = self.y_range
        return HEIGHT - MARGIN_BOTTOM - (y - lo) / (hi - lo) * (
            HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        )

    def axes(self):
        left, right = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
        top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
        for tick in _nice_ticks(*self.y_range):
            y = self._y_px(tick)
            self.parts.append(
                f'<line x1="{left}" y1="{y:.2f}" x2="{right}" y2="{y:.2f}" '
                f'stroke="#e0e0e0" stroke-width="1"/>'
            )
            self.parts.append(
                f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{tick:g}</text>'
            )
        for tick in _nice_ticks(*self.x_range):
            x = self._x_px(tick)
            self.parts.append(
                f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" '
                f'stroke="#000000" stroke-width="1"/>'
            )
            self.parts.append(
                f'<text x="{x:.2f}" y="{bottom + 20}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">{tick:g}</text>'
            )
        self.parts.append(
            f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" '
            f'stroke="#000000" stroke-width="1.5"/>'
        )
        self.parts.append(
            f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" '
            f'stroke="#000000" stroke-width="1.5"/>'
        )
        self.parts.append(
            f'<text x="{(left + right) / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_escape(self.x_label)}</text>'
        )
        self.parts.append(
            f'<text x="16" y="{(top + bottom) / 2:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 16 {(top + bottom) / 2:.0f})">'
            f"{_escape(self.y_label)}</text>"
        )

    def polyline(self, xs: np.ndarray, ys: np.ndarray, color: str, width: float = 1.2):
        points = " ".join(
            f"{self._x_px(float(x)):.2f},{self._y_px(float(y)):.2f}"
            for x, y in zip(xs, ys)
        )
        self.parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'points="{points}"/>'
        )

    def vline(self, x: float, color: str, label: str):
        px = self._x_px(x)
        self.parts.append(
            f'<line x1="{px:.2f}" y1="{MARGIN_TOP}" x2="{px:.2f}" '
            f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="{color}" stroke-width="1.2" '
            f'stroke-dasharray="5,4"/>'
        )
        self.parts.append(
            f'<text x="{px + 4:.2f}" y="{MARGIN_TOP + 12}" font-family="sans-serif" '
            f'font-size="11" fill="{color}">{_escape(label)}</text>'
        )

    def legend(self, entries: list[tuple[str, str]]):
        x = WIDTH - MARGIN_RIGHT - 180
        y = MARGIN_TOP + 8
        for i, (label, color) in enumerate(entries):
            ly = y + i * 18
            self.parts.append(
                f'<line x1="{x}" y1="{ly}" x2="{x + 24}" y2="{ly}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            self.parts.append(
                f'<text x="{x + 30}" y="{ly + 4}" font-family="sans-serif" '
                f'font-size="12">{_escape(label)}</text>'
            )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def error_overlay_svg(baseline: ExperimentLog, ceeds: ExperimentLog) -> str:
    """Baseline vs cancellation error traces with a cutoff marker."""
    chart = _Chart("Error vs sample index", "sample index", "error (RPM)")
    xs = baseline.sample_index.astype(float)
    chart.set_ranges(xs, [baseline.error, ceeds.error])
    chart.axes()
    cutoff = int(baseline.header.get("analysis_cutoff", 0))
    if 0 < cutoff < len(baseline):
        chart.vline(float(cutoff), MARKER_COLOR, f"analysis cutoff ({cutoff})")
    chart.polyline(xs, baseline.error, BASELINE_COLOR)
    chart.polyline(xs, ceeds.error, CEEDS_COLOR)
    chart.legend([("baseline (km=0)", BASELINE_COLOR), ("with cancellation", CEEDS_COLOR)])
    return chart.render()


def cancellation_cycle_svg(chosen: ChosenCycle | None) -> str:
    """The chosen cancellation cycle, zero padding included."""
    if chosen is None:
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            '<rect width="100%" height="100%" fill="#ffffff"/>\n'
            f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
            'font-family="sans-serif" font-size="18">no cancellation candidate'
            "</text>\n</svg>\n"
        )
    values = np.array(chosen.cycle_values)
    xs = np.arange(values.size, dtype=float)
    chart = _Chart(
        f"Cancellation cycle (period {chosen.modal_period}, offset {chosen.offset}, "
        f"rank {chosen.source_rank})",
        "in-cycle sample",
        "cancellation (RPM)",
    )
    chart.set_ranges(xs, [values, np.zeros(1)])
    chart.axes()
    zero_y = chart._y_px(0.0)
    chart.parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{zero_y:.2f}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{zero_y:.2f}" stroke="#bdbdbd" stroke-width="1"/>'
    )
    chart.polyline(xs, values, CEEDS_COLOR, width=1.6)
    return chart.render()


def render_plots(
    baseline: ExperimentLog,
    ceeds: ExperimentLog,
    chosen: ChosenCycle | None,
    output_dir,
) -> list[Path]:
    """Write the error overlay and cancellation-cycle SVGs; returns paths."""
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        overlay = out / "error_overlay.svg"
        overlay.write_text(error_overlay_svg(baseline, ceeds))
        cycle = out / "cancellation_cycle.svg"
        cycle.write_text(cancellation_cycle_svg(chosen))
    except OSError as exc:
        raise CeedsIOError(f"cannot write plots under {out}: {exc}") from exc
    return [overlay, cycle]
