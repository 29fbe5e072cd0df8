"""Rotation recovery from static gravity and displacement from double integration.

Axis convention used throughout the package: up/down tilt (pitch) moves
gravity into the y axis, lateral tilt (roll) moves it into x, and the z axis
carries gravity when the device is level.  A negative z component means the
device is upside down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DynamicTail, NoGesture, TraceTooShort
from .signal import (
    DEFAULT_BASELINE_MS,
    DEFAULT_SMOOTH_WINDOW,
    GRAVITY,
    SmoothingSpec,
    Trace,
    center_baseline,
    smooth,
)

#: amplitude below which a segment is treated as gravity-only, m/s^2
STATIC_AMPLITUDE_LIMIT = 10.0

#: default residual-noise threshold for gesture bound detection, m/s^2
DEFAULT_NOISE_THRESHOLD = 0.4

#: default snap-to-zero threshold for integrated velocity, m/s
DEFAULT_ZERO_VELOCITY = 0.02

#: default averaging window for the final-rotation measurement, ms
DEFAULT_TAIL_MS = 50.0

#: tolerated deviation of the averaged tail amplitude from gravity, m/s^2
TAIL_AMPLITUDE_TOLERANCE = 2.0


@dataclass(frozen=True)
class RotationAngles:
    """Per-axis gravity angles in degrees, each within [-90, +90].

    y_deg is the up/down pitch, x_deg the lateral roll, and z_deg drops
    below zero when gravity points out of the screen (device inverted).
    """

    x_deg: float
    y_deg: float
    z_deg: float


@dataclass(frozen=True)
class GestureBounds:
    start_index: int
    end_index: int

    def __post_init__(self):
        if not (0 <= self.start_index < self.end_index):
            raise ValueError("bounds require 0 <= start < end")


@dataclass
class MotionPath:
    """Velocity and position series aligned to the source timestamps."""

    t: np.ndarray          # ms
    velocity: np.ndarray   # (n, 3) m/s
    position: np.ndarray   # (n, 3) m

    @property
    def displacement(self) -> np.ndarray:
        return self.position[-1].copy()


def is_static(segment: Trace) -> bool:
    """True when every sample amplitude stays below the gravity-only limit."""
    if not segment.calibrated:
        raise ValueError("static test expects a calibrated segment")
    return bool(np.all(segment.amplitudes() < STATIC_AMPLITUDE_LIMIT))


def final_rotation(trace: Trace, tail_ms: float = DEFAULT_TAIL_MS) -> RotationAngles:
    """Orientation of the averaged trace tail, from clamped arcsin per axis.

    Raises DynamicTail when the averaged tail amplitude strays more than
    TAIL_AMPLITUDE_TOLERANCE from gravity, i.e. the device was still moving.
    """
    if not trace.calibrated:
        raise ValueError("rotation recovery expects a calibrated trace")
    if tail_ms <= 0:
        raise ValueError("tail window must be positive")
    span = trace.duration_ms + trace.nominal_dt_ms
    if span < tail_ms - 1e-9:
        raise TraceTooShort(f"trace spans {span:.1f} ms, tail needs {tail_ms:.1f} ms")
    window = trace.t > trace.t[-1] - tail_ms
    mean = trace.a[window].mean(axis=0)
    if abs(np.linalg.norm(mean) - GRAVITY) > TAIL_AMPLITUDE_TOLERANCE:
        raise DynamicTail(
            f"averaged tail amplitude {np.linalg.norm(mean):.2f} m/s^2 is not gravity-only"
        )
    angles = np.degrees(np.arcsin(np.clip(mean / GRAVITY, -1.0, 1.0)))
    return RotationAngles(x_deg=float(angles[0]), y_deg=float(angles[1]), z_deg=float(angles[2]))


def _cumtrapz(y: np.ndarray, t_s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    dt = np.diff(t_s)[:, None]
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * dt, axis=0)
    return out


def integrate(segment: Trace, zero_velocity_threshold: float = DEFAULT_ZERO_VELOCITY) -> MotionPath:
    """Trapezoidal double integration of a centered, gravity-free segment.

    Velocities below the snap threshold are treated as exactly zero before
    the second integration so that residual noise does not accumulate into
    position drift.  Velocity and position start at zero.
    """
    if not segment.calibrated:
        raise ValueError("integration expects a calibrated segment")
    if zero_velocity_threshold < 0:
        raise ValueError("zero-velocity threshold must be non-negative")
    t_s = (segment.t - segment.t[0]) / 1000.0
    velocity = _cumtrapz(segment.a, t_s)
    snapped = np.where(np.abs(velocity) < zero_velocity_threshold, 0.0, velocity)
    position = _cumtrapz(snapped, t_s)
    return MotionPath(t=segment.t.copy(), velocity=velocity, position=position)


def detect_bounds(segment: Trace, noise_threshold: float = DEFAULT_NOISE_THRESHOLD) -> GestureBounds:
    """Bracket the gesture on the dominant axis of a centered, smoothed segment.

    The dominant axis is the one with the largest peak-to-peak range.  The
    bounds are the nearest samples below the noise threshold outside the
    global maximum and minimum of that axis.
    """
    if noise_threshold <= 0:
        raise ValueError("noise threshold must be positive")
    a = segment.a
    if not np.any(np.abs(a) > noise_threshold):
        raise NoGesture(f"no sample exceeds {noise_threshold} m/s^2 on any axis")
    dominant = int(np.argmax(a.max(axis=0) - a.min(axis=0)))
    x = a[:, dominant]
    i_max = int(np.argmax(x))
    i_min = int(np.argmin(x))
    first, last = min(i_max, i_min), max(i_max, i_min)

    below = np.abs(x) < noise_threshold
    start_candidates = np.nonzero(below[:first])[0]
    start = int(start_candidates[-1]) if start_candidates.size else 0
    end_candidates = np.nonzero(below[last + 1:])[0]
    end = int(last + 1 + end_candidates[0]) if end_candidates.size else len(segment) - 1
    if start == end:
        # single-sample degenerate bracket, widen to the neighboring sample
        end = min(end + 1, len(segment) - 1)
        start = max(start - 1, 0) if start == end else start
    return GestureBounds(start_index=start, end_index=end)


def _widen_to_rest(x: np.ndarray, bounds: GestureBounds) -> GestureBounds:
    # walk outwards while |x| keeps strictly decreasing, i.e. towards rest
    start, end = bounds.start_index, bounds.end_index
    mag = np.abs(x)
    while start > 0 and mag[start - 1] < mag[start]:
        start -= 1
    while end < len(x) - 1 and mag[end + 1] < mag[end]:
        end += 1
    return GestureBounds(start_index=start, end_index=end)


def gesture_displacement(
    trace: Trace,
    baseline_ms: float = DEFAULT_BASELINE_MS,
    smoothing: SmoothingSpec | None = None,
    noise_threshold: float = DEFAULT_NOISE_THRESHOLD,
    zero_velocity_threshold: float = DEFAULT_ZERO_VELOCITY,
) -> np.ndarray:
    """End-to-end displacement of the single gesture contained in a trace.

    Pipeline: baseline centering, smoothing, gesture bound detection, then
    double integration restricted to the detected gesture.  The detected
    bounds are widened outwards to the nearest rest samples before
    integrating; cutting exactly at the noise threshold would discard the
    slow build-up of the movement and bias slow gestures short.
    """
    smoothing = smoothing or SmoothingSpec("moving_average", DEFAULT_SMOOTH_WINDOW)
    centered = center_baseline(trace, baseline_ms)
    smoothed = smooth(centered, smoothing)
    bounds = detect_bounds(smoothed, noise_threshold)
    dominant = int(np.argmax(smoothed.a.max(axis=0) - smoothed.a.min(axis=0)))
    bounds = _widen_to_rest(smoothed.a[:, dominant], bounds)
    segment = smoothed.slice_samples(bounds.start_index, bounds.end_index)
    return integrate(segment, zero_velocity_threshold).displacement
