"""Acceleration traces and the shared pre-processing steps.

A trace is a timestamped series of 3-axis accelerometer samples, either in
raw ADC counts or, after calibration, in m/s^2.  Every downstream stage
(kinematics, detectors, feature extraction) consumes traces prepared by the
operations in this module: calibration, baseline centering and smoothing.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import (
    AlreadyCalibrated,
    DegenerateReadings,
    InvalidCalibration,
    TraceTooShort,
    WindowTooLarge,
)

GRAVITY = 9.81  # m/s^2

#: default length of the baseline window used for centering, ms
DEFAULT_BASELINE_MS = 100.0

#: default smoothing window, samples (odd)
DEFAULT_SMOOTH_WINDOW = 51

AXES = ("x", "y", "z")


class Sample(NamedTuple):
    t: float
    ax: float
    ay: float
    az: float


@dataclass
class Trace:
    """Ordered accelerometer samples at a nominally constant rate.

    ``t`` holds milliseconds since trace start, ``a`` is an (n, 3) array of
    per-axis acceleration: integer counts before calibration, m/s^2 after.
    Instances are treated as immutable values; operations return new traces.
    """

    t: np.ndarray
    a: np.ndarray
    sample_rate_hz: float = 1000.0
    calibrated: bool = False

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        a = np.asarray(self.a, dtype=np.float64)
        if t.ndim != 1 or a.ndim != 2 or a.shape != (t.size, 3):
            raise ValueError("trace requires t of shape (n,) and a of shape (n, 3)")
        if t.size == 0:
            raise ValueError("trace must contain at least one sample")
        if t[0] < 0:
            raise ValueError("timestamps must be non-negative")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise ValueError("timestamps must be strictly increasing")
            nominal = 1000.0 / self.sample_rate_hz
            if np.any(dt < 0.5 * nominal - 1e-9) or np.any(dt > 1.5 * nominal + 1e-9):
                raise ValueError(
                    "sample spacing outside +/-50%% of the nominal %.3f ms" % nominal
                )
        self.t = t
        self.a = a

    def __len__(self) -> int:
        return self.t.size

    @property
    def duration_ms(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def nominal_dt_ms(self) -> float:
        return 1000.0 / self.sample_rate_hz

    @property
    def samples(self) -> list[Sample]:
        return [Sample(float(t), *map(float, row)) for t, row in zip(self.t, self.a)]

    def amplitudes(self) -> np.ndarray:
        """Per-sample Euclidean norm of the acceleration vector."""
        return np.linalg.norm(self.a, axis=1)

    def with_acceleration(self, a: np.ndarray, calibrated: bool | None = None) -> "Trace":
        return Trace(
            t=self.t.copy(),
            a=a,
            sample_rate_hz=self.sample_rate_hz,
            calibrated=self.calibrated if calibrated is None else calibrated,
        )

    def slice_samples(self, start: int, end: int) -> "Trace":
        """Sub-trace covering sample indices start..end inclusive."""
        if not (0 <= start <= end < len(self)):
            raise IndexError("slice indices out of range")
        return Trace(
            t=self.t[start:end + 1].copy(),
            a=self.a[start:end + 1].copy(),
            sample_rate_hz=self.sample_rate_hz,
            calibrated=self.calibrated,
        )


@dataclass
class Calibration:
    """Affine counts -> m/s^2 map, one (offset, gain) pair per axis."""

    offset: np.ndarray  # counts
    gain: np.ndarray    # (m/s^2) per count

    def __post_init__(self):
        offset = np.asarray(self.offset, dtype=np.float64)
        gain = np.asarray(self.gain, dtype=np.float64)
        if offset.shape != (3,) or gain.shape != (3,):
            raise InvalidCalibration("offset and gain must each hold 3 axis values")
        if not np.all(np.isfinite(offset)):
            raise InvalidCalibration("offsets must be finite")
        if not np.all(np.isfinite(gain)) or np.any(gain == 0.0):
            raise InvalidCalibration("gains must be nonzero and finite")
        self.offset = offset
        self.gain = gain


@dataclass(frozen=True)
class SmoothingSpec:
    """Smoothing filter choice: kind is 'moving_average' or 'hanning'."""

    kind: str = "moving_average"
    window: int = DEFAULT_SMOOTH_WINDOW

    def __post_init__(self):
        if self.kind not in ("moving_average", "hanning"):
            raise ValueError(f"unknown smoothing kind {self.kind!r}")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("smoothing window must be an odd count >= 1")

    def weights(self) -> np.ndarray:
        """Normalized window weights summing to 1."""
        if self.window == 1:
            return np.ones(1)
        if self.kind == "moving_average":
            w = np.ones(self.window)
        else:
            # 0.5 - 0.5*cos(2*pi*n/(W-1)), zero at both ends
            w = np.hanning(self.window)
        return w / w.sum()


def amplitude(sample: Sample) -> float:
    """Euclidean norm of one sample's acceleration vector."""
    return float(np.sqrt(sample.ax ** 2 + sample.ay ** 2 + sample.az ** 2))


def derive_calibration(plus_g: Iterable[float], minus_g: Iterable[float]) -> Calibration:
    """Two-point calibration from +1 g and -1 g reference readings per axis.

    offset = midpoint of the two readings, gain = 2 g / (plus - minus).
    """
    plus = np.asarray(list(plus_g), dtype=np.float64)
    minus = np.asarray(list(minus_g), dtype=np.float64)
    if plus.shape != (3,) or minus.shape != (3,):
        raise DegenerateReadings("need one +1g and one -1g reading per axis")
    if np.any(plus == minus):
        raise DegenerateReadings("+1g and -1g readings coincide on an axis")
    offset = (plus + minus) / 2.0
    gain = 2.0 * GRAVITY / (plus - minus)
    return Calibration(offset=offset, gain=gain)


def calibrate(trace: Trace, cal: Calibration) -> Trace:
    """Map raw counts to m/s^2 as (raw - offset) * gain, axis by axis."""
    if trace.calibrated:
        raise AlreadyCalibrated("trace is already in m/s^2")
    if not np.all(np.isfinite(cal.gain)) or np.any(cal.gain == 0.0):
        raise InvalidCalibration("gains must be nonzero and finite")
    a = (trace.a - cal.offset) * cal.gain
    return trace.with_acceleration(a, calibrated=True)


def center_baseline(trace: Trace, baseline_ms: float = DEFAULT_BASELINE_MS) -> Trace:
    """Subtract the per-axis mean of the first baseline_ms from every sample.

    Zeroes the initial (gravity plus bias) level so that only the change from
    the start pose remains.  Requires a calibrated trace that spans at least
    the baseline window.
    """
    if not trace.calibrated:
        raise ValueError("baseline centering expects a calibrated trace")
    if baseline_ms <= 0:
        raise ValueError("baseline window must be positive")
    span = trace.duration_ms + trace.nominal_dt_ms
    if span < baseline_ms - 1e-9:
        raise TraceTooShort(
            f"trace spans {span:.1f} ms, baseline needs {baseline_ms:.1f} ms"
        )
    window = trace.t - trace.t[0] < baseline_ms
    mean = trace.a[window].mean(axis=0)
    return trace.with_acceleration(trace.a - mean)


def _mirror_extend(x: np.ndarray, pad: int) -> np.ndarray:
    # time-reversed reflection, boundary sample not repeated
    if pad == 0:
        return x
    return np.pad(x, pad, mode="reflect")


def smooth(trace: Trace, spec: SmoothingSpec | None = None) -> Trace:
    """Convolve each axis with the window weights, mirror-extended at the ends.

    The start and end are extended with the time-reversed signal so the
    window always sees real sample values; output length equals input length
    and constants pass through unchanged.
    """
    spec = spec or SmoothingSpec()
    n = len(trace)
    if spec.window > 2 * n - 1:
        raise WindowTooLarge(
            f"window {spec.window} exceeds mirror-extended length {2 * n - 1}"
        )
    if spec.window == 1:
        return trace.with_acceleration(trace.a.copy())
    w = spec.weights()
    pad = spec.window // 2
    out = np.empty_like(trace.a)
    for axis in range(3):
        ext = _mirror_extend(trace.a[:, axis], pad)
        out[:, axis] = np.convolve(ext, w, mode="valid")
    return trace.with_acceleration(out)


# -- trace and calibration files ---------------------------------------------
#
# Trace CSV:   comment "# unit=counts" or "# unit=ms2", header t_ms,ax,ay,az.
# Calibration: header axis,offset,gain and one row per axis x, y, z.

def write_trace_csv(trace: Trace, path: str | Path) -> None:
    unit = "ms2" if trace.calibrated else "counts"
    lines = [f"# unit={unit}", f"# sample_rate_hz={trace.sample_rate_hz:g}", "t_ms,ax,ay,az"]
    for t, (ax, ay, az) in zip(trace.t, trace.a):
        if trace.calibrated:
            lines.append(f"{t!r},{ax!r},{ay!r},{az!r}")
        else:
            lines.append(f"{t:g},{ax:g},{ay:g},{az:g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace_csv(path: str | Path) -> Trace:
    unit = None
    rate = 1000.0
    rows = []
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta = line[1:].strip()
            if meta.startswith("unit="):
                unit = meta[len("unit="):].strip()
            elif meta.startswith("sample_rate_hz="):
                rate = float(meta[len("sample_rate_hz="):])
            continue
        if line.lower().startswith("t_ms"):
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"{path}: expected 4 columns, got {len(parts)}")
        rows.append([float(p) for p in parts])
    if unit not in ("counts", "ms2"):
        raise ValueError(f"{path}: missing '# unit=counts' or '# unit=ms2' line")
    if not rows:
        raise ValueError(f"{path}: no samples")
    data = np.asarray(rows)
    return Trace(
        t=data[:, 0],
        a=data[:, 1:4],
        sample_rate_hz=rate,
        calibrated=unit == "ms2",
    )


def write_calibration_csv(cal: Calibration, path: str | Path) -> None:
    lines = ["axis,offset,gain"]
    for i, axis in enumerate(AXES):
        lines.append(f"{axis},{cal.offset[i]!r},{cal.gain[i]!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_calibration_csv(path: str | Path) -> Calibration:
    values: dict[str, tuple[float, float]] = {}
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#") or line.lower().startswith("axis"):
            continue
        axis, offset, gain = line.split(",")
        values[axis.strip()] = (float(offset), float(gain))
    missing = [axis for axis in AXES if axis not in values]
    if missing:
        raise ValueError(f"{path}: missing calibration rows for {missing}")
    return Calibration(
        offset=np.array([values[axis][0] for axis in AXES]),
        gain=np.array([values[axis][1] for axis in AXES]),
    )
