"""Synthetic gesture generator with analytic ground truth.

Movements follow a minimum-jerk point-to-point profile, the standard model
for reaching motions: position blends from 0 to the target displacement as
10*tau^3 - 15*tau^4 + 6*tau^5, which starts and ends with zero velocity and
zero acceleration.  Orientation is blended with the same quintic so angular
rate also vanishes at both ends.  The emitted acceleration is the analytic
second derivative plus gravity projected through the instantaneous
orientation plus optional seeded Gaussian noise, bracketed by rest padding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidSpec
from .signal import GRAVITY, Trace, write_trace_csv


@dataclass(frozen=True)
class GestureSpec:
    """Recipe for one synthetic gesture trace."""

    displacement: tuple[float, float, float] = (0.0, 0.0, 0.0)  # m
    duration_ms: float = 600.0
    start_orientation: tuple[float, float] = (0.0, 0.0)  # (pitch, roll) degrees
    end_orientation: tuple[float, float] = (0.0, 0.0)
    noise_sigma: float = 0.0  # m/s^2
    seed: int = 0
    lead_ms: float = 250.0
    trail_ms: float = 250.0

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise InvalidSpec("duration must be positive")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise sigma must be non-negative")
        if self.lead_ms < 0 or self.trail_ms < 0:
            raise InvalidSpec("rest padding must be non-negative")
        if len(self.displacement) != 3:
            raise InvalidSpec("displacement must have 3 components")


@dataclass(frozen=True)
class GroundTruth:
    """What the generator actually put into a trace."""

    displacement: tuple[float, float, float]
    pitch_end: float
    roll_end: float
    onset_index: int
    offset_index: int
    onset_ms: float
    offset_ms: float


def _quintic(tau: np.ndarray) -> np.ndarray:
    return 10 * tau ** 3 - 15 * tau ** 4 + 6 * tau ** 5


def _quintic_accel(tau: np.ndarray) -> np.ndarray:
    return 60 * tau - 180 * tau ** 2 + 120 * tau ** 3


def gravity_vector(pitch_deg: float | np.ndarray, roll_deg: float | np.ndarray) -> np.ndarray:
    """Gravity in the device frame for a given pitch/roll, shape (..., 3)."""
    p = np.radians(pitch_deg)
    r = np.radians(roll_deg)
    gx = GRAVITY * np.cos(p) * np.sin(r)
    gy = GRAVITY * np.sin(p) * np.ones_like(gx)
    gz = GRAVITY * np.cos(p) * np.cos(r)
    return np.stack(np.broadcast_arrays(gx, gy, gz), axis=-1)


def generate(spec: GestureSpec, sample_rate_hz: float = 1000.0) -> tuple[Trace, GroundTruth]:
    """Render a spec into a calibrated trace plus its ground truth record."""
    if sample_rate_hz <= 0:
        raise InvalidSpec("sample rate must be positive")
    dt_ms = 1000.0 / sample_rate_hz
    n_lead = int(round(spec.lead_ms / dt_ms))
    n_move = int(round(spec.duration_ms / dt_ms))
    n_trail = int(round(spec.trail_ms / dt_ms))
    if n_move < 2:
        raise InvalidSpec("duration too short for the sample rate")
    n = n_lead + n_move + n_trail + 1
    t = np.arange(n) * dt_ms

    duration_s = spec.duration_ms / 1000.0
    tau = np.clip((t - spec.lead_ms) / spec.duration_ms, 0.0, 1.0)

    delta = np.asarray(spec.displacement, dtype=np.float64)
    dynamic = np.outer(_quintic_accel(tau), delta / duration_s ** 2)
    dynamic[(tau <= 0.0) | (tau >= 1.0)] = 0.0

    blend = _quintic(tau)
    p0, r0 = spec.start_orientation
    p1, r1 = spec.end_orientation
    pitch = p0 + (p1 - p0) * blend
    roll = r0 + (r1 - r0) * blend
    a = dynamic + gravity_vector(pitch, roll)

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        a = a + rng.normal(0.0, spec.noise_sigma, size=a.shape)

    trace = Trace(t=t, a=a, sample_rate_hz=sample_rate_hz, calibrated=True)
    truth = GroundTruth(
        displacement=tuple(float(d) for d in delta),
        pitch_end=float(p1),
        roll_end=float(r1),
        onset_index=n_lead,
        offset_index=n_lead + n_move,
        onset_ms=float(t[n_lead]),
        offset_ms=float(t[n_lead + n_move]),
    )
    return trace, truth


def tilt_trace(
    direction: str,
    peak_deg: float,
    duration_ms: float = 600.0,
    noise_sigma: float = 0.0,
    seed: int = 0,
    lead_ms: float = 250.0,
    trail_ms: float = 250.0,
    sample_rate_hz: float = 1000.0,
) -> Trace:
    """Rotation-only trace that tilts to peak_deg and returns to level.

    direction 'up'/'down' drives pitch, 'left'/'right' drives roll; the
    angle follows the quintic blend out and back.
    """
    signs = {"up": ("pitch", 1.0), "down": ("pitch", -1.0),
             "right": ("roll", 1.0), "left": ("roll", -1.0)}
    if direction not in signs:
        raise InvalidSpec(f"unknown tilt direction {direction!r}")
    axis, sign = signs[direction]
    dt_ms = 1000.0 / sample_rate_hz
    n_lead = int(round(lead_ms / dt_ms))
    n_move = int(round(duration_ms / dt_ms))
    n_trail = int(round(trail_ms / dt_ms))
    n = n_lead + n_move + n_trail + 1
    t = np.arange(n) * dt_ms
    tau = np.clip((t - lead_ms) / duration_ms, 0.0, 1.0)
    # out-and-back: quintic blend up on [0, .5], back down on [.5, 1]
    out = _quintic(np.clip(2 * tau, 0, 1))
    back = 1.0 - _quintic(np.clip(2 * tau - 1, 0, 1))
    angle = sign * peak_deg * np.where(tau < 0.5, out, back)
    pitch = angle if axis == "pitch" else np.zeros_like(angle)
    roll = angle if axis == "roll" else np.zeros_like(angle)
    a = gravity_vector(pitch, roll)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        a = a + rng.normal(0.0, noise_sigma, size=a.shape)
    return Trace(t=t, a=a, sample_rate_hz=sample_rate_hz, calibrated=True)


#: gesture prototypes for the twelve stock body-part classes:
#: displacement from the chest in meters and final (pitch, roll) in degrees
DEFAULT_CLASS_PROTOTYPES: dict[str, GestureSpec] = {
    "Mouth": GestureSpec(displacement=(0.00, 0.28, 0.10), end_orientation=(10, 0), noise_sigma=0.05),
    "Chest": GestureSpec(displacement=(0.00, 0.00, 0.08), end_orientation=(0, 0), noise_sigma=0.05),
    "Elbow": GestureSpec(displacement=(-0.30, -0.05, 0.06), end_orientation=(0, 25), noise_sigma=0.05),
    "Navel": GestureSpec(displacement=(0.00, -0.30, 0.05), end_orientation=(0, 0), noise_sigma=0.05),
    "Neck": GestureSpec(displacement=(0.00, 0.20, 0.12), end_orientation=(-55, 0), noise_sigma=0.05),
    "Head": GestureSpec(displacement=(0.00, 0.45, 0.05), end_orientation=(15, 0), noise_sigma=0.05),
    "Back": GestureSpec(displacement=(0.15, -0.25, -0.30), end_orientation=(-20, -60), noise_sigma=0.05),
    "Ear": GestureSpec(displacement=(0.14, 0.36, 0.14), end_orientation=(55, 15), noise_sigma=0.05),
    "Hip": GestureSpec(displacement=(0.18, -0.45, 0.02), end_orientation=(0, 20), noise_sigma=0.05),
    "Leg": GestureSpec(displacement=(0.10, -0.75, 0.00), end_orientation=(-60, 0), noise_sigma=0.05),
    "Wrist": GestureSpec(displacement=(-0.28, -0.18, 0.05), end_orientation=(60, 10), noise_sigma=0.05),
    "Eye": GestureSpec(displacement=(0.04, 0.30, 0.08), end_orientation=(60, 0), noise_sigma=0.05),
}


@dataclass(frozen=True)
class CorpusItem:
    label: str
    trace: Trace
    truth: GroundTruth


def corpus(
    classes: Sequence[tuple[str, GestureSpec]],
    n_per_class: int,
    jitter: float = 0.0,
    seed: int = 0,
    orientation_jitter_deg: float = 4.0,
) -> list[CorpusItem]:
    """Labeled trace corpus with seeded per-trace jitter on each prototype.

    Displacement receives Gaussian jitter per axis, the end orientation
    Gaussian jitter in degrees; the whole corpus is a pure function of the
    seed.
    """
    if n_per_class < 1:
        raise InvalidSpec("need at least one trace per class")
    if jitter < 0:
        raise InvalidSpec("jitter must be non-negative")
    root = np.random.SeedSequence(seed)
    items: list[CorpusItem] = []
    for class_seq, (label, proto) in zip(root.spawn(len(classes)), classes):
        for trace_seq in class_seq.spawn(n_per_class):
            rng = np.random.default_rng(trace_seq)
            delta = np.asarray(proto.displacement) + rng.normal(0.0, jitter, 3)
            pitch = proto.end_orientation[0] + rng.normal(0.0, orientation_jitter_deg)
            roll = proto.end_orientation[1] + rng.normal(0.0, orientation_jitter_deg)
            noise_seed = int(rng.integers(0, 2 ** 31 - 1))
            spec = replace(
                proto,
                displacement=tuple(delta),
                end_orientation=(pitch, roll),
                seed=noise_seed,
            )
            trace, truth = generate(spec)
            items.append(CorpusItem(label=label, trace=trace, truth=truth))
    return items


def write_corpus(items: Iterable[CorpusItem], out_dir: str | Path) -> Path:
    """Write one trace CSV per item plus the ground-truth sidecar CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sidecar = out / "ground_truth.csv"
    with open(sidecar, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file", "label", "dx", "dy", "dz",
                         "pitch_end", "roll_end", "onset_ms", "offset_ms"])
        for i, item in enumerate(items):
            name = f"{item.label.lower()}_{i:04d}.csv"
            write_trace_csv(item.trace, out / name)
            writer.writerow([
                name, item.label,
                repr(item.truth.displacement[0]),
                repr(item.truth.displacement[1]),
                repr(item.truth.displacement[2]),
                repr(item.truth.pitch_end), repr(item.truth.roll_end),
                repr(item.truth.onset_ms), repr(item.truth.offset_ms),
            ])
    return sidecar
