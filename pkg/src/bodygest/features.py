"""Feature extraction and the two gesture classifiers.

Each gesture is reduced to 12 statistics of its centered, Hanning-smoothed
trace: per-axis extrema, per-axis final values (the final-rotation proxies)
and the amplitude extrema and mean.  Classification is either a
Gaussian-weighted k-nearest-neighbours vote on z-scored features or a
Gaussian Naive Bayes with per-class feature densities; both emit a top-3
ranking with normalized confidences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyTrainingSet, TraceTooShort
from .signal import (
    DEFAULT_BASELINE_MS,
    DEFAULT_SMOOTH_WINDOW,
    SmoothingSpec,
    Trace,
    center_baseline,
    smooth,
)

FEATURE_COLUMNS = (
    "max_x", "min_x", "max_y", "min_y", "max_z", "min_z",
    "final_x", "final_y", "final_z", "amp_max", "amp_min", "amp_mean",
)

#: kNN neighbourhood size used when a pooled training set is available
POLICY_K = 50

#: relative and absolute floors for per-class feature variance
VARIANCE_FLOOR_REL = 1e-6
VARIANCE_FLOOR_ABS = 1e-12

#: a ranking is an ordered list of (label, confidence) pairs
Ranking = list[tuple[str, float]]


@dataclass
class FeatureVector:
    max_x: float
    min_x: float
    max_y: float
    min_y: float
    max_z: float
    min_z: float
    final_x: float
    final_y: float
    final_z: float
    amp_max: float
    amp_min: float
    amp_mean: float
    label: str | None = None

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_COLUMNS])

    @classmethod
    def from_array(cls, values: Sequence[float], label: str | None = None) -> "FeatureVector":
        if len(values) != len(FEATURE_COLUMNS):
            raise ValueError(f"expected {len(FEATURE_COLUMNS)} feature values")
        return cls(*[float(v) for v in values], label=label)


def extract_features(
    trace: Trace,
    baseline_ms: float = DEFAULT_BASELINE_MS,
    window: int = DEFAULT_SMOOTH_WINDOW,
    label: str | None = None,
) -> FeatureVector:
    """The 12 gesture statistics of a calibrated single-gesture trace.

    The trace is centered on its baseline and Hanning-smoothed before any
    statistic is computed; amplitudes are taken on the smoothed signal.
    """
    if len(trace) < window:
        raise TraceTooShort(f"trace of {len(trace)} samples needs >= {window}")
    centered = center_baseline(trace, baseline_ms)
    smoothed = smooth(centered, SmoothingSpec("hanning", window))
    a = smoothed.a
    amp = smoothed.amplitudes()
    return FeatureVector(
        max_x=float(a[:, 0].max()), min_x=float(a[:, 0].min()),
        max_y=float(a[:, 1].max()), min_y=float(a[:, 1].min()),
        max_z=float(a[:, 2].max()), min_z=float(a[:, 2].min()),
        final_x=float(a[-1, 0]), final_y=float(a[-1, 1]), final_z=float(a[-1, 2]),
        amp_max=float(amp.max()), amp_min=float(amp.min()), amp_mean=float(amp.mean()),
        label=label,
    )


@dataclass
class TrainingSet:
    """Labeled feature rows plus the ordered class universe."""

    rows: list[FeatureVector]
    classes: list[str] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if not row.label:
                raise ValueError("every training row must be labeled")
        seen: list[str] = []
        for row in self.rows:
            if row.label not in seen:
                seen.append(row.label)
        if not self.classes:
            self.classes = seen
        else:
            missing = [c for c in self.classes if c not in seen]
            if missing:
                raise ValueError(f"declared classes without rows: {missing}")
            extra = [c for c in seen if c not in self.classes]
            if extra:
                raise ValueError(f"rows with undeclared classes: {extra}")

    def __len__(self) -> int:
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        return np.array([row.as_array() for row in self.rows])

    def labels(self) -> list[str]:
        return [row.label for row in self.rows]

    def merged_with(self, other: "TrainingSet | None") -> "TrainingSet":
        if other is None or not other.rows:
            return self
        return TrainingSet(rows=self.rows + other.rows)

    def without_row(self, index: int) -> "TrainingSet":
        rows = self.rows[:index] + self.rows[index + 1:]
        return TrainingSet(rows=rows)


def _zscore_stats(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return mean, std


def _top3(confidences: dict[str, float], class_order: Sequence[str]) -> Ranking:
    index = {c: i for i, c in enumerate(class_order)}
    ordered = sorted(confidences.items(), key=lambda kv: (-kv[1], index[kv[0]]))
    return [(label, float(conf)) for label, conf in ordered[: min(3, len(class_order))]]


def knn_classify(q: FeatureVector, ts: TrainingSet, k: int) -> Ranking:
    """Gaussian-weighted kNN ranking on z-score-normalized features.

    Neighbour weights are exp(-d^2 / (2 sigma^2)) with sigma the distance of
    the k-th neighbour, so far neighbours count for less; per-class
    confidence is the class share of the total weight.
    """
    if not ts.rows:
        raise EmptyTrainingSet("kNN needs at least one training row")
    if k < 1:
        raise ValueError("k must be >= 1")
    matrix = ts.matrix()
    mean, std = _zscore_stats(matrix)
    z = (matrix - mean) / std
    zq = (q.as_array() - mean) / std
    dist = np.linalg.norm(z - zq, axis=1)
    order = np.argsort(dist, kind="stable")  # ties fall back to row order
    k_eff = min(k, len(ts.rows))
    picked = order[:k_eff]
    sigma = float(dist[picked[-1]])
    if sigma == 0.0:
        sigma = 1e-9
    weights = np.exp(-dist[picked] ** 2 / (2.0 * sigma ** 2))
    total = float(weights.sum())
    confidences = {c: 0.0 for c in ts.classes}
    labels = ts.labels()
    for idx, w in zip(picked, weights):
        confidences[labels[idx]] += float(w) / total
    return _top3(confidences, ts.classes)


def bayes_classify(q: FeatureVector, ts: TrainingSet) -> Ranking:
    """Gaussian Naive Bayes ranking with relative-frequency priors.

    Per-class feature variances are floored at a small fraction of the
    pooled feature variance so single-sample classes stay usable; the
    posterior is accumulated in the log domain and normalized to sum 1.
    """
    if not ts.rows:
        raise EmptyTrainingSet("Naive Bayes needs at least one training row")
    matrix = ts.matrix()
    labels = np.array(ts.labels())
    pooled_var = matrix.var(axis=0)
    floor = np.maximum(VARIANCE_FLOOR_REL * pooled_var, VARIANCE_FLOOR_ABS)
    x = q.as_array()
    log_post = []
    for cls in ts.classes:
        rows = matrix[labels == cls]
        prior = rows.shape[0] / matrix.shape[0]
        var = np.maximum(rows.var(axis=0), floor)
        mean = rows.mean(axis=0)
        log_lik = -0.5 * np.sum(np.log(2.0 * math.pi * var) + (x - mean) ** 2 / var)
        log_post.append(math.log(prior) + log_lik)
    log_post = np.array(log_post)
    post = np.exp(log_post - log_post.max())
    post /= post.sum()
    confidences = dict(zip(ts.classes, post))
    return _top3(confidences, ts.classes)


def classify_policy(
    q: FeatureVector,
    user_ts: TrainingSet | None = None,
    pooled_ts: TrainingSet | None = None,
    k: int = POLICY_K,
) -> Ranking:
    """Classifier choice of the final pipeline.

    With a pooled training set available (user rows appended when present)
    the Gaussian-weighted kNN is used; with only user training data the
    Naive Bayes is the better fit for few samples per class.
    """
    pooled_present = pooled_ts is not None and len(pooled_ts.rows) > 0
    user_present = user_ts is not None and len(user_ts.rows) > 0
    if pooled_present:
        combined = pooled_ts.merged_with(user_ts if user_present else None)
        return knn_classify(q, combined, k)
    if user_present:
        return bayes_classify(q, user_ts)
    raise EmptyTrainingSet("no training data available")


# -- training-set files ---------------------------------------------------------

TRAINING_HEADER = ",".join(FEATURE_COLUMNS + ("label",))


def write_training_csv(ts: TrainingSet, path: str | Path) -> None:
    lines = [TRAINING_HEADER]
    for row in ts.rows:
        values = ",".join(repr(float(v)) for v in row.as_array())
        lines.append(f"{values},{row.label}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_training_csv(path: str | Path) -> TrainingSet:
    rows = []
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("max_x,"):
            continue
        parts = line.split(",")
        if len(parts) != len(FEATURE_COLUMNS) + 1:
            raise ValueError(f"{path}: expected {len(FEATURE_COLUMNS) + 1} columns")
        rows.append(FeatureVector.from_array([float(p) for p in parts[:-1]], label=parts[-1]))
    if not rows:
        raise ValueError(f"{path}: no training rows")
    return TrainingSet(rows=rows)
