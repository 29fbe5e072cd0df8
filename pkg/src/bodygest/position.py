"""Position-based gesture classification.

A gesture is summarized by the endpoint of its integrated displacement and
the rotation class of its final orientation; classification finds the
nearest stored endpoint among templates sharing that rotation class.
Default templates were measured once on a 1.80 m reference pose and are
rescaled to the user with the eight-head proportionality rule.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyLabel, InvalidHeight
from .kinematics import RotationAngles

#: reach bound for template endpoints, m
MAX_REACH = 1.5

ROTATION_CLASSES = (1, 2, 3, 4, 5, 6)


def rotation_class_of(angles: RotationAngles) -> int:
    """Quantize a final orientation into one of six 90-degree sectors.

    Class 1 is minimal rotation; 2/3 are strong up/down pitch, 4/5 strong
    lateral roll, 6 is the device upside down.  Boundaries at exactly 45
    degrees fall to the lower class id.
    """
    pitch = angles.y_deg
    roll = angles.x_deg
    if pitch > 45.0:
        return 2
    if pitch < -45.0:
        return 3
    if roll > 45.0:
        return 4
    if roll < -45.0:
        return 5
    if angles.z_deg < 0.0:
        return 6
    return 1


@dataclass(frozen=True)
class GestureTemplate:
    label: str
    endpoint: tuple[float, float, float]  # m, relative to the chest start
    rotation_class: int

    def __post_init__(self):
        if self.rotation_class not in ROTATION_CLASSES:
            raise ValueError(f"rotation class must be 1..6, got {self.rotation_class}")
        vec = np.asarray(self.endpoint, dtype=np.float64)
        if vec.shape != (3,) or not np.all(np.isfinite(vec)):
            raise ValueError("endpoint must be a finite 3-vector")
        if np.linalg.norm(vec) > MAX_REACH:
            raise ValueError(f"endpoint beyond arm's reach ({MAX_REACH} m)")


@dataclass(frozen=True)
class BodyModel:
    model_height: float  # m
    templates: tuple[GestureTemplate, ...]

    def __post_init__(self):
        if self.model_height <= 0:
            raise ValueError("model height must be positive")
        labels = [t.label for t in self.templates]
        if len(set(labels)) != len(labels):
            raise ValueError("template labels must be unique")
        object.__setattr__(self, "templates", tuple(self.templates))


@dataclass(frozen=True)
class PersonalGesture:
    label: str
    centroid: tuple[float, float, float]
    rotation_class: int
    training_count: int


@dataclass(frozen=True)
class PersonalGestureSet:
    gestures: tuple[PersonalGesture, ...]


def scale_templates(model: BodyModel, user_height: float) -> BodyModel:
    """Rescale every endpoint by user_height / model_height (eight-head rule)."""
    if not (0.0 < user_height <= 2.5):
        raise InvalidHeight(f"user height {user_height} m out of range (0, 2.5]")
    factor = user_height / model.model_height
    scaled = tuple(
        GestureTemplate(
            label=t.label,
            endpoint=tuple(float(c * factor) for c in t.endpoint),
            rotation_class=t.rotation_class,
        )
        for t in model.templates
    )
    return BodyModel(model_height=user_height, templates=scaled)


def _nearest(endpoint: np.ndarray, candidates: Sequence[tuple[str, np.ndarray]]) -> str | None:
    best_label = None
    best_dist = np.inf
    for label, point in candidates:
        dist = float(np.linalg.norm(endpoint - point))
        if dist < best_dist:  # ties keep the earlier entry
            best_label, best_dist = label, dist
    return best_label


def classify_default(
    endpoint: Iterable[float], rclass: int, model: BodyModel
) -> str | None:
    """Label of the nearest template within the same rotation class.

    Returns None (unrecognized) when no template shares the class.
    """
    point = np.asarray(list(endpoint), dtype=np.float64)
    candidates = [
        (t.label, np.asarray(t.endpoint)) for t in model.templates
        if t.rotation_class == rclass
    ]
    return _nearest(point, candidates)


def train_personal(
    samples: Sequence[tuple[str, Iterable[float], int]]
) -> PersonalGestureSet:
    """Per-label centroid of training endpoints plus the modal rotation class.

    Ties in the class vote resolve to the lowest class id; labels keep their
    first-seen order.
    """
    if not samples:
        raise EmptyLabel("no training samples")
    order: list[str] = []
    points: dict[str, list[np.ndarray]] = {}
    classes: dict[str, list[int]] = {}
    for label, endpoint, rclass in samples:
        if not label:
            raise EmptyLabel("training sample without a label")
        if rclass not in ROTATION_CLASSES:
            raise ValueError(f"rotation class must be 1..6, got {rclass}")
        if label not in points:
            order.append(label)
            points[label] = []
            classes[label] = []
        points[label].append(np.asarray(list(endpoint), dtype=np.float64))
        classes[label].append(rclass)
    gestures = []
    for label in order:
        centroid = np.mean(points[label], axis=0)
        votes = Counter(classes[label])
        top = max(votes.values())
        modal = min(c for c, n in votes.items() if n == top)
        gestures.append(
            PersonalGesture(
                label=label,
                centroid=tuple(float(c) for c in centroid),
                rotation_class=modal,
                training_count=len(points[label]),
            )
        )
    return PersonalGestureSet(gestures=tuple(gestures))


def classify_personal(
    endpoint: Iterable[float], rclass: int, gesture_set: PersonalGestureSet
) -> str | None:
    """Same contract as classify_default, against personal centroids."""
    point = np.asarray(list(endpoint), dtype=np.float64)
    candidates = [
        (g.label, np.asarray(g.centroid)) for g in gesture_set.gestures
        if g.rotation_class == rclass
    ]
    return _nearest(point, candidates)


# -- body model files ---------------------------------------------------------
#
# CSV with a "# model_height=<m>" comment, header label,x,y,z,rotation_class
# and one template per row.

def write_body_model(model: BodyModel, path: str | Path) -> None:
    lines = [f"# model_height={model.model_height:g}", "label,x,y,z,rotation_class"]
    for t in model.templates:
        x, y, z = t.endpoint
        lines.append(f"{t.label},{x!r},{y!r},{z!r},{t.rotation_class}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_body_model(path: str | Path) -> BodyModel:
    return _parse_body_model(Path(path).read_text(encoding="utf-8"), str(path))


def _parse_body_model(text: str, origin: str) -> BodyModel:
    height = None
    templates = []
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta = line[1:].strip()
            if meta.startswith("model_height="):
                height = float(meta[len("model_height="):])
            continue
        if line.lower().startswith("label,"):
            continue
        label, x, y, z, rclass = line.split(",")
        templates.append(
            GestureTemplate(
                label=label.strip(),
                endpoint=(float(x), float(y), float(z)),
                rotation_class=int(rclass),
            )
        )
    if height is None:
        raise ValueError(f"{origin}: missing '# model_height=' line")
    if not templates:
        raise ValueError(f"{origin}: no templates")
    return BodyModel(model_height=height, templates=tuple(templates))


def default_body_model() -> BodyModel:
    """The ten stock body-part templates shipped with the package."""
    text = resources.files("bodygest.data").joinpath("default_body_model.csv").read_text()
    return _parse_body_model(text, "default_body_model.csv")
