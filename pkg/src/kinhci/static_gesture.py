"""Per-frame hand pose (fist / open) from silhouette compactness.

A clenched fist projects to a near-circular blob, a spread hand to a
star-like one. Compactness is the silhouette area over the area of the
circle, centred at the centroid, that reaches the farthest contour point.
Hysteresis between the two enter thresholds keeps the pose from flickering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .contour import Contour
from .segmentation import BinaryMask


class HandPose(Enum):
    FIST = "FIST"
    OPEN = "OPEN"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class PoseFeatures:
    area: int
    centroid: tuple[float, float]
    enclosing_radius: float
    compactness: float


@dataclass(frozen=True)
class PoseThresholds:
    fist_enter: float = 0.70
    open_enter: float = 0.50
    min_area: int = 200

    def __post_init__(self):
        if not self.open_enter < self.fist_enter:
            raise ValueError(f"open_enter ({self.open_enter}) must be below fist_enter ({self.fist_enter})")


def compute_features(mask: BinaryMask, contour: Contour) -> PoseFeatures:
    ys, xs = np.nonzero(mask.bits)
    area = int(xs.size)
    if area == 0:
        return PoseFeatures(0, (0.0, 0.0), 0.0, 0.0)
    cx, cy = float(xs.mean()), float(ys.mean())
    pts = contour.coords()
    radius = float(np.sqrt(((pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2).max())) if len(pts) else 0.0
    compactness = area / (math.pi * radius * radius) if radius > 0 else 0.0
    return PoseFeatures(area, (cx, cy), radius, compactness)


def classify_pose(features: PoseFeatures, previous: HandPose = HandPose.UNKNOWN,
                  config: PoseThresholds = PoseThresholds()) -> HandPose:
    if features.area < config.min_area:
        return HandPose.UNKNOWN
    if features.compactness >= config.fist_enter:
        return HandPose.FIST
    if features.compactness <= config.open_enter:
        return HandPose.OPEN
    return previous


class PoseClassifier:
    """Threads the previous pose through a stream; one instance per stream."""

    def __init__(self, config: PoseThresholds = PoseThresholds()):
        self.config = config
        self.previous = HandPose.UNKNOWN

    def __call__(self, features: PoseFeatures) -> HandPose:
        self.previous = classify_pose(features, self.previous, self.config)
        return self.previous
