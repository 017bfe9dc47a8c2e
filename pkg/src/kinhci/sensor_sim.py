"""Synthetic depth + skeleton streams from a declarative JSON scene.

The hand is a sphere (closed fist) or, for keyframe segments tagged
``"open"``, the front cap of an extruded five-pointed star (spread hand).
An optional fronto-parallel body plane sits behind it. Depth values are the
z-coordinate of the nearest hit, rounded to whole millimetres.

Scene file keys::

    camera      {fx, fy, cx, cy}                 pixels
    resolution  {width, height}
    fps, duration_ms
    body        {z, rect: [x0, y0, x1, y1]}      optional; rect is half-open pixels
    hand        {radius, keyframes: [[t, x, y, z] or [t, x, y, z, "fist"|"open"], ...],
                 shared_with_hand_joint}        optional
    joints      {NAME: [[t, x, y, z], ...]}      optional per joint
    noise       {sigma_mm}                       optional additive Gaussian depth noise

See ``scenes/swipe_left.json`` for a complete example.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .frame_model import (JOINT_COUNT, JOINT_NAMES, DepthFrame, Joint, RecordedStream,
                          SkeletonFrame, validate_frame)

FIST = "fist"
OPEN = "open"

# open-hand star: outer radius relative to the fist radius, inner/outer ratio
STAR_OUTER = 1.6
STAR_INNER_RATIO = 0.35
STAR_POINTS = 5


class SceneError(ValueError):
    pass


class TimeOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise SceneError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")


@dataclass(frozen=True)
class Keyframes:
    """Piecewise-linear 3D track. ``shapes[k]`` applies on ``[times[k], times[k+1])``."""

    times: tuple[float, ...]
    points: np.ndarray
    shapes: tuple[str, ...] = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        object.__setattr__(self, "points", pts)
        if len(self.times) == 0 or len(self.times) != len(pts):
            raise SceneError("keyframe track needs at least one (t, x, y, z) entry")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise SceneError(f"keyframe times must strictly increase: {list(self.times)}")
        if not self.shapes:
            object.__setattr__(self, "shapes", (FIST,) * len(self.times))
        if len(self.shapes) != len(self.times) or any(s not in (FIST, OPEN) for s in self.shapes):
            raise SceneError(f"bad hand shapes {self.shapes}")

    def _segment(self, t: float) -> int:
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(k, 0), len(self.times) - 1)

    def at(self, t: float) -> np.ndarray:
        k = self._segment(t)
        if k == len(self.times) - 1:
            return self.points[k].copy()
        t0, t1 = self.times[k], self.times[k + 1]
        w = (t - t0) / (t1 - t0)
        return self.points[k] + w * (self.points[k + 1] - self.points[k])

    def shape_at(self, t: float) -> str:
        return self.shapes[self._segment(t)]

    def spans(self, duration_ms: float) -> bool:
        return self.times[0] <= 0 and self.times[-1] >= duration_ms


@dataclass(frozen=True)
class Body:
    z: float
    rect: tuple[int, int, int, int]


@dataclass(frozen=True)
class Hand:
    radius: float
    track: Keyframes
    shared_with_hand_joint: bool = True


@dataclass(frozen=True)
class SceneScript:
    camera: CameraIntrinsics
    width: int
    height: int
    fps: int
    duration_ms: int
    body: Body | None = None
    hand: Hand | None = None
    joints: dict = field(default_factory=dict)
    noise_sigma_mm: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SceneError(f"resolution must be >= 1x1, got {self.width}x{self.height}")
        if not 1 <= self.fps <= 1000:
            raise SceneError(f"fps must be in 1..1000, got {self.fps}")
        if self.duration_ms < 0:
            raise SceneError("duration_ms must be >= 0")
        if self.noise_sigma_mm < 0:
            raise SceneError("noise sigma must be >= 0")
        if self.hand is not None:
            if not self.hand.radius > 0:
                raise SceneError("hand radius must be > 0")
            if not self.hand.track.spans(self.duration_ms):
                raise SceneError("hand keyframes must span [0, duration_ms]")
            if (self.hand.track.points[:, 2] <= self.hand.radius).any():
                raise SceneError("every hand keyframe needs z > radius")
            if self.hand.shared_with_hand_joint and "HAND_RIGHT" in self.joints:
                raise SceneError("HAND_RIGHT is shared with the hand sphere and also declared")
        for name, track in self.joints.items():
            if name not in JOINT_NAMES:
                raise SceneError(f"unknown joint {name!r}")
            if not track.spans(self.duration_ms):
                raise SceneError(f"keyframes of {name} must span [0, duration_ms]")
            if (track.points[:, 2] < 0).any():
                raise SceneError(f"joint {name} has negative z")

    def check_time(self, t_ms: float) -> None:
        if not 0 <= t_ms <= self.duration_ms:
            raise TimeOutOfRange(f"t={t_ms} ms outside [0, {self.duration_ms}]")


# ---------------------------------------------------------------------------
# Scene parsing
# ---------------------------------------------------------------------------

def _track(rows, allow_shape=False, where="") -> Keyframes:
    times, points, shapes = [], [], []
    for row in rows:
        if len(row) not in ((4, 5) if allow_shape else (4,)):
            raise SceneError(f"{where}: keyframe {row!r} must be [t, x, y, z]"
                             + (' with optional "fist"/"open"' if allow_shape else ""))
        times.append(float(row[0]))
        points.append([float(v) for v in row[1:4]])
        shapes.append(row[4] if len(row) == 5 else FIST)
    return Keyframes(tuple(times), np.array(points), tuple(shapes))


def scene_from_dict(doc: dict, seed: int = 0) -> SceneScript:
    try:
        cam = doc["camera"]
        res = doc["resolution"]
        body = doc.get("body")
        hand = doc.get("hand")
        return SceneScript(
            camera=CameraIntrinsics(float(cam["fx"]), float(cam["fy"]),
                                    float(cam["cx"]), float(cam["cy"])),
            width=int(res["width"]),
            height=int(res["height"]),
            fps=int(doc["fps"]),
            duration_ms=int(doc["duration_ms"]),
            body=None if body is None else Body(float(body["z"]), tuple(int(v) for v in body["rect"])),
            hand=None if hand is None else Hand(
                float(hand["radius"]),
                _track(hand["keyframes"], allow_shape=True, where="hand"),
                bool(hand.get("shared_with_hand_joint", True))),
            joints={name: _track(rows, where=f"joints.{name}")
                    for name, rows in doc.get("joints", {}).items()},
            noise_sigma_mm=float(doc.get("noise", {}).get("sigma_mm", 0.0)),
            seed=int(seed),
        )
    except KeyError as exc:
        raise SceneError(f"missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SceneError):
            raise
        raise SceneError(str(exc)) from None


def load_scene(path, seed: int = 0) -> SceneScript:
    """Parse a JSON scene file. Syntax errors are reported with line numbers."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return scene_from_dict(doc, seed)
    except SceneError as exc:
        raise SceneError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _pixel_rays(scene: SceneScript) -> tuple[np.ndarray, np.ndarray]:
    cam = scene.camera
    v, u = np.mgrid[0:scene.height, 0:scene.width].astype(np.float64)
    return (u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy


def _sphere_hit_z(dx, dy, center, radius) -> np.ndarray:
    # ray p(s) = s * (dx, dy, 1); the hit's z-coordinate equals s
    cx, cy, cz = center
    a = dx * dx + dy * dy + 1.0
    b = -2.0 * (dx * cx + dy * cy + cz)
    c = cx * cx + cy * cy + cz * cz - radius * radius
    disc = b * b - 4.0 * a * c
    z = np.full(dx.shape, np.inf)
    hit = disc >= 0
    z[hit] = (-b[hit] - np.sqrt(disc[hit])) / (2.0 * a[hit])
    z[z <= 0] = np.inf
    return z


def star_polygon(radius: float) -> np.ndarray:
    """Vertices of the open-hand star for a hand of ``radius``; first point up (-y)."""
    outer = STAR_OUTER * radius
    inner = outer * STAR_INNER_RATIO
    angles = -math.pi / 2 + np.arange(2 * STAR_POINTS) * math.pi / STAR_POINTS
    radii = np.where(np.arange(2 * STAR_POINTS) % 2 == 0, outer, inner)
    return np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)


def point_in_polygon(px: np.ndarray, py: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd crossing test, vectorized over the points."""
    inside = np.zeros(px.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        if y1 == y2:
            continue
        crosses = (y1 > py) != (y2 > py)
        x_at = (x2 - x1) * (py - y1) / (y2 - y1) + x1
        inside ^= crosses & (px < x_at)
    return inside


def _star_hit_z(dx, dy, center, radius) -> np.ndarray:
    cx, cy, cz = center
    zf = cz - radius
    px = dx * zf - cx
    py = dy * zf - cy
    z = np.full(dx.shape, np.inf)
    z[point_in_polygon(px, py, star_polygon(radius))] = zf
    return z


def hand_center(scene: SceneScript, t_ms: float) -> np.ndarray:
    return scene.hand.track.at(t_ms)


def render_depth_frame(scene: SceneScript, t_ms: float) -> DepthFrame:
    scene.check_time(t_ms)
    dx, dy = _pixel_rays(scene)
    z = np.full(dx.shape, np.inf)
    if scene.body is not None:
        x0, y0, x1, y1 = scene.body.rect
        z[max(y0, 0):max(y1, 0), max(x0, 0):max(x1, 0)] = scene.body.z
    if scene.hand is not None:
        center = hand_center(scene, t_ms)
        if scene.hand.track.shape_at(t_ms) == OPEN:
            hz = _star_hit_z(dx, dy, center, scene.hand.radius)
        else:
            hz = _sphere_hit_z(dx, dy, center, scene.hand.radius)
        z = np.minimum(z, hz)
    hit = np.isfinite(z)
    depth = np.zeros(z.shape)
    depth[hit] = np.rint(z[hit])
    if scene.noise_sigma_mm > 0:
        rng = np.random.default_rng([scene.seed, int(t_ms)])
        noise = rng.normal(0.0, scene.noise_sigma_mm, size=z.shape)
        depth[hit] = np.rint(depth[hit] + noise[hit])
    depth = np.where(hit, np.clip(depth, 1, 65535), 0).astype(np.uint16)
    player = hit.astype(np.uint8)
    return DepthFrame(scene.width, scene.height, depth, player, int(t_ms))


def skeleton_from_scene(scene: SceneScript, t_ms: float) -> SkeletonFrame:
    scene.check_time(t_ms)
    joints = np.zeros((JOINT_COUNT, 3))
    for name, track in scene.joints.items():
        joints[Joint[name]] = track.at(t_ms)
    if scene.hand is not None and scene.hand.shared_with_hand_joint:
        joints[Joint.HAND_RIGHT] = hand_center(scene, t_ms)
    return SkeletonFrame(joints, int(t_ms))


def frame_times(scene: SceneScript) -> list[int]:
    n = scene.duration_ms * scene.fps // 1000 + 1
    return [k * 1000 // scene.fps for k in range(n)]


def synthesize_stream(scene: SceneScript) -> RecordedStream:
    frames = []
    for t in frame_times(scene):
        depth = render_depth_frame(scene, t)
        problems = validate_frame(depth)
        if problems:
            raise SceneError(f"frame at t={t} ms is invalid: {problems[0]}")
        frames.append((depth, skeleton_from_scene(scene, t)))
    return RecordedStream(scene.width, scene.height, scene.fps, frames)
