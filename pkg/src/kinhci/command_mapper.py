"""Hand pose + trajectory -> virtual mouse / slide / model commands, and routing.

Per frame, in this order:

* a CURSOR_MOVE for every frame with a known pose,
* commands for a gesture window that closed on this frame,
* CLICK_DOWN on OPEN->FIST and CLICK_UP on FIST->OPEN edges.

Edges are taken against the last known pose (UNKNOWN frames are skipped),
starting from OPEN, so the button state can never go negative or double up.
Trajectories are captured only while the hand is OPEN; a window closes after
``quiescence_ms`` without a ``min_step`` move, or on any pose edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamic_gesture import (DEFAULT_MIN_STEP, GestureLibrary, GestureMatch,
                              default_library, quantize_trajectory, recognize)
from .static_gesture import HandPose

ROTATE_STEP = 0.05
DEFAULT_QUIESCENCE_MS = 150


class EventKind(str, Enum):
    CURSOR_MOVE = "CURSOR_MOVE"
    CLICK_DOWN = "CLICK_DOWN"
    CLICK_UP = "CLICK_UP"
    NEXT_SLIDE = "NEXT_SLIDE"
    PREV_SLIDE = "PREV_SLIDE"
    ROTATE_MODEL = "ROTATE_MODEL"
    ZOOM = "ZOOM"


class OutOfOrderTimestamp(ValueError):
    pass


@dataclass(frozen=True)
class CommandEvent:
    kind: EventKind
    timestamp_ms: int
    source: str
    args: tuple = ()

    def format_args(self) -> str:
        if not self.args:
            return "-"
        return ",".join(f"{a:.6g}" if isinstance(a, float) else str(a) for a in self.args)


@dataclass(frozen=True)
class ControlBox:
    center: tuple[float, float, float]
    width: float = 400.0
    height: float = 300.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"control box must have positive size, got {self.width}x{self.height}")

    @classmethod
    def anchored(cls, shoulder, offset=(0.0, 0.0, 0.0), width=400.0, height=300.0) -> "ControlBox":
        center = tuple(float(s) + float(o) for s, o in zip(shoulder, offset))
        return cls(center, width, height)


def map_cursor(hand, box: ControlBox, screen: tuple[int, int], mirror_x: bool = False) -> tuple[int, int]:
    """Affine map of the box's x-y extent onto the screen, clamped; z is ignored."""
    w, h = screen
    if w < 1 or h < 1:
        raise ValueError(f"screen must be at least 1x1, got {w}x{h}")
    u = (float(hand[0]) - box.center[0]) / box.width + 0.5
    v = (float(hand[1]) - box.center[1]) / box.height + 0.5
    if mirror_x:
        u = 1.0 - u
    x = min(max(int(np.floor(u * w)), 0), w - 1)
    y = min(max(int(np.floor(v * h)), 0), h - 1)
    return x, y


# gesture name -> (event kind, args) sequence
GESTURE_COMMANDS: dict[str, list[tuple[EventKind, tuple]]] = {
    "swipe_left": [(EventKind.NEXT_SLIDE, ())],
    "swipe_right": [(EventKind.PREV_SLIDE, ())],
    "swipe_up": [(EventKind.ZOOM, ("in",))],
    "swipe_down": [(EventKind.ZOOM, ("out",))],
    "push": [(EventKind.CLICK_DOWN, ()), (EventKind.CLICK_UP, ())],
    "circle_cw": [(EventKind.ROTATE_MODEL, (ROTATE_STEP, 0.0))],
}


class GestureWindow:
    """Collects OPEN-pose hand samples until the hand rests or the pose changes."""

    def __init__(self, min_step: float = DEFAULT_MIN_STEP, quiescence_ms: int = DEFAULT_QUIESCENCE_MS):
        self.min_step = min_step
        self.quiescence_ms = quiescence_ms
        self.samples: list[tuple[int, float, float, float]] = []
        self._anchor = None
        self._anchor_t = 0

    def reset(self) -> None:
        self.samples = []
        self._anchor = None

    def _start(self, t: int, hand) -> None:
        self.samples = [(t, *map(float, hand))]
        self._anchor = np.asarray(hand, dtype=np.float64)
        self._anchor_t = t

    def close(self) -> list:
        samples, self.samples = self.samples, []
        self._anchor = None
        return samples

    def add(self, t: int, hand) -> list | None:
        """Add an OPEN sample; returns the closed window's samples on quiescence."""
        if self._anchor is None:
            self._start(t, hand)
            return None
        self.samples.append((t, *map(float, hand)))
        p = np.asarray(hand, dtype=np.float64)
        if np.linalg.norm(p - self._anchor) >= self.min_step:
            self._anchor = p
            self._anchor_t = t
        elif t - self._anchor_t >= self.quiescence_ms:
            closed = self.close()
            self._start(t, hand)
            return closed
        return None


@dataclass
class MapperConfig:
    screen: tuple[int, int] = (1920, 1080)
    mirror_x: bool = False
    box_width: float = 400.0
    box_height: float = 300.0
    box_offset: tuple[float, float, float] = (0.0, 0.0, 0.0)
    min_step: float = DEFAULT_MIN_STEP
    quiescence_ms: int = DEFAULT_QUIESCENCE_MS


class CommandMapper:
    """Sequential per-stream state machine; not shared between streams."""

    def __init__(self, library: GestureLibrary | None = None, config: MapperConfig | None = None):
        self.library = default_library() if library is None else library
        self.config = config or MapperConfig()
        self.window = GestureWindow(self.config.min_step, self.config.quiescence_ms)
        self.last_known = HandPose.OPEN
        self.last_t: int | None = None
        self.matches: list[tuple[int, GestureMatch]] = []

    def _gesture_events(self, samples, t: int) -> list[CommandEvent]:
        if not samples:
            return []
        match = recognize(quantize_trajectory(samples, self.config.min_step), self.library)
        return self._match_events(match, t)

    def _match_events(self, match: GestureMatch | None, t: int) -> list[CommandEvent]:
        if match is None or not match.matched:
            return []
        self.matches.append((t, match))
        return [CommandEvent(kind, t, match.name, args)
                for kind, args in GESTURE_COMMANDS.get(match.name, [])]

    def step(self, pose: HandPose, hand, timestamp_ms: int,
             match: GestureMatch | None = None, shoulder=None) -> list[CommandEvent]:
        """Advance one frame. ``match`` injects an externally recognized gesture."""
        t = int(timestamp_ms)
        if self.last_t is not None and t <= self.last_t:
            raise OutOfOrderTimestamp(f"timestamp {t} ms after {self.last_t} ms")
        self.last_t = t

        if pose is HandPose.UNKNOWN:
            self.window.reset()
            return []

        cfg = self.config
        anchor = shoulder if shoulder is not None else (0.0, 0.0, 0.0)
        box = ControlBox.anchored(anchor, cfg.box_offset, cfg.box_width, cfg.box_height)
        x, y = map_cursor(hand, box, cfg.screen, cfg.mirror_x)
        events = [CommandEvent(EventKind.CURSOR_MOVE, t, pose.value, (x, y))]

        edge = pose is not self.last_known
        if edge:
            events += self._gesture_events(self.window.close(), t)
        if pose is HandPose.OPEN:
            events += self._gesture_events(self.window.add(t, hand), t)
            events += self._match_events(match, t)

        if edge and pose is HandPose.FIST:
            events.append(CommandEvent(EventKind.CLICK_DOWN, t, "OPEN->FIST"))
        elif edge and pose is HandPose.OPEN:
            events.append(CommandEvent(EventKind.CLICK_UP, t, "FIST->OPEN"))
        self.last_known = pose
        return events


@dataclass
class EventRouter:
    """Routes keyed by event kind or gesture name to ordered target lists."""

    routes: dict[str, list[str]] = field(default_factory=dict)
    dropped: int = 0

    def bind(self, key: str, target: str) -> None:
        targets = self.routes.setdefault(str(key), [])
        if target not in targets:
            targets.append(target)

    def targets_for(self, event: CommandEvent) -> list[str]:
        out: list[str] = []
        for key in (event.kind.value, event.source):
            for target in self.routes.get(key, []):
                if target not in out:
                    out.append(target)
        return out

    def route(self, event: CommandEvent) -> list[tuple[str, CommandEvent]]:
        targets = self.targets_for(event)
        if not targets:
            self.dropped += 1
        return [(target, event) for target in targets]


def route(event: CommandEvent, router: EventRouter) -> list[tuple[str, CommandEvent]]:
    return router.route(event)


DEFAULT_ROUTES = {
    "CURSOR_MOVE": ["cursor"],
    "CLICK_DOWN": ["cursor"],
    "CLICK_UP": ["cursor"],
    "NEXT_SLIDE": ["slides"],
    "PREV_SLIDE": ["slides"],
    "ZOOM": ["renderer"],
    "ROTATE_MODEL": ["renderer"],
}


def format_log_line(event: CommandEvent, targets: list[str]) -> str:
    return "\t".join([str(event.timestamp_ms), event.kind.value, event.format_args(),
                      event.source, ",".join(targets) if targets else "-"])
