"""Trajectory gestures as direction strings matched against a template library.

A hand trajectory is walked from an anchor sample; once the hand is at
least ``min_step`` mm away from the anchor a symbol is emitted and the
anchor moves to the current sample. Depth-dominant steps become PUSH (toward
the camera) or PULL, others one of eight compass directions in the image
plane (E = +x, N = -y). Runs of the same symbol collapse to one.

Strings are compared with Levenshtein distance normalised by the longer
length.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

COMPASS = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")
ALPHABET = frozenset(COMPASS + ("PUSH", "PULL"))
NO_MATCH = None
DEFAULT_MIN_STEP = 40.0
DEFAULT_THRESHOLD = 0.4

DirectionString = tuple  # tuple of symbols from ALPHABET, no adjacent repeats
Sample = tuple  # (timestamp_ms, x, y, z)


class GestureError(ValueError):
    pass


class EmptySampleSet(GestureError):
    pass


class AllSamplesQuantizeEmpty(GestureError):
    pass


class EmptyLibrary(GestureError):
    pass


def parse_pattern(text: str | Sequence[str]) -> DirectionString:
    """``"E SE S"`` or ``["E", "SE", "S"]`` -> ``("E", "SE", "S")``."""
    symbols = text.split() if isinstance(text, str) else list(text)
    bad = [s for s in symbols if s not in ALPHABET]
    if bad:
        raise GestureError(f"unknown direction symbols {bad}")
    return collapse(symbols)


def collapse(symbols: Iterable[str]) -> DirectionString:
    out: list[str] = []
    for s in symbols:
        if not out or out[-1] != s:
            out.append(s)
    return tuple(out)


def direction_symbol(dx: float, dy: float, dz: float) -> str:
    if abs(dz) > max(abs(dx), abs(dy)):
        return "PUSH" if dz < 0 else "PULL"
    angle = math.atan2(-dy, dx)
    sector = int(math.floor((angle + math.pi / 8) / (math.pi / 4))) % 8
    return COMPASS[sector]


def quantize_trajectory(traj: Sequence[Sample], min_step: float = DEFAULT_MIN_STEP) -> DirectionString:
    if not min_step > 0:
        raise GestureError(f"min_step must be > 0, got {min_step}")
    if not traj:
        return ()
    _, ax, ay, az = traj[0]
    symbols = []
    for _, x, y, z in traj[1:]:
        dx, dy, dz = x - ax, y - ay, z - az
        if math.sqrt(dx * dx + dy * dy + dz * dz) >= min_step:
            symbols.append(direction_symbol(dx, dy, dz))
            ax, ay, az = x, y, z
    return collapse(symbols)


def levenshtein(a: Sequence, b: Sequence) -> int:
    prev = list(range(len(b) + 1))
    for i, sa in enumerate(a, 1):
        cur = [i]
        for j, sb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (sa != sb)))
        prev = cur
    return prev[-1]


def normalized_distance(a: Sequence, b: Sequence) -> float:
    longest = max(len(a), len(b))
    return levenshtein(a, b) / longest if longest else 0.0


@dataclass(frozen=True)
class GestureTemplate:
    name: str
    pattern: DirectionString

    def __post_init__(self):
        if not self.name:
            raise GestureError("template name must be non-empty")
        if not self.pattern:
            raise GestureError(f"template {self.name!r} has an empty pattern")
        object.__setattr__(self, "pattern", parse_pattern(self.pattern))


@dataclass(frozen=True)
class GestureMatch:
    name: str | None
    distance: float

    @property
    def matched(self) -> bool:
        return self.name is not None


@dataclass
class GestureLibrary:
    templates: dict[str, GestureTemplate] = field(default_factory=dict)
    match_threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not 0 <= self.match_threshold <= 1:
            raise GestureError(f"threshold must be in [0, 1], got {self.match_threshold}")

    def add(self, template: GestureTemplate, replace: bool = False) -> None:
        if template.name in self.templates and not replace:
            raise GestureError(f"duplicate template name {template.name!r}")
        self.templates[template.name] = template

    def __len__(self) -> int:
        return len(self.templates)

    def to_dict(self) -> dict:
        return {
            "threshold": self.match_threshold,
            "templates": [{"name": t.name, "pattern": list(t.pattern)}
                          for t in self.templates.values()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GestureLibrary":
        lib = cls(match_threshold=float(doc.get("threshold", DEFAULT_THRESHOLD)))
        for entry in doc.get("templates", []):
            lib.add(GestureTemplate(entry["name"], parse_pattern(entry["pattern"])))
        return lib

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "GestureLibrary":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise GestureError(f"{path}: malformed gesture library ({exc})") from None


def default_library() -> GestureLibrary:
    lib = GestureLibrary()
    for name, pattern in [("swipe_left", "W"), ("swipe_right", "E"), ("swipe_up", "N"),
                          ("swipe_down", "S"), ("push", "PUSH"),
                          ("circle_cw", "E SE S SW W NW N NE")]:
        lib.add(GestureTemplate(name, parse_pattern(pattern)))
    return lib


def train_template(name: str, samples: Sequence[Sequence[Sample]],
                   min_step: float = DEFAULT_MIN_STEP) -> GestureTemplate:
    """Medoid of the quantized samples; ties go to the earliest sample."""
    if not samples:
        raise EmptySampleSet(f"no training samples for {name!r}")
    strings = [quantize_trajectory(s, min_step) for s in samples]
    if not any(strings):
        raise AllSamplesQuantizeEmpty(f"every sample of {name!r} quantizes to an empty string")
    best, best_cost = None, None
    for i, s in enumerate(strings):
        if not s:
            continue
        cost = sum(levenshtein(s, other) for j, other in enumerate(strings) if j != i)
        if best_cost is None or cost < best_cost:
            best, best_cost = s, cost
    return GestureTemplate(name, best)


def recognize(s: DirectionString, lib: GestureLibrary) -> GestureMatch:
    if not lib.templates:
        raise EmptyLibrary("gesture library has no templates")
    if not s:
        return GestureMatch(NO_MATCH, 1.0)
    best = min(lib.templates.values(), key=lambda t: (normalized_distance(s, t.pattern), t.name))
    d = normalized_distance(s, best.pattern)
    if d <= lib.match_threshold:
        return GestureMatch(best.name, d)
    return GestureMatch(NO_MATCH, d)
