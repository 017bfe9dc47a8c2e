"""Depth/skeleton frame types and the ``.kds`` recorded-stream file format.

Camera space follows the usual pinhole convention: +x right, +y down,
+z away from the camera, all in millimetres.

File layout (all integers little-endian)::

    "KDS1"
    u32 width, u32 height, u32 fps, u32 frame_count, u32 joint_count (=5)
    per frame:
        u64 timestamp_ms
        u16 depth[height * width]        row-major, 0 = no reading
        u8  player_index[height * width] row-major, 0 = background
        f32 joints[5][3]                 x, y, z in JOINT_NAMES order
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable

import numpy as np

MAGIC = b"KDS1"
HEADER = struct.Struct("<4s5I")
JOINT_COUNT = 5
JOINT_NAMES = ("HEAD", "SHOULDER_CENTER", "ELBOW_RIGHT", "WRIST_RIGHT", "HAND_RIGHT")


class Joint(IntEnum):
    HEAD = 0
    SHOULDER_CENTER = 1
    ELBOW_RIGHT = 2
    WRIST_RIGHT = 3
    HAND_RIGHT = 4


class StreamError(Exception):
    """Base class for recorded-stream errors."""


class BadMagic(StreamError):
    pass


class TruncatedFile(StreamError):
    pass


class DimensionMismatch(StreamError):
    pass


class InvariantViolation(StreamError):
    pass


class IoFailure(StreamError, OSError):
    pass


@dataclass(frozen=True, eq=False)
class DepthFrame:
    """One depth image with per-pixel player labels.

    ``depth`` (uint16, mm) and ``player_index`` (uint8) are stored as given;
    use :meth:`depth_image` / :meth:`player_image` for ``(height, width)`` views.
    The constructor does not validate, so :func:`validate_frame` can report on
    malformed frames.
    """

    width: int
    height: int
    depth: np.ndarray
    player_index: np.ndarray
    timestamp_ms: int = 0

    def __post_init__(self):
        object.__setattr__(self, "depth", np.asarray(self.depth, dtype=np.uint16))
        object.__setattr__(self, "player_index", np.asarray(self.player_index, dtype=np.uint8))

    @classmethod
    def empty(cls, width: int, height: int, timestamp_ms: int = 0) -> "DepthFrame":
        return cls(width, height,
                   np.zeros((height, width), np.uint16),
                   np.zeros((height, width), np.uint8),
                   timestamp_ms)

    def depth_image(self) -> np.ndarray:
        return self.depth.reshape(self.height, self.width)

    def player_image(self) -> np.ndarray:
        return self.player_index.reshape(self.height, self.width)

    def __eq__(self, other):
        if not isinstance(other, DepthFrame):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and self.timestamp_ms == other.timestamp_ms
                and self.depth.size == other.depth.size
                and self.player_index.size == other.player_index.size
                and np.array_equal(self.depth.ravel(), other.depth.ravel())
                and np.array_equal(self.player_index.ravel(), other.player_index.ravel()))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SkeletonFrame:
    """Five tracked joints, shape ``(5, 3)``, float32 millimetres."""

    joints: np.ndarray = field(default_factory=lambda: np.zeros((JOINT_COUNT, 3), np.float32))
    timestamp_ms: int = 0

    def __post_init__(self):
        object.__setattr__(self, "joints", np.asarray(self.joints, dtype=np.float32))

    def __getitem__(self, joint: Joint) -> np.ndarray:
        return self.joints[int(joint)]

    @property
    def hand(self) -> np.ndarray:
        return self.joints[Joint.HAND_RIGHT]

    @property
    def shoulder(self) -> np.ndarray:
        return self.joints[Joint.SHOULDER_CENTER]

    def __eq__(self, other):
        if not isinstance(other, SkeletonFrame):
            return NotImplemented
        return (self.timestamp_ms == other.timestamp_ms
                and self.joints.shape == other.joints.shape
                and np.array_equal(self.joints, other.joints))

    __hash__ = None


@dataclass(eq=False)
class RecordedStream:
    width: int
    height: int
    fps: int
    frames: list[tuple[DepthFrame, SkeletonFrame]] = field(default_factory=list)

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def joint_count(self) -> int:
        return JOINT_COUNT

    def __eq__(self, other):
        if not isinstance(other, RecordedStream):
            return NotImplemented
        return ((self.width, self.height, self.fps) == (other.width, other.height, other.fps)
                and self.frames == other.frames)

    __hash__ = None


def validate_frame(frame: DepthFrame) -> list[str]:
    """Return every invariant violation in ``frame``; empty iff valid."""
    problems = []
    if frame.width < 1 or frame.height < 1:
        problems.append(f"dimensions must be >= 1, got {frame.width}x{frame.height}")
    n = frame.width * frame.height
    if frame.depth.size != n:
        problems.append(f"depth has {frame.depth.size} entries, expected {n}")
    if frame.player_index.size != n:
        problems.append(f"player_index has {frame.player_index.size} entries, expected {n}")
    if frame.timestamp_ms < 0:
        problems.append(f"negative timestamp {frame.timestamp_ms}")
    if problems:
        return problems
    depth = frame.depth.reshape(frame.height, frame.width)
    player = frame.player_index.reshape(frame.height, frame.width)
    if (player > 6).any():
        for y, x in zip(*np.nonzero(player > 6)):
            problems.append(f"pixel ({x}, {y}) has player_index {player[y, x]} > 6")
    for y, x in zip(*np.nonzero((player > 0) & (depth == 0))):
        problems.append(f"pixel ({x}, {y}) has player_index {player[y, x]} but depth 0")
    return problems


def _frame_dtype(width: int, height: int) -> np.dtype:
    n = width * height
    return np.dtype([
        ("timestamp_ms", "<u8"),
        ("depth", "<u2", (n,)),
        ("player_index", "u1", (n,)),
        ("joints", "<f4", (JOINT_COUNT, 3)),
    ])


def stream_byte_count(width: int, height: int, frame_count: int) -> int:
    return HEADER.size + frame_count * (width * height * 3 + JOINT_COUNT * 12 + 8)


def _check_stream(stream: RecordedStream) -> None:
    if stream.width < 1 or stream.height < 1:
        raise InvariantViolation(f"stream dimensions must be >= 1, got {stream.width}x{stream.height}")
    if stream.fps < 1:
        raise InvariantViolation(f"fps must be >= 1, got {stream.fps}")
    last_t = -1
    for k, (depth, skel) in enumerate(stream.frames):
        if (depth.width, depth.height) != (stream.width, stream.height):
            raise InvariantViolation(
                f"frame {k}: {depth.width}x{depth.height} differs from header {stream.width}x{stream.height}")
        problems = validate_frame(depth)
        if problems:
            raise InvariantViolation(f"frame {k}: {problems[0]}")
        if skel.joints.shape != (JOINT_COUNT, 3):
            raise InvariantViolation(f"frame {k}: joints have shape {skel.joints.shape}")
        if skel.timestamp_ms != depth.timestamp_ms:
            raise InvariantViolation(
                f"frame {k}: skeleton timestamp {skel.timestamp_ms} != depth timestamp {depth.timestamp_ms}")
        if depth.timestamp_ms <= last_t:
            raise InvariantViolation(f"frame {k}: timestamp {depth.timestamp_ms} does not increase")
        last_t = depth.timestamp_ms


def encode_stream(stream: RecordedStream) -> bytes:
    _check_stream(stream)
    records = np.zeros(stream.frame_count, dtype=_frame_dtype(stream.width, stream.height))
    for k, (depth, skel) in enumerate(stream.frames):
        records[k]["timestamp_ms"] = depth.timestamp_ms
        records[k]["depth"] = depth.depth.ravel()
        records[k]["player_index"] = depth.player_index.ravel()
        records[k]["joints"] = skel.joints
    header = HEADER.pack(MAGIC, stream.width, stream.height, stream.fps,
                         stream.frame_count, JOINT_COUNT)
    return header + records.tobytes()


def decode_stream(data: bytes) -> RecordedStream:
    if bytes(data[:4]) != MAGIC:
        raise BadMagic(f"not a stream file (magic {bytes(data[:4])!r})")
    if len(data) < HEADER.size:
        raise TruncatedFile(f"header needs {HEADER.size} bytes, file has {len(data)}")
    _, width, height, fps, frame_count, joint_count = HEADER.unpack_from(data)
    if width == 0 or height == 0:
        raise DimensionMismatch(f"zero dimension in header: {width}x{height}")
    if joint_count != JOINT_COUNT:
        raise DimensionMismatch(f"joint_count is {joint_count}, expected {JOINT_COUNT}")
    if fps < 1:
        raise InvariantViolation("fps must be >= 1")
    expected = stream_byte_count(width, height, frame_count)
    if len(data) < expected:
        raise TruncatedFile(
            f"header declares {frame_count} frames ({expected} bytes) but file has {len(data)} bytes")
    if len(data) > expected:
        raise StreamError(f"{len(data) - expected} trailing bytes after {frame_count} frames")
    records = np.frombuffer(data, dtype=_frame_dtype(width, height),
                            count=frame_count, offset=HEADER.size)
    frames = []
    for rec in records:
        t = int(rec["timestamp_ms"])
        depth = DepthFrame(width, height,
                           rec["depth"].reshape(height, width).copy(),
                           rec["player_index"].reshape(height, width).copy(), t)
        frames.append((depth, SkeletonFrame(rec["joints"].copy(), t)))
    return RecordedStream(width, height, fps, frames)


def write_stream(stream: RecordedStream, path) -> int:
    """Write ``stream`` to ``path``; returns the number of bytes written."""
    data = encode_stream(stream)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return len(data)


def read_stream(path) -> RecordedStream:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return decode_stream(data)


def hand_trajectory(frames: Iterable[tuple[DepthFrame, SkeletonFrame]]) -> list[tuple[int, float, float, float]]:
    """HAND_RIGHT samples ``(t, x, y, z)`` of frames whose hand is tracked (z > 0)."""
    out = []
    for _, skel in frames:
        x, y, z = (float(v) for v in skel.hand)
        if z > 0:
            out.append((skel.timestamp_ms, x, y, z))
    return out

