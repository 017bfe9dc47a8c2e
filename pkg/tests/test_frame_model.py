import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kinhci.frame_model import (BadMagic, DepthFrame, DimensionMismatch, InvariantViolation,
                                RecordedStream, SkeletonFrame, TruncatedFile, read_stream,
                                stream_byte_count, validate_frame, write_stream)


def random_stream(rng, width, height, n_frames, fps=30):
    frames = []
    t = 0
    for _ in range(n_frames):
        t += int(rng.integers(1, 100))
        player = rng.integers(0, 7, size=(height, width)).astype(np.uint8)
        depth = rng.integers(0, 65536, size=(height, width)).astype(np.uint16)
        depth[(player > 0) & (depth == 0)] = 1
        joints = rng.normal(0, 500, size=(5, 3)).astype(np.float32)
        joints[:, 2] = np.abs(joints[:, 2])
        frames.append((DepthFrame(width, height, depth, player, t), SkeletonFrame(joints, t)))
    return RecordedStream(width, height, fps, frames)


def test_round_trip(tmp_path):
    s = random_stream(np.random.default_rng(1), 7, 5, 3)
    p = tmp_path / "s.kds"
    n = write_stream(s, p)
    assert n == p.stat().st_size
    back = read_stream(p)
    assert back == s
    p2 = tmp_path / "again.kds"
    write_stream(back, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_byte_count_one_4x4_frame(tmp_path):
    s = random_stream(np.random.default_rng(2), 4, 4, 1)
    p = tmp_path / "one.kds"
    # 24 header + 16*2 depth + 16 player + 5*3*4 joints + 8 timestamp
    assert write_stream(s, p) == 24 + 32 + 16 + 60 + 8 == 140
    assert p.stat().st_size == 140


def test_empty_stream(tmp_path):
    p = tmp_path / "empty.kds"
    assert write_stream(RecordedStream(4, 4, 30), p) == 24
    back = read_stream(p)
    assert back.frame_count == 0 and (back.width, back.height, back.fps) == (4, 4, 30)


def test_bad_magic(tmp_path):
    p = tmp_path / "bad.kds"
    write_stream(RecordedStream(2, 2, 30), p)
    p.write_bytes(b"XXXX" + p.read_bytes()[4:])
    with pytest.raises(BadMagic):
        read_stream(p)


def test_truncated_file(tmp_path):
    s = random_stream(np.random.default_rng(3), 3, 3, 2)
    p = tmp_path / "t.kds"
    write_stream(s, p)
    data = bytearray(p.read_bytes())
    data[16:20] = (10).to_bytes(4, "little")  # frame_count field
    p.write_bytes(bytes(data))
    with pytest.raises(TruncatedFile):
        read_stream(p)


def test_zero_dimension(tmp_path):
    p = tmp_path / "z.kds"
    write_stream(RecordedStream(2, 2, 30), p)
    data = bytearray(p.read_bytes())
    data[4:8] = (0).to_bytes(4, "little")
    p.write_bytes(bytes(data))
    with pytest.raises(DimensionMismatch):
        read_stream(p)


def test_frame_larger_than_header_rejected(tmp_path):
    big = random_stream(np.random.default_rng(4), 5, 5, 1)
    s = RecordedStream(4, 4, 30, big.frames)
    with pytest.raises(InvariantViolation):
        write_stream(s, tmp_path / "x.kds")


def test_validate_frame_cases():
    assert validate_frame(DepthFrame.empty(3, 2)) == []

    player = np.zeros((2, 3), np.uint8)
    player[1, 2] = 1
    problems = validate_frame(DepthFrame(3, 2, np.zeros((2, 3)), player))
    assert len(problems) == 1 and "(2, 1)" in problems[0]

    short = DepthFrame(3, 2, np.zeros(5), np.zeros(6))
    problems = validate_frame(short)
    assert len(problems) == 1 and "depth has 5 entries" in problems[0]


@settings(max_examples=40, deadline=None)
@given(width=st.integers(1, 9), height=st.integers(1, 9), n=st.integers(0, 4),
       seed=st.integers(0, 2**32 - 1))
def test_size_formula_sweep(tmp_path_factory, width, height, n, seed):
    s = random_stream(np.random.default_rng(seed), width, height, n)
    p = tmp_path_factory.mktemp("sweep") / "s.kds"
    assert write_stream(s, p) == stream_byte_count(width, height, n) == p.stat().st_size
    assert read_stream(p) == s
