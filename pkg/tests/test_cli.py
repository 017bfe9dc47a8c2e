import json
import shutil
from pathlib import Path

import pytest

from kinhci.cli import main
from oracles import parse_ppm

SCENES = Path(__file__).resolve().parent.parent / "scenes"


def scene(**changes):
    doc = json.loads((SCENES / "swipe_left.json").read_text())
    doc.update(changes)
    return doc


def write_scene(tmp_path, name="s.json", **changes):
    p = tmp_path / name
    p.write_text(json.dumps(scene(**changes)))
    return p


def vga_scene(tmp_path):
    return write_scene(tmp_path, "vga.json", resolution={"width": 640, "height": 480},
                       camera={"fx": 570.0, "fy": 570.0, "cx": 320.0, "cy": 240.0},
                       body={"z": 2200, "rect": [80, 0, 560, 480]}, duration_ms=1000,
                       hand={"radius": 60, "shared_with_hand_joint": True,
                             "keyframes": [[0, 100, -150, 1100, "open"], [1000, -150, -150, 1100]]})


def test_simulate_and_info(tmp_path, capsys):
    out = tmp_path / "s.kds"
    assert main(["simulate", str(vga_scene(tmp_path)), str(out)]) == 0
    capsys.readouterr()
    assert main(["info", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "frames: 31, 640x480, 30 fps"


def test_missing_scene(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    code = main(["simulate", str(missing), str(tmp_path / "x.kds")])
    assert code != 0
    assert str(missing) in capsys.readouterr().err


def test_zero_duration(tmp_path, capsys):
    hand = scene()["hand"]
    hand["keyframes"] = [[0, 0, -150, 1100, "open"]]
    p = write_scene(tmp_path, duration_ms=0, hand=hand,
                    joints={k: [[0, *v[0][1:]]] for k, v in scene()["joints"].items()})
    out = tmp_path / "z.kds"
    assert main(["simulate", str(p), str(out)]) == 0
    capsys.readouterr()
    main(["info", str(out)])
    assert capsys.readouterr().out.startswith("frames: 1,")


def test_bad_stream_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.kds"
    bad.write_bytes(b"NOPE" + bytes(40))
    assert main(["info", str(bad)]) == 2
    assert "BadMagic" in capsys.readouterr().err


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["render", "--size", "big"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def east_scene(tmp_path, name, end_x):
    hand = {"radius": 60, "shared_with_hand_joint": True,
            "keyframes": [[0, -100, -150, 1100, "open"], [300, -100, -150, 1100],
                          [800, end_x, -150, 1100], [1500, end_x, -150, 1100]]}
    return write_scene(tmp_path, name, hand=hand)


def test_train_and_recognize(tmp_path, capsys):
    streams = []
    for k, end in enumerate((150, 170, 190)):
        s = tmp_path / f"e{k}.kds"
        assert main(["simulate", str(east_scene(tmp_path, f"e{k}.json", end)), str(s)]) == 0
        streams.append(str(s))
    lib = tmp_path / "lib.json"
    capsys.readouterr()
    assert main(["train", "sweep", *streams, "--library", str(lib)]) == 0
    assert capsys.readouterr().out.strip() == "sweep: E"
    assert json.loads(lib.read_text())["templates"] == [{"name": "sweep", "pattern": ["E"]}]
    assert main(["recognize", streams[0], "--library", str(lib)]) == 0
    assert capsys.readouterr().out.startswith("sweep\tdistance=0.000")


def test_recognize_default_library(tmp_path, capsys):
    s = tmp_path / "l.kds"
    main(["simulate", str(SCENES / "swipe_left.json"), str(s)])
    capsys.readouterr()
    main(["recognize", str(s)])
    assert capsys.readouterr().out.startswith("swipe_left\t")


def test_render_frames(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["render", "--frames", "3", "--size", "64x48", "--num", "8", "--out", str(out)]) == 0
    files = sorted(out.glob("*.ppm"))
    assert [f.name for f in files] == ["frame_0000.ppm", "frame_0001.ppm", "frame_0002.ppm"]
    for f in files:
        w, h, _ = parse_ppm(f.read_bytes())
        assert (w, h) == (64, 48)
    lines = capsys.readouterr().out.splitlines()
    assert [l.split("\t")[1] for l in lines] == ["anglex=0.0000", "anglex=0.0500", "anglex=0.1000"]
    assert files[0].read_bytes() != files[1].read_bytes()


def test_segment_writes_pgms(tmp_path, capsys):
    s = tmp_path / "l.kds"
    main(["simulate", str(SCENES / "swipe_left.json"), str(s)])
    capsys.readouterr()
    out = tmp_path / "seg"
    assert main(["segment", str(s), "--out", str(out), "--frame", "5"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["alpha_0005.pgm", "contour_0005.pgm", "mask_0005.pgm"]
    assert (out / "mask_0005.pgm").read_bytes().startswith(b"P5\n320 240\n255\n")
    line, = capsys.readouterr().out.splitlines()
    assert line.startswith("5\t") and "OPEN" in line


def copy_scenes(tmp_path):
    dst = tmp_path / "scenes"
    shutil.copytree(SCENES, dst, ignore=shutil.ignore_patterns("out"))
    return dst


@pytest.mark.parametrize("name,expected", [
    ("swipe_left", ["NEXT_SLIDE"]),
    ("fist_drag", ["CLICK_DOWN", "CLICK_UP"]),
    ("circle", ["ROTATE_MODEL"]),
    ("static", []),
])
def test_run_scenes(tmp_path, capsys, name, expected):
    d = copy_scenes(tmp_path)
    assert main(["run", str(d / f"run_{name}.json")]) == 0
    log = (d / "out" / name / "events.log").read_text().splitlines()
    kinds = [line.split("\t")[1] for line in log if line.split("\t")[1] != "CURSOR_MOVE"]
    assert kinds == expected


def test_run_deterministic(tmp_path):
    d = copy_scenes(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(d / "run_circle.json"), "--output-dir", str(a)]) == 0
    assert main(["run", str(d / "run_circle.json"), "--output-dir", str(b)]) == 0
    assert (a / "events.log").read_bytes() == (b / "events.log").read_bytes()
    assert (a / "model_0000.ppm").read_bytes() == (b / "model_0000.ppm").read_bytes()
