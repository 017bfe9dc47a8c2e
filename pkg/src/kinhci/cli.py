"""``kinhci`` command line.

Exit codes: 0 ok, 1 usage, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import kernels
from .contour import overlay
from .dynamic_gesture import (DEFAULT_MIN_STEP, GestureError, GestureLibrary, default_library,
                              quantize_trajectory, recognize, train_template)
from .frame_model import StreamError, hand_trajectory, read_stream, write_stream
from .pipeline import HandAnalyzer, RunConfig, load_config, run, write_pgm
from .renderer import ANGLE_STEP, Orientation, render_sphere, write_image
from .segmentation import DEFAULT_D_LIMIT, DEFAULT_THRESHOLD, DEFAULT_U_LIMIT
from .sensor_sim import load_scene, synthesize_stream
from .static_gesture import PoseThresholds

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return w, h


def _pose_flags(p: argparse.ArgumentParser) -> None:
    d = PoseThresholds()
    p.add_argument("--fist-enter", type=float, default=None, help=f"default {d.fist_enter}")
    p.add_argument("--open-enter", type=float, default=None, help=f"default {d.open_enter}")
    p.add_argument("--min-area", type=int, default=None, help=f"default {d.min_area} px")


def _pose_from_args(args, base: PoseThresholds = PoseThresholds()) -> PoseThresholds:
    return PoseThresholds(
        base.fist_enter if args.fist_enter is None else args.fist_enter,
        base.open_enter if args.open_enter is None else args.open_enter,
        base.min_area if args.min_area is None else args.min_area,
    )


def cmd_simulate(args) -> int:
    stream = synthesize_stream(load_scene(args.scene, args.seed))
    write_stream(stream, args.out)
    print(f"frames: {stream.frame_count}")
    return EXIT_OK


def cmd_info(args) -> int:
    s = read_stream(args.stream)
    print(f"frames: {s.frame_count}, {s.width}x{s.height}, {s.fps} fps")
    return EXIT_OK


def cmd_segment(args) -> int:
    stream = read_stream(args.stream)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    analyzer = HandAnalyzer(args.d_limit, args.u_limit, args.threshold, _pose_from_args(args))
    for k, (depth, skel) in enumerate(stream.frames):
        obs = analyzer(depth, skel)
        if args.frame is not None and k != args.frame:
            continue
        if obs.alpha is not None:
            write_pgm(obs.alpha.alpha, out / f"alpha_{k:04d}.pgm")
            write_pgm(obs.mask.bits.astype("uint8") * 255, out / f"mask_{k:04d}.pgm")
            write_pgm(overlay(obs.mask, obs.contour), out / f"contour_{k:04d}.pgm")
        f = obs.features
        print(f"{k}\t{depth.timestamp_ms}\t{obs.pose.value}\tarea={f.area}\tcompactness={f.compactness:.3f}")
    return EXIT_OK


def cmd_train(args) -> int:
    lib_path = Path(args.library)
    lib = GestureLibrary.load(lib_path) if lib_path.exists() else GestureLibrary()
    if args.threshold is not None:
        lib.match_threshold = args.threshold
    samples = [hand_trajectory(read_stream(p).frames) for p in args.samples]
    template = train_template(args.name, samples, args.min_step)
    lib.add(template, replace=True)
    lib.save(lib_path)
    print(f"{template.name}: {' '.join(template.pattern)}")
    return EXIT_OK


def cmd_recognize(args) -> int:
    lib = GestureLibrary.load(args.library) if args.library else default_library()
    traj = hand_trajectory(read_stream(args.stream).frames)
    s = quantize_trajectory(traj, args.min_step)
    match = recognize(s, lib)
    name = match.name if match.matched else "NO_MATCH"
    print(f"{name}\tdistance={match.distance:.3f}\tpattern={' '.join(s) or '-'}")
    return EXIT_OK


def cmd_render(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    o = Orientation(args.anglex, args.angley)
    for k in range(args.frames):
        fb = render_sphere(o, args.size, args.num, args.radius, args.f)
        path = out / f"frame_{k:04d}.ppm"
        write_image(fb, path)
        print(f"{path}\tanglex={o.anglex:.4f}\tangley={o.angley:.4f}")
        o = o.stepped(ANGLE_STEP, 0.0)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg: RunConfig = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.output_dir is not None:
        cfg.output_dir = Path(args.output_dir)
    if args.mirror_x:
        cfg.mapper.mirror_x = True
    cfg.pose = _pose_from_args(args, cfg.pose)
    result = run(cfg)
    print(f"events: {len(result.events)}, slide: {result.slide_index}, "
          f"dropped: {result.dropped}, log: {cfg.output_dir / 'events.log'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kinhci", description="Depth-stream gesture pipeline and sphere renderer.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="synthesize a .kds stream from a JSON scene")
    p.add_argument("scene")
    p.add_argument("out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("info", help="print a stream header")
    p.add_argument("stream")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("segment", help="dump alpha/mask/contour PGMs per frame")
    p.add_argument("stream")
    p.add_argument("--out", required=True)
    p.add_argument("--frame", type=int, default=None, help="only dump this frame index")
    p.add_argument("--d-limit", type=float, default=DEFAULT_D_LIMIT)
    p.add_argument("--u-limit", type=float, default=DEFAULT_U_LIMIT)
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    _pose_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("train", help="train a template from sample streams into a library")
    p.add_argument("name")
    p.add_argument("samples", nargs="+")
    p.add_argument("--library", required=True)
    p.add_argument("--min-step", type=float, default=DEFAULT_MIN_STEP)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="recognize the hand trajectory of a stream")
    p.add_argument("stream")
    p.add_argument("--library", default=None)
    p.add_argument("--min-step", type=float, default=DEFAULT_MIN_STEP)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("render", help="render sphere frames as PPM")
    p.add_argument("--num", type=int, default=20)
    p.add_argument("--radius", type=float, default=160.0)
    p.add_argument("--f", type=float, default=300.0)
    p.add_argument("--anglex", type=float, default=0.0)
    p.add_argument("--angley", type=float, default=ANGLE_STEP)
    p.add_argument("--size", type=_size, default=(640, 480))
    p.add_argument("--frames", type=int, default=1)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("run", help="run the full pipeline from a JSON config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--mirror-x", action="store_true")
    _pose_flags(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger(__name__).debug("kernel backend: %s", kernels.BACKEND)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"kinhci: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (StreamError, GestureError, ValueError, RuntimeError, LookupError) as exc:
        print(f"kinhci: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
