"""Frame-by-frame wiring: segmentation -> contour -> pose -> mapper -> routing.

A run configuration is a JSON document; relative paths resolve against the
config file's directory::

    {
      "scene": "swipe_left.json",          # or "stream": "recording.kds"
      "library": null,                      # gesture library JSON, default set if null
      "output_dir": "out/swipe_left",
      "seed": 0,
      "segmentation": {"d_limit": 80, "u_limit": 120, "threshold": 1},
      "pose": {"fist_enter": 0.7, "open_enter": 0.5, "min_area": 200},
      "mapper": {"screen": [1920, 1080], "mirror_x": false,
                 "box": {"width": 400, "height": 300, "offset": [0, 0, 0]},
                 "min_step": 40, "quiescence_ms": 150},
      "routes": {"NEXT_SLIDE": ["slides"], "ROTATE_MODEL": ["renderer", "logger"]},
      "renderer": {"num": 20, "radius": 160, "f": 300, "size": [320, 240]}
    }
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .command_mapper import (DEFAULT_ROUTES, CommandEvent, CommandMapper, EventKind,
                             EventRouter, MapperConfig, format_log_line)
from .contour import Contour, extract_contour
from .dynamic_gesture import GestureLibrary, default_library
from .frame_model import DepthFrame, RecordedStream, SkeletonFrame, read_stream
from .renderer import Orientation, render_sphere, write_image
from .segmentation import (DEFAULT_D_LIMIT, DEFAULT_THRESHOLD, DEFAULT_U_LIMIT, AlphaMask,
                           BinaryMask, SegmentationParams, segment_hand)
from .sensor_sim import load_scene, synthesize_stream
from .static_gesture import HandPose, PoseClassifier, PoseFeatures, PoseThresholds, compute_features

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class PipelineError(RuntimeError):
    pass


@dataclass
class RendererOptions:
    num: int = 20
    radius: float = 160.0
    f: float = 300.0
    size: tuple[int, int] = (320, 240)


@dataclass
class RunConfig:
    output_dir: Path
    scene: Path | None = None
    stream: Path | None = None
    library: Path | None = None
    seed: int = 0
    d_limit: float = DEFAULT_D_LIMIT
    u_limit: float = DEFAULT_U_LIMIT
    threshold: int = DEFAULT_THRESHOLD
    pose: PoseThresholds = field(default_factory=PoseThresholds)
    mapper: MapperConfig = field(default_factory=MapperConfig)
    routes: dict[str, list[str]] = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_ROUTES.items()})
    renderer: RendererOptions = field(default_factory=RendererOptions)

    def check_inputs(self) -> None:
        if (self.scene is None) == (self.stream is None):
            raise ConfigError("exactly one of 'scene' and 'stream' must be given")
        for p in (self.scene, self.stream, self.library):
            if p is not None and not p.is_file():
                raise FileNotFoundError(f"input file not found: {p}")


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    base = path.parent

    def resolve(key):
        value = doc.get(key)
        return None if value is None else (base / value)

    try:
        seg = doc.get("segmentation", {})
        pose = doc.get("pose", {})
        mp = doc.get("mapper", {})
        box = mp.get("box", {})
        rend = doc.get("renderer", {})
        cfg = RunConfig(
            output_dir=resolve("output_dir") or base / "out",
            scene=resolve("scene"),
            stream=resolve("stream"),
            library=resolve("library"),
            seed=int(doc.get("seed", 0)),
            d_limit=float(seg.get("d_limit", DEFAULT_D_LIMIT)),
            u_limit=float(seg.get("u_limit", DEFAULT_U_LIMIT)),
            threshold=int(seg.get("threshold", DEFAULT_THRESHOLD)),
            pose=PoseThresholds(float(pose.get("fist_enter", 0.70)),
                                float(pose.get("open_enter", 0.50)),
                                int(pose.get("min_area", 200))),
            mapper=MapperConfig(
                screen=tuple(int(v) for v in mp.get("screen", (1920, 1080))),
                mirror_x=bool(mp.get("mirror_x", False)),
                box_width=float(box.get("width", 400.0)),
                box_height=float(box.get("height", 300.0)),
                box_offset=tuple(float(v) for v in box.get("offset", (0.0, 0.0, 0.0))),
                min_step=float(mp.get("min_step", 40.0)),
                quiescence_ms=int(mp.get("quiescence_ms", 150)),
            ),
            renderer=RendererOptions(int(rend.get("num", 20)), float(rend.get("radius", 160.0)),
                                     float(rend.get("f", 300.0)),
                                     tuple(int(v) for v in rend.get("size", (320, 240)))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "routes" in doc:
        cfg.routes = {str(k): [str(t) for t in v] for k, v in doc["routes"].items()}
    return cfg


# ---------------------------------------------------------------------------
# Per-frame hand analysis
# ---------------------------------------------------------------------------

@dataclass
class HandObservation:
    pose: HandPose
    features: PoseFeatures
    alpha: AlphaMask | None = None
    mask: BinaryMask | None = None
    contour: Contour | None = None


class HandAnalyzer:
    """Segmentation, contour and static pose for one stream (keeps pose history)."""

    def __init__(self, d_limit=DEFAULT_D_LIMIT, u_limit=DEFAULT_U_LIMIT,
                 threshold=DEFAULT_THRESHOLD, pose: PoseThresholds = PoseThresholds()):
        self.d_limit = d_limit
        self.u_limit = u_limit
        self.threshold = threshold
        self.classifier = PoseClassifier(pose)

    def __call__(self, depth: DepthFrame, skel: SkeletonFrame) -> HandObservation:
        hand_z = float(skel.hand[2])
        if hand_z <= 0:  # hand not tracked
            features = PoseFeatures(0, (0.0, 0.0), 0.0, 0.0)
            return HandObservation(self.classifier(features), features)
        params = SegmentationParams(hand_z, self.d_limit, self.u_limit)
        alpha, mask = segment_hand(depth, params, self.threshold)
        contour = extract_contour(mask)
        features = compute_features(mask, contour)
        return HandObservation(self.classifier(features), features, alpha, mask, contour)


# ---------------------------------------------------------------------------
# Event targets
# ---------------------------------------------------------------------------

class SlideDeck:
    def __init__(self):
        self.index = 0

    def __call__(self, event: CommandEvent) -> None:
        if event.kind is EventKind.NEXT_SLIDE:
            self.index += 1
        elif event.kind is EventKind.PREV_SLIDE:
            self.index = max(0, self.index - 1)


class CursorState:
    def __init__(self):
        self.position = (0, 0)
        self.button_down = False

    def __call__(self, event: CommandEvent) -> None:
        if event.kind is EventKind.CURSOR_MOVE:
            self.position = event.args
        elif event.kind is EventKind.CLICK_DOWN:
            self.button_down = True
        elif event.kind is EventKind.CLICK_UP:
            self.button_down = False


class ModelView:
    """Re-renders the sphere into ``output_dir`` on every rotate/zoom command."""

    def __init__(self, options: RendererOptions, output_dir: Path | None):
        self.options = options
        self.output_dir = output_dir
        self.orientation = Orientation()
        self.zoom = 1.0
        self.frames: list[Path] = []

    def __call__(self, event: CommandEvent) -> None:
        if event.kind is EventKind.ROTATE_MODEL:
            self.orientation = self.orientation.stepped(*event.args)
        elif event.kind is EventKind.ZOOM:
            self.zoom *= 1.1 if event.args[0] == "in" else 1 / 1.1
        else:
            return
        if self.output_dir is not None:
            o = self.options
            fb = render_sphere(self.orientation, o.size, o.num, o.radius, o.f, self.zoom)
            path = self.output_dir / f"model_{len(self.frames):04d}.ppm"
            write_image(fb, path)
            self.frames.append(path)


@dataclass
class RunResult:
    log_lines: list[str]
    events: list[CommandEvent]
    poses: list[HandPose]
    slide_index: int
    dropped: int
    rendered: list[Path]

    def count(self, kind: EventKind) -> int:
        return sum(e.kind is kind for e in self.events)


def process_stream(stream: RecordedStream, cfg: RunConfig, library: GestureLibrary | None = None,
                   write_frames: bool = True) -> RunResult:
    analyzer = HandAnalyzer(cfg.d_limit, cfg.u_limit, cfg.threshold, cfg.pose)
    mapper = CommandMapper(library or default_library(), cfg.mapper)
    router = EventRouter({k: list(v) for k, v in cfg.routes.items()})
    slides, cursor = SlideDeck(), CursorState()
    view = ModelView(cfg.renderer, cfg.output_dir if write_frames else None)
    handlers = {"slides": slides, "cursor": cursor, "renderer": view}

    lines, events, poses = [], [], []
    for k, (depth, skel) in enumerate(stream.frames):
        try:
            obs = analyzer(depth, skel)
            frame_events = mapper.step(obs.pose, skel.hand, depth.timestamp_ms, shoulder=skel.shoulder)
            for event in frame_events:
                deliveries = router.route(event)
                for target, ev in deliveries:
                    handler = handlers.get(target)
                    if handler is not None:
                        handler(ev)
                lines.append(format_log_line(event, [t for t, _ in deliveries]))
        except Exception as exc:
            raise PipelineError(f"frame {k} (t={depth.timestamp_ms} ms): {exc}") from exc
        poses.append(obs.pose)
        events.extend(frame_events)
    return RunResult(lines, events, poses, slides.index, router.dropped, view.frames)


def run(cfg: RunConfig) -> RunResult:
    cfg.check_inputs()
    if cfg.scene is not None:
        stream = synthesize_stream(load_scene(cfg.scene, cfg.seed))
    else:
        stream = read_stream(cfg.stream)
    library = GestureLibrary.load(cfg.library) if cfg.library else None
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    result = process_stream(stream, cfg, library)
    (cfg.output_dir / "events.log").write_text("".join(line + "\n" for line in result.log_lines))
    log.info("%d frames, %d events, %d dropped", stream.frame_count, len(result.events), result.dropped)
    return result


def write_pgm(image: np.ndarray, path) -> int:
    image = np.ascontiguousarray(image, dtype=np.uint8)
    h, w = image.shape
    data = f"P5\n{w} {h}\n255\n".encode("ascii") + image.tobytes()
    Path(path).write_bytes(data)
    return len(data)
