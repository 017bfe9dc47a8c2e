"""Flat-shaded software rendering of a parametric sphere.

Mesh point ``(i, j)`` of a ``num`` x ``num`` grid sits at longitude
``2*pi*i/num`` and colatitude ``pi*j/num``::

    x = r sin(pi j/num) cos(2 pi i/num)
    y = r cos(pi j/num)
    z = r sin(pi j/num) sin(2 pi i/num)

Points are rotated, projected with ``(x f/(f+z), y f/(f+z))`` and each grid
cell is drawn as two triangles with index pattern ``0,1,3, 1,2,3`` in
back-to-front order of mean depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import kernels

DEFAULT_RADIUS = 160.0
DEFAULT_F = 300.0
ANGLE_STEP = 0.05
TRIANGLE_INDICES = (0, 1, 3, 1, 2, 3)

Color = tuple[int, int, int]
CHECKER_COLORS: tuple[Color, Color] = ((235, 235, 225), (40, 90, 200))


class BadSubdivision(ValueError):
    pass


class BehindCamera(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SphereMesh:
    num: int
    radius: float
    grid: np.ndarray  # (num+1, num+1, 3), indexed [i, j]


@dataclass(frozen=True)
class Camera:
    f: float = DEFAULT_F

    def __post_init__(self):
        if not self.f > 0:
            raise ValueError(f"focal parameter must be > 0, got {self.f}")

    @property
    def eps(self) -> float:
        return 1e-6 * self.f


@dataclass(frozen=True)
class Orientation:
    anglex: float = 0.0  # about the y-axis
    angley: float = 0.0  # about the x-axis

    def __post_init__(self):
        if not (math.isfinite(self.anglex) and math.isfinite(self.angley)):
            raise ValueError("orientation angles must be finite")

    def stepped(self, dax: float, day: float) -> "Orientation":
        return Orientation(self.anglex + dax, self.angley + day)


@dataclass(frozen=True, eq=False)
class ProjectedQuad:
    """Projected corners of grid cell ``(i, j)``, in cyclic order.

    vertices[0..3] are cells (i, j), (i, j+1), (i+1, j+1), (i+1, j), so the
    index pattern 0,1,3 / 1,2,3 splits the quad along its 1-3 diagonal.
    """

    i: int
    j: int
    vertices: np.ndarray  # (4, 2)
    mean_z: float

    def triangles(self) -> np.ndarray:
        return self.vertices[list(TRIANGLE_INDICES)].reshape(2, 3, 2)


class FrameBuffer:
    """RGB pixels addressed with the origin at the image centre and +y up."""

    def __init__(self, width: int, height: int, background: Color = (0, 0, 0)):
        if width < 1 or height < 1:
            raise ValueError(f"frame buffer must be at least 1x1, got {width}x{height}")
        self.width = width
        self.height = height
        # row 0 is the bottom row; write_image flips to top-down
        self.pixels = np.empty((height, width, 3), dtype=np.uint8)
        self.pixels[:] = background

    def copy(self) -> "FrameBuffer":
        fb = FrameBuffer(self.width, self.height)
        fb.pixels[:] = self.pixels
        return fb

    def to_buffer_coords(self, xy: np.ndarray) -> np.ndarray:
        out = np.array(xy, dtype=np.float64, copy=True)
        out[..., 0] += self.width / 2
        out[..., 1] += self.height / 2
        return out

    def screen_rows(self) -> np.ndarray:
        """Pixels top-to-bottom, as written to image files."""
        return self.pixels[::-1]


def build_sphere(num: int, radius: float = DEFAULT_RADIUS) -> SphereMesh:
    if num < 2:
        raise BadSubdivision(f"num must be >= 2, got {num}")
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    i = np.arange(num + 1, dtype=np.float64)[:, None]
    j = np.arange(num + 1, dtype=np.float64)[None, :]
    p = math.pi
    grid = np.empty((num + 1, num + 1, 3))
    grid[..., 0] = radius * np.sin(j * p / num) * np.cos(i * 2 * p / num)
    grid[..., 1] = radius * np.cos(j * p / num) * np.ones_like(i)
    grid[..., 2] = radius * np.sin(j * p / num) * np.sin(i * 2 * p / num)
    return SphereMesh(num, float(radius), grid)


def rotation_matrix(o: Orientation) -> np.ndarray:
    """Rotation about x by ``angley`` followed by rotation about y by ``anglex``."""
    ca, sa = math.cos(o.angley), math.sin(o.angley)
    cb, sb = math.cos(o.anglex), math.sin(o.anglex)
    rot_x = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    rot_y = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    return rot_y @ rot_x


def rotate(mesh: SphereMesh | np.ndarray, o: Orientation) -> np.ndarray:
    grid = mesh.grid if isinstance(mesh, SphereMesh) else np.asarray(mesh, dtype=np.float64)
    return grid @ rotation_matrix(o).T


def project(point: Sequence[float], cam: Camera) -> tuple[float, float]:
    x, y, z = (float(v) for v in point)
    if z <= -cam.f + cam.eps:
        raise BehindCamera(f"z={z} is at or behind the camera plane (f={cam.f})")
    scale = cam.f / (cam.f + z)
    return x * scale, y * scale


def tessellate(grid: np.ndarray, cam: Camera) -> tuple[list[ProjectedQuad], int]:
    """Project every grid cell; returns ``(quads, culled_count)``."""
    grid = np.asarray(grid, dtype=np.float64)
    z = grid[..., 2]
    valid = z > -cam.f + cam.eps
    denom = np.where(valid, cam.f + z, 1.0)
    xy = grid[..., :2] * (cam.f / denom)[..., None]
    quads, culled = [], 0
    n = grid.shape[0] - 1
    for i in range(n):
        for j in range(n):
            corners = ((i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j))
            if not all(valid[c] for c in corners):
                culled += 1
                continue
            verts = np.array([xy[c] for c in corners])
            mean_z = float(np.mean([z[c] for c in corners]))
            quads.append(ProjectedQuad(i, j, verts, mean_z))
    return quads, culled


def checkerboard(i: int, j: int) -> Color:
    return CHECKER_COLORS[(i + j) % 2]


def rasterize(quads: Sequence[ProjectedQuad], fb: FrameBuffer,
              shading: Callable[[int, int], Color] = checkerboard) -> FrameBuffer:
    """Painter's algorithm: farthest mean z first, stable among equal depths."""
    if not quads:
        return fb
    order = sorted(range(len(quads)), key=lambda k: -quads[k].mean_z)
    tris = np.empty((2 * len(quads), 3, 2), dtype=np.float64)
    colors = np.empty((2 * len(quads), 3), dtype=np.uint8)
    for n, k in enumerate(order):
        q = quads[k]
        tris[2 * n:2 * n + 2] = fb.to_buffer_coords(q.triangles())
        colors[2 * n:2 * n + 2] = shading(q.i, q.j)
    kernels.fill_triangles(fb.pixels, tris, colors)
    return fb


def render_sphere(orientation: Orientation, size: tuple[int, int] = (640, 480), num: int = 20,
                  radius: float = DEFAULT_RADIUS, f: float = DEFAULT_F,
                  zoom: float = 1.0) -> FrameBuffer:
    mesh = build_sphere(num, radius * zoom)
    quads, _ = tessellate(rotate(mesh, orientation), Camera(f))
    return rasterize(quads, FrameBuffer(*size))


def encode_ppm(fb: FrameBuffer) -> bytes:
    header = f"P6\n{fb.width} {fb.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(fb.screen_rows()).tobytes()


def write_image(fb: FrameBuffer, path) -> int:
    data = encode_ppm(fb)
    Path(path).write_bytes(data)
    return len(data)
