"""Time the numba and pure-numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from kinhci import kernels
from kinhci.renderer import Camera, FrameBuffer, Orientation, build_sphere, rotate, tessellate


def sphere_triangles(num=40, size=(640, 480)):
    quads, _ = tessellate(rotate(build_sphere(num), Orientation(0.4, 0.3)), Camera())
    fb = FrameBuffer(*size)
    tris = np.concatenate([fb.to_buffer_coords(q.triangles()) for q in quads])
    colors = np.tile(np.array([[200, 90, 40]], np.uint8), (len(tris), 1))
    return tris, colors, size


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    mask = rng.random((480, 640)) < 0.5
    tris, colors, (w, h) = sphere_triangles()

    cases = {
        "smooth3x3 640x480": lambda f: f(mask),
        "boundary_scan 640x480": lambda f: f(mask),
        f"fill_triangles {len(tris)} tris": lambda f: f(np.zeros((h, w, 3), np.uint8), tris, colors),
    }
    impls = {
        "smooth3x3 640x480": ("smooth3x3_numpy", "smooth3x3_numba"),
        "boundary_scan 640x480": ("boundary_scan_numpy", "boundary_scan_numba"),
        f"fill_triangles {len(tris)} tris": ("fill_triangles_numpy", "fill_triangles_numba"),
    }
    if not kernels.HAVE_NUMBA:
        print("numba not installed; timing numpy backend only")

    print(f"{'kernel':<28}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}")
    for label, call in cases.items():
        times = []
        for name in impls[label]:
            fn = getattr(kernels, name, None)
            if fn is None:
                times.append(float("nan"))
                continue
            call(fn)  # warm up, compiles the numba variant
            times.append(min(timeit.repeat(lambda: call(fn), number=1, repeat=args.repeat)) * 1e3)
        print(f"{label:<28}{times[0]:>10.2f}{times[1]:>10.2f}{times[0] / times[1]:>8.1f}x")


if __name__ == "__main__":
    main()
