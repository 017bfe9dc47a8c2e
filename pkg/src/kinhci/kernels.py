"""Hot per-pixel kernels, each in two flavours.

Every kernel has a loop version (compiled with numba's ``@njit`` when numba
is importable) and a vectorized numpy version. The public names at the
bottom of this module are bound once, at import time, according to the
``KINHCI_BACKEND`` environment variable:

    KINHCI_BACKEND=numba   loop kernels compiled by numba (default)
    KINHCI_BACKEND=numpy   pure numpy kernels, no numba import

If numba is requested but not installed, the numpy path is used silently.
Both paths must produce bit-identical output; ``tests/test_kernels.py``
checks this and ``benchmarks/bench_kernels.py`` times them.
"""

from __future__ import annotations

import math
import os

import numpy as np

_requested = os.environ.get("KINHCI_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"KINHCI_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numba":
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
else:
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# 3x3 majority (binary median) filter, zero padded
# ---------------------------------------------------------------------------

def _smooth3x3_loops(bits):
    h, w = bits.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            padded[r + 1, c + 1] = bits[r, c]
    out = np.zeros((h, w), dtype=np.bool_)
    for r in range(h):
        for c in range(w):
            n = (padded[r, c] + padded[r, c + 1] + padded[r, c + 2]
                 + padded[r + 1, c] + padded[r + 1, c + 1] + padded[r + 1, c + 2]
                 + padded[r + 2, c] + padded[r + 2, c + 1] + padded[r + 2, c + 2])
            out[r, c] = n >= 5
    return out


def smooth3x3_numpy(bits: np.ndarray) -> np.ndarray:
    h, w = bits.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = bits
    count = np.zeros((h, w), dtype=np.uint8)
    for dr in range(3):
        for dc in range(3):
            count += padded[dr:dr + h, dc:dc + w]
    return count >= 5


# ---------------------------------------------------------------------------
# Four-directional boundary scan
# ---------------------------------------------------------------------------

def _boundary_scan_loops(bits):
    # Each scan marks the foreground side of every fg/bg transition it meets;
    # on booleans ``a > b`` is ``a and not b`` without a branch.
    # Vertical scans walk row pairs so memory is read in storage order.
    h, w = bits.shape
    out = np.zeros((h, w), dtype=np.bool_)
    # rows, left -> right then right -> left
    for r in range(h):
        for c in range(w - 1):
            out[r, c] |= bits[r, c] > bits[r, c + 1]
        for c in range(w - 1, 0, -1):
            out[r, c] |= bits[r, c] > bits[r, c - 1]
    # columns, top -> bottom then bottom -> top
    for r in range(h - 1):
        for c in range(w):
            out[r, c] |= bits[r, c] > bits[r + 1, c]
    for r in range(h - 1, 0, -1):
        for c in range(w):
            out[r, c] |= bits[r, c] > bits[r - 1, c]
    # foreground on the image border has an implicit background neighbour
    for c in range(w):
        out[0, c] |= bits[0, c]
        out[h - 1, c] |= bits[h - 1, c]
    for r in range(h):
        out[r, 0] |= bits[r, 0]
        out[r, w - 1] |= bits[r, w - 1]
    return out


def boundary_scan_numpy(bits: np.ndarray) -> np.ndarray:
    out = np.zeros(bits.shape, dtype=bool)
    if bits.size == 0:
        return out
    dh = bits[:, 1:] != bits[:, :-1]
    out[:, :-1] |= dh & bits[:, :-1]
    out[:, 1:] |= dh & bits[:, 1:]
    dv = bits[1:, :] != bits[:-1, :]
    out[:-1, :] |= dv & bits[:-1, :]
    out[1:, :] |= dv & bits[1:, :]
    out[0, :] |= bits[0, :]
    out[-1, :] |= bits[-1, :]
    out[:, 0] |= bits[:, 0]
    out[:, -1] |= bits[:, -1]
    return out


# ---------------------------------------------------------------------------
# Triangle fill with half-space tests and the top-left rule
# ---------------------------------------------------------------------------
# Coordinates are buffer coordinates: x to the right, y up, pixel (r, c) has
# its centre at (c + 0.5, r + 0.5) and row 0 is the bottom row.

def _fill_triangles_loops(buf, tris, colors):
    h = buf.shape[0]
    w = buf.shape[1]
    for t in range(tris.shape[0]):
        ax = tris[t, 0, 0]
        ay = tris[t, 0, 1]
        bx = tris[t, 1, 0]
        by = tris[t, 1, 1]
        cx = tris[t, 2, 0]
        cy = tris[t, 2, 1]
        area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if area2 == 0.0 or not math.isfinite(area2):
            continue
        if area2 < 0.0:
            bx, cx = cx, bx
            by, cy = cy, by
        c0 = max(0, int(math.floor(min(ax, bx, cx) - 0.5)))
        c1 = min(w - 1, int(math.ceil(max(ax, bx, cx) - 0.5)))
        r0 = max(0, int(math.floor(min(ay, by, cy) - 0.5)))
        r1 = min(h - 1, int(math.ceil(max(ay, by, cy) - 0.5)))
        tl0 = (cy - by) < 0.0 or ((cy - by) == 0.0 and (cx - bx) < 0.0)
        tl1 = (ay - cy) < 0.0 or ((ay - cy) == 0.0 and (ax - cx) < 0.0)
        tl2 = (by - ay) < 0.0 or ((by - ay) == 0.0 and (bx - ax) < 0.0)
        for r in range(r0, r1 + 1):
            py = r + 0.5
            for c in range(c0, c1 + 1):
                px = c + 0.5
                e0 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
                e1 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
                e2 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
                if ((e0 > 0.0 or (e0 == 0.0 and tl0))
                        and (e1 > 0.0 or (e1 == 0.0 and tl1))
                        and (e2 > 0.0 or (e2 == 0.0 and tl2))):
                    buf[r, c, 0] = colors[t, 0]
                    buf[r, c, 1] = colors[t, 1]
                    buf[r, c, 2] = colors[t, 2]
    return buf


def _edge_inside(e, ex, ey):
    topleft = ey < 0.0 or (ey == 0.0 and ex < 0.0)
    return (e > 0.0) | ((e == 0.0) & topleft)


def fill_triangles_numpy(buf: np.ndarray, tris: np.ndarray, colors: np.ndarray) -> np.ndarray:
    h, w = buf.shape[:2]
    for t in range(tris.shape[0]):
        (ax, ay), (bx, by), (cx, cy) = (tuple(map(float, v)) for v in tris[t])
        area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if area2 == 0.0 or not math.isfinite(area2):
            continue
        if area2 < 0.0:
            bx, cx = cx, bx
            by, cy = cy, by
        c0 = max(0, math.floor(min(ax, bx, cx) - 0.5))
        c1 = min(w - 1, math.ceil(max(ax, bx, cx) - 0.5))
        r0 = max(0, math.floor(min(ay, by, cy) - 0.5))
        r1 = min(h - 1, math.ceil(max(ay, by, cy) - 0.5))
        if c1 < c0 or r1 < r0:
            continue
        py, px = np.mgrid[r0:r1 + 1, c0:c1 + 1].astype(np.float64)
        py += 0.5
        px += 0.5
        e0 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
        e1 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
        e2 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        inside = (_edge_inside(e0, cx - bx, cy - by)
                  & _edge_inside(e1, ax - cx, ay - cy)
                  & _edge_inside(e2, bx - ax, by - ay))
        buf[r0:r1 + 1, c0:c1 + 1][inside] = colors[t]
    return buf


# ---------------------------------------------------------------------------
# Backend binding
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    smooth3x3_numba = numba.njit(cache=True)(_smooth3x3_loops)
    boundary_scan_numba = numba.njit(cache=True)(_boundary_scan_loops)
    fill_triangles_numba = numba.njit(cache=True)(_fill_triangles_loops)

    smooth3x3 = smooth3x3_numba
    boundary_scan = boundary_scan_numba
    fill_triangles = fill_triangles_numba
else:
    smooth3x3 = smooth3x3_numpy
    boundary_scan = boundary_scan_numpy
    fill_triangles = fill_triangles_numpy
