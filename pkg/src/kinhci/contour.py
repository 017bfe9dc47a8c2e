"""Boundary points of a binary silhouette.

Rows are scanned left-to-right and right-to-left, columns top-to-bottom and
bottom-to-top. Whenever two 4-adjacent pixels differ, the foreground one of
the pair is marked; foreground pixels on the image border are marked too.
The result is an unordered point set, not a traced chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .segmentation import BinaryMask


@dataclass(frozen=True, eq=False)
class Contour:
    width: int
    height: int
    boundary: np.ndarray  # (height, width) bool

    @property
    def points(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.boundary)
        return set(zip(xs.tolist(), ys.tolist()))

    def coords(self) -> np.ndarray:
        """``(n, 2)`` array of ``(x, y)`` boundary coordinates in scan order."""
        ys, xs = np.nonzero(self.boundary)
        return np.stack([xs, ys], axis=1)

    def __len__(self) -> int:
        return int(self.boundary.sum())


def extract_contour(mask: BinaryMask) -> Contour:
    bits = np.ascontiguousarray(mask.bits, dtype=bool)
    return Contour(mask.width, mask.height, kernels.boundary_scan(bits))


def overlay(mask: BinaryMask, contour: Contour) -> np.ndarray:
    """8-bit image: boundary 255, interior 128, background 0."""
    img = np.where(mask.bits, 128, 0).astype(np.uint8)
    img[contour.boundary] = 255
    return img
