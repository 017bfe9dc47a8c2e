"""Hand segmentation from a depth frame.

The alpha map encodes proximity to the tracked hand depth inside a window
``[hand - d_limit, hand + u_limit]``::

    alpha = 255 - 255 * (depth - depth_of_hand + d_limit) / (d_limit + u_limit)

truncated toward zero and clamped to 0..255. Only pixels of the target
player with a valid reading get a non-zero alpha.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .frame_model import DepthFrame

DEFAULT_D_LIMIT = 80.0
DEFAULT_U_LIMIT = 120.0
DEFAULT_THRESHOLD = 1


@dataclass(frozen=True)
class SegmentationParams:
    depth_of_hand: float
    d_limit: float = DEFAULT_D_LIMIT
    u_limit: float = DEFAULT_U_LIMIT
    target_player: int = 1

    def __post_init__(self):
        if not self.d_limit > 0 or not self.u_limit > 0:
            raise ValueError(f"d_limit and u_limit must be > 0, got {self.d_limit}, {self.u_limit}")
        if not self.depth_of_hand > 0:
            raise ValueError(f"depth_of_hand must be > 0, got {self.depth_of_hand}")
        if not 1 <= self.target_player <= 6:
            raise ValueError(f"target_player must be in 1..6, got {self.target_player}")


@dataclass(frozen=True, eq=False)
class AlphaMask:
    width: int
    height: int
    alpha: np.ndarray  # (height, width) uint8


@dataclass(frozen=True, eq=False)
class BinaryMask:
    width: int
    height: int
    bits: np.ndarray  # (height, width) bool

    @classmethod
    def from_array(cls, bits) -> "BinaryMask":
        bits = np.ascontiguousarray(bits, dtype=bool)
        return cls(bits.shape[1], bits.shape[0], bits)

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and np.array_equal(self.bits, other.bits)

    __hash__ = None


def compute_alpha(frame: DepthFrame, params: SegmentationParams) -> AlphaMask:
    depth = frame.depth_image().astype(np.float64)
    player = frame.player_image()
    # 255 - 255*(d - h + dl)/(dl + ul) rearranged to 255*(h + ul - d)/(dl + ul):
    # with integer inputs numerator and denominator are exact, so the single
    # rounded division cannot push a non-integer across an integer boundary.
    span = float(params.d_limit) + float(params.u_limit)
    raw = 255.0 * (float(params.depth_of_hand) + float(params.u_limit) - depth) / span
    alpha = np.clip(np.trunc(raw), 0, 255).astype(np.uint8)
    alpha[(player != params.target_player) | (depth == 0)] = 0
    return AlphaMask(frame.width, frame.height, alpha)


def binarize_alpha(mask: AlphaMask, threshold: int = DEFAULT_THRESHOLD) -> BinaryMask:
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in 0..255, got {threshold}")
    return BinaryMask(mask.width, mask.height, mask.alpha >= threshold)


def smooth_mask(mask: BinaryMask) -> BinaryMask:
    """One 3x3 median pass; pixels outside the image count as background."""
    bits = kernels.smooth3x3(np.ascontiguousarray(mask.bits, dtype=bool))
    return BinaryMask(mask.width, mask.height, bits)


def segment_hand(frame: DepthFrame, params: SegmentationParams,
                 threshold: int = DEFAULT_THRESHOLD) -> tuple[AlphaMask, BinaryMask]:
    """Alpha map plus its thresholded and smoothed silhouette."""
    alpha = compute_alpha(frame, params)
    return alpha, smooth_mask(binarize_alpha(alpha, threshold))
