"""Depth-camera gesture pipeline for hands-free classroom control.

Synthetic depth streams go through hand segmentation, contour extraction,
static (fist/open) and dynamic (trajectory) gesture recognition, and come
out as virtual mouse, slide and model-rotation commands. A small software
rasterizer renders the rotating sphere those commands drive.
"""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
