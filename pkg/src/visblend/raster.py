"""Grayscale rasterisation of scenes and pixel-wise RMSE."""

from __future__ import annotations

import numpy as np

from . import kernels
from .scene import Scene, subtree_shapes

SUPERSAMPLE = 4


class DimensionMismatch(ValueError):
    pass


def luminance(color) -> float:
    r, g, b = color
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0


def rasterize(scene: Scene, width: int = 256, height: int = 256,
              supersample: int = SUPERSAMPLE) -> np.ndarray:
    """Render to a ``(height, width)`` float array in [0, 1], white background.

    Shapes are painted in tree pre-order, fill first then stroke, on a grid
    ``supersample`` times finer than the output which is then box-filtered.
    """
    if width < 1 or height < 1 or supersample < 1:
        raise ValueError("raster dimensions must be positive")
    W, H = width * supersample, height * supersample
    sx = W / scene.canvas[0]
    sy = H / scene.canvas[1]
    canvas = np.ones((H, W), dtype=np.float64)
    ox, oy = scene.root.offset
    for shape, x, y in subtree_shapes(scene.root, ox, oy):
        st = shape.style
        if shape.kind == "ellipse":
            cx = (shape.center[0] + x) * sx
            cy = (shape.center[1] + y) * sy
            if st.fill is not None:
                kernels.paint_ellipse(canvas, cx, cy, shape.radii[0] * sx,
                                      shape.radii[1] * sy, luminance(st.fill))
        rings = [((pts[:, 0] + x) * sx, (pts[:, 1] + y) * sy, closed)
                 for pts, closed in shape.rings()]
        if st.fill is not None and shape.kind != "ellipse":
            closed = [r for r in rings if r[2]]
            if closed:
                xs = np.concatenate([r[0] for r in closed])
                ys = np.concatenate([r[1] for r in closed])
                starts = np.cumsum([0] + [len(r[0]) for r in closed]).astype(np.int64)
                kernels.paint_rings(canvas, xs, ys, starts, luminance(st.fill))
        if st.stroke is not None and st.stroke_width > 0:
            half = st.stroke_width / 2.0 * (sx + sy) / 2.0
            for xs, ys, closed in rings:
                kernels.paint_stroke(canvas, xs, ys, closed, half, luminance(st.stroke))
    if supersample == 1:
        return canvas
    return canvas.reshape(height, supersample, width, supersample).mean(axis=(1, 3))


def rmse(a: np.ndarray, b: np.ndarray) -> float:
    """Root mean square difference of two equal-size bitmaps with values in [0, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"bitmap shapes differ: {a.shape} vs {b.shape}")
    return float(kernels.rmse(a, b))
