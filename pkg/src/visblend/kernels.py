"""Backend selection for the hot raster / geometry kernels.

The compiled extension is preferred; the numpy implementation is used when the
extension is missing or ``VISBLEND_PURE=1`` is set.
"""

from __future__ import annotations

import os

from . import _pykernels as python

compiled = None
if os.environ.get("VISBLEND_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

points_in_rings = _impl.points_in_rings
paint_rings = _impl.paint_rings
paint_ellipse = _impl.paint_ellipse
paint_stroke = _impl.paint_stroke
rmse = _impl.rmse
