"""Flow visualization via the standard HSV color wheel.

Hue encodes direction, saturation encodes magnitude relative to the max,
value stays 1 so zero flow renders white.
"""

from __future__ import annotations

import numpy as np
from matplotlib.colors import hsv_to_rgb

from .errors import ShapeError

_MODULE = "viz"


def flow_to_color(flow_uv: np.ndarray, max_magnitude: float | None = None) -> np.ndarray:
    """Map one (H, W, 2) flow frame to (H, W, 3) float RGB in [0, 1].

    ``max_magnitude`` fixes the saturation scale across frames; by default
    the frame's own maximum is used (all-zero flow renders all white).
    """
    uv = np.asarray(flow_uv, dtype=np.float64)
    if uv.ndim != 3 or uv.shape[2] != 2:
        raise ShapeError(f"flow must be (H, W, 2), got {uv.shape}", module=_MODULE)
    u = uv[:, :, 0]
    v = uv[:, :, 1]
    magnitude = np.hypot(u, v)
    scale = float(magnitude.max()) if max_magnitude is None else float(max_magnitude)
    hsv = np.zeros(uv.shape[:2] + (3,))
    hsv[:, :, 0] = np.mod(np.arctan2(v, u) / (2 * np.pi), 1.0)
    hsv[:, :, 1] = magnitude / scale if scale > 0 else 0.0
    hsv[:, :, 2] = 1.0
    return hsv_to_rgb(hsv)
