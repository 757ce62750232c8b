"""Domain types shared across the engine.

Coordinate convention, used everywhere without exception: x = column,
y = row, origin at the top-left corner, y grows downward. A flow vector
(u, v) displaces x by u pixels and y by v pixels. Flow frame i stores the
displacement from frame 0 to frame i+1; all motion is anchored to the
reference frame, never frame-to-frame.

All wrapped arrays are copied on construction and marked read-only, so
instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ShapeError

_MODULE = "types"


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


def as_float_array(data, name: str, *, module: str = _MODULE) -> np.ndarray:
    """Coerce to a float64 array, rejecting non-finite values."""
    arr = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values", module=module)
    return arr


def as_binary_mask(data, name: str, *, module: str = _MODULE) -> np.ndarray:
    """Coerce to a 2-D uint8 array with values in {0, 1}."""
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}", module=module)
    if not np.isin(arr, (0, 1)).all():
        raise InputError(f"{name} must contain only 0/1 values", module=module)
    return arr.astype(np.uint8)


@dataclass(frozen=True)
class FlowField:
    """Dense per-frame displacement grids, shape (frames, H, W, 2).

    ``data[i, y, x]`` is the (u, v) displacement carrying pixel (x, y) of
    frame 0 to its position in frame i+1.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = as_float_array(self.data, "flow data")
        if arr.ndim != 4 or arr.shape[3] != 2:
            raise ShapeError(
                f"flow data must have shape (frames, H, W, 2), got {arr.shape}",
                module=_MODULE,
            )
        if min(arr.shape[:3]) < 1:
            raise ShapeError(f"flow dimensions must be >= 1, got {arr.shape}", module=_MODULE)
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @classmethod
    def zeros(cls, frames: int, height: int, width: int) -> "FlowField":
        return cls(np.zeros((frames, height, width, 2)))


@dataclass(frozen=True)
class SparseHints:
    """Sparse motion vectors plus the binary mask marking hinted pixels.

    ``vectors`` is FlowField-shaped and exactly zero wherever ``mask`` is 0.
    ``collisions`` counts hint sources that overwrote an earlier one at the
    same pixel; ``clamped`` counts sources whose anchor had to be clamped
    into the image bounds.
    """

    vectors: np.ndarray
    mask: np.ndarray
    collisions: int = 0
    clamped: int = 0

    def __post_init__(self):
        vec = as_float_array(self.vectors, "hint vectors")
        if vec.ndim != 4 or vec.shape[3] != 2:
            raise ShapeError(
                f"hint vectors must have shape (frames, H, W, 2), got {vec.shape}",
                module=_MODULE,
            )
        mask = as_binary_mask(self.mask, "hint mask")
        if mask.shape != vec.shape[1:3]:
            raise ShapeError(
                f"hint mask shape {mask.shape} does not match vectors {vec.shape[1:3]}",
                module=_MODULE,
            )
        if vec[:, mask == 0].any():
            raise InputError("hint vectors must be zero off-mask", module=_MODULE)
        object.__setattr__(self, "vectors", _freeze(vec))
        object.__setattr__(self, "mask", _freeze(mask))

    @property
    def frames(self) -> int:
        return self.vectors.shape[0]

    @property
    def height(self) -> int:
        return self.vectors.shape[1]

    @property
    def width(self) -> int:
        return self.vectors.shape[2]

    @property
    def hint_count(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class Trajectory:
    """Ordered control points (x, y), fractional coordinates allowed."""

    points: np.ndarray

    def __post_init__(self):
        pts = as_float_array(self.points, "trajectory points")
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ShapeError(f"trajectory points must have shape (P, 2), got {pts.shape}", module=_MODULE)
        if pts.shape[0] < 2:
            raise ShapeError("a trajectory needs at least 2 control points", module=_MODULE)
        object.__setattr__(self, "points", _freeze(pts))

    @property
    def start(self) -> np.ndarray:
        return self.points[0]


@dataclass(frozen=True)
class LandmarkSequence:
    """Per-frame landmark coordinates, shape (L, K, 2). Frame 0 is the reference set."""

    coords: np.ndarray

    def __post_init__(self):
        arr = as_float_array(self.coords, "landmark coords")
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ShapeError(f"landmark coords must have shape (L, K, 2), got {arr.shape}", module=_MODULE)
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"landmark coords must be non-empty, got {arr.shape}", module=_MODULE)
        object.__setattr__(self, "coords", _freeze(arr))

    @property
    def frames(self) -> int:
        return self.coords.shape[0]

    @property
    def points_per_frame(self) -> int:
        return self.coords.shape[1]

    @property
    def reference(self) -> np.ndarray:
        return self.coords[0]


@dataclass(frozen=True)
class ImageFrame:
    """An (H, W, C) image with C in {1, 3, 4} and values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = as_float_array(self.data, "image data")
        if arr.ndim != 3 or arr.shape[2] not in (1, 3, 4):
            raise ShapeError(
                f"image data must have shape (H, W, C) with C in {{1, 3, 4}}, got {arr.shape}",
                module=_MODULE,
            )
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InputError("image values must lie in [0, 1]", module=_MODULE)
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class RegionMask:
    """Binary H×W region mask for motion brushes and adapter fusion."""

    grid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", _freeze(as_binary_mask(self.grid, "region mask")))

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]


@dataclass(frozen=True)
class FeaturePyramid:
    """Multi-scale feature stack. Level s has spatial size (H/2^s, W/2^s).

    Level 0 matches the source resolution; construction requires every
    level to be an exact halving of the previous one.
    """

    levels: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.levels) < 1:
            raise ShapeError("a pyramid needs at least one level", module=_MODULE)
        frozen = []
        h0, w0 = None, None
        for s, level in enumerate(self.levels):
            arr = as_float_array(level, f"pyramid level {s}")
            if arr.ndim != 3:
                raise ShapeError(f"pyramid level {s} must be (H, W, C), got {arr.shape}", module=_MODULE)
            if s == 0:
                h0, w0 = arr.shape[:2]
            expected = (h0 >> s, w0 >> s)
            if h0 % (1 << s) or w0 % (1 << s) or arr.shape[:2] != expected:
                raise ShapeError(
                    f"pyramid level {s} has shape {arr.shape[:2]}, expected {expected}",
                    module=_MODULE,
                )
            frozen.append(_freeze(arr))
        object.__setattr__(self, "levels", tuple(frozen))

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def height(self) -> int:
        return self.levels[0].shape[0]

    @property
    def width(self) -> int:
        return self.levels[0].shape[1]


def round_pixel(value: float) -> int:
    """Round a fractional coordinate to its nearest integer pixel.

    Half-way cases round up; banker's rounding would make .5 anchors
    alternate by parity.
    """
    return int(np.floor(value + 0.5))
