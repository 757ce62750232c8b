"""Middlebury .flo read/write.

Layout: float32 LE magic 202021.25, int32 LE width, int32 LE height, then
height*width (u, v) float32 LE pairs in row-major order.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import FormatError, ShapeError

_MODULE = "flowio"

FLO_MAGIC = 202021.25


def encode_flo(flow_uv: np.ndarray) -> bytes:
    uv = np.asarray(flow_uv)
    if uv.ndim != 3 or uv.shape[2] != 2:
        raise ShapeError(f"flow must be (H, W, 2), got {uv.shape}", module=_MODULE)
    height, width = uv.shape[:2]
    header = np.array([FLO_MAGIC], dtype="<f4").tobytes() + np.array(
        [width, height], dtype="<i4"
    ).tobytes()
    return header + np.ascontiguousarray(uv.astype("<f4")).tobytes()


def write_flo(path: str | os.PathLike, flow_uv: np.ndarray) -> None:
    blob = encode_flo(flow_uv)
    with open(path, "wb") as fh:
        fh.write(blob)


def read_flo(path: str | os.PathLike) -> np.ndarray:
    """Returns the stored (H, W, 2) float32 array."""
    with open(path, "rb") as fh:
        magic = np.fromfile(fh, dtype="<f4", count=1)
        if magic.size != 1 or magic[0] != np.float32(FLO_MAGIC):
            raise FormatError(f"{path}: bad magic, not a .flo file", module=_MODULE)
        dims = np.fromfile(fh, dtype="<i4", count=2)
        if dims.size != 2:
            raise FormatError(f"{path}: truncated header", module=_MODULE)
        width, height = int(dims[0]), int(dims[1])
        if width <= 0 or height <= 0:
            raise FormatError(f"{path}: invalid dims {width}x{height}", module=_MODULE)
        data = np.fromfile(fh, dtype="<f4", count=width * height * 2)
        if data.size != width * height * 2:
            raise FormatError(
                f"{path}: expected {width * height * 2} floats, got {data.size}",
                module=_MODULE,
            )
        trailing = fh.read(1)
        if trailing:
            raise FormatError(f"{path}: trailing bytes after flow data", module=_MODULE)
    return data.reshape(height, width, 2)
