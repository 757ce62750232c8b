"""8-bit PNG encode/decode for reference images and region masks.

Float images are quantized to uint8; values of the form k/255 round-trip
exactly, everything else loses sub-quantum precision.
"""

from __future__ import annotations

import io
import os

import numpy as np
from PIL import Image

from .errors import FormatError, ShapeError
from .types import ImageFrame, RegionMask

_MODULE = "images"

_MODES = {1: "L", 3: "RGB", 4: "RGBA"}


def _to_uint8(image: ImageFrame) -> np.ndarray:
    return np.round(image.data * 255.0).astype(np.uint8)


def encode_png(image: ImageFrame) -> bytes:
    arr = _to_uint8(image)
    mode = _MODES[arr.shape[2]]
    if mode == "L":
        arr = arr[:, :, 0]
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def write_png(path: str | os.PathLike, image: ImageFrame) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(image))


def decode_png(blob: bytes) -> ImageFrame:
    try:
        img = Image.open(io.BytesIO(blob))
        img.load()
    except Exception as exc:
        raise FormatError(f"not a decodable image: {exc}", module=_MODULE) from exc
    if img.mode not in ("L", "RGB", "RGBA"):
        img = img.convert("RGBA" if "A" in img.mode else "RGB")
    arr = np.asarray(img, dtype=np.float64) / 255.0
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return ImageFrame(arr)


def read_png(path: str | os.PathLike) -> ImageFrame:
    with open(path, "rb") as fh:
        return decode_png(fh.read())


def encode_mask_png(mask: RegionMask) -> bytes:
    arr = (mask.grid * 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def write_mask_png(path: str | os.PathLike, mask: RegionMask) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_mask_png(mask))


def decode_mask_png(blob: bytes) -> RegionMask:
    frame = decode_png(blob)
    if frame.data.shape[2] != 1:
        raise ShapeError("mask PNG must be grayscale", module=_MODULE)
    return RegionMask((frame.data[:, :, 0] > 0.5).astype(np.uint8))


def read_mask_png(path: str | os.PathLike) -> RegionMask:
    with open(path, "rb") as fh:
        return decode_mask_png(fh.read())
