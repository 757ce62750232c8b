"""Forward warping of images and multi-scale feature pyramids.

Every source pixel splats its value onto the four integer neighbours of its
flow-displaced target with bilinear weights; accumulation order is fixed so
output is deterministic. Targets left uncovered keep the unwarped source
value at that pixel, giving the preview renderer a hole-free result.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, ParameterError, ShapeError
from .types import FeaturePyramid, FlowField, ImageFrame, as_float_array

_MODULE = "warp"

WARP_MODES = ("average", "softmax")

# Targets whose accumulated splat weight falls below this are holes.
COVERAGE_EPS = 1e-4

# Softmax-mode temperature, in pixels of flow magnitude.
SOFTMAX_TAU = 10.0


def pad_to_multiple(grid: np.ndarray, multiple: int) -> np.ndarray:
    """Reflect-pad the trailing spatial rows/cols up to a multiple. Crop after processing."""
    height, width = grid.shape[:2]
    pad_h = (-height) % multiple
    pad_w = (-width) % multiple
    if pad_h == 0 and pad_w == 0:
        return grid
    pad = [(0, pad_h), (0, pad_w)] + [(0, 0)] * (grid.ndim - 2)
    return np.pad(grid, pad, mode="reflect")


def build_pyramid(image: ImageFrame | np.ndarray, levels: int) -> FeaturePyramid:
    """Area-averaging pyramid: level 0 is the image, each level halves the previous.

    A deterministic, training-free stand-in for a learned reference encoder.
    Spatial dims must be divisible by 2^(levels-1); pad beforehand via
    :func:`pad_to_multiple`.
    """
    if levels < 1:
        raise ParameterError(f"levels must be >= 1, got {levels}", module=_MODULE)
    data = image.data if isinstance(image, ImageFrame) else as_float_array(image, "image", module=_MODULE)
    if data.ndim == 2:
        data = data[:, :, None]
    if data.ndim != 3:
        raise ShapeError(f"image must be (H, W[, C]), got shape {data.shape}", module=_MODULE)
    height, width = data.shape[:2]
    factor = 1 << (levels - 1)
    if height < factor or width < factor:
        raise ParameterError(
            f"image {height}x{width} too small for {levels} levels", module=_MODULE
        )
    if height % factor or width % factor:
        raise ParameterError(
            f"image {height}x{width} not divisible by 2^(levels-1)={factor}; pad first",
            module=_MODULE,
        )
    stack = [data]
    for _ in range(1, levels):
        stack.append(_halve(stack[-1]))
    return FeaturePyramid(levels=tuple(stack))


def _halve(grid: np.ndarray) -> np.ndarray:
    h, w, c = grid.shape
    return grid.reshape(h // 2, 2, w // 2, 2, c).mean(axis=(1, 3))


def scale_flow_frame(flow_uv: np.ndarray, level: int) -> np.ndarray:
    """Area-downsample one (H, W, 2) flow frame by 2^level and shrink vectors to match."""
    if level < 0:
        raise ParameterError(f"level must be >= 0, got {level}", module=_MODULE)
    uv = as_float_array(flow_uv, "flow frame", module=_MODULE)
    if uv.ndim != 3 or uv.shape[2] != 2:
        raise ShapeError(f"flow frame must be (H, W, 2), got {uv.shape}", module=_MODULE)
    if level == 0:
        return uv.copy()
    factor = 1 << level
    h, w = uv.shape[:2]
    if h % factor or w % factor:
        raise ShapeError(
            f"flow {h}x{w} not divisible by 2^level={factor}", module=_MODULE
        )
    out = uv
    for _ in range(level):
        out = _halve(out)
    return out / factor


def scale_flow(flow: FlowField, level: int) -> FlowField:
    """Apply :func:`scale_flow_frame` to every frame."""
    if level == 0:
        return flow
    return FlowField(np.stack([scale_flow_frame(frame, level) for frame in flow.data]))


def forward_warp(
    grid: np.ndarray,
    flow_uv: np.ndarray,
    mode: str = "average",
    *,
    tau: float = SOFTMAX_TAU,
    coverage_eps: float = COVERAGE_EPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Splat a feature grid along a single flow frame.

    Returns (warped grid, coverage). ``average`` normalises by accumulated
    bilinear weight; ``softmax`` additionally scales each source's weight by
    exp(-|flow|/tau) so large motions defer to small ones where they
    collide. Contributions targeting outside the grid are dropped, and
    targets with coverage below ``coverage_eps`` fall back to the source
    value at that pixel.
    """
    if mode not in WARP_MODES:
        raise ParameterError(f"mode must be one of {WARP_MODES}, got {mode!r}", module=_MODULE)
    source = np.asarray(grid, dtype=np.float64)
    squeeze = source.ndim == 2
    if squeeze:
        source = source[:, :, None]
    if source.ndim != 3:
        raise ShapeError(f"grid must be (H, W[, C]), got shape {np.asarray(grid).shape}", module=_MODULE)
    uv = np.asarray(flow_uv, dtype=np.float64)
    if uv.ndim != 3 or uv.shape[2] != 2:
        raise ShapeError(f"flow frame must be (H, W, 2), got {uv.shape}", module=_MODULE)
    if uv.shape[:2] != source.shape[:2]:
        raise ShapeError(
            f"grid {source.shape[:2]} and flow {uv.shape[:2]} spatial dims differ", module=_MODULE
        )
    if not np.all(np.isfinite(uv)):
        raise InputError("flow contains non-finite values", module=_MODULE)

    height, width, channels = source.shape
    ys, xs = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    tx = (xs + uv[:, :, 0]).ravel()
    ty = (ys + uv[:, :, 1]).ravel()

    x0 = np.floor(tx).astype(np.int64)
    y0 = np.floor(ty).astype(np.int64)
    fx = tx - x0
    fy = ty - y0

    values = source.reshape(-1, channels)
    if mode == "softmax":
        magnitude = np.hypot(uv[:, :, 0], uv[:, :, 1]).ravel()
        importance = np.exp(-magnitude / tau)
    else:
        importance = np.ones(tx.size)

    accum = np.zeros((height, width, channels))
    coverage = np.zeros(height * width)
    accum_flat = accum.reshape(-1, channels)
    for dx, dy, w in (
        (0, 0, (1 - fx) * (1 - fy)),
        (1, 0, fx * (1 - fy)),
        (0, 1, (1 - fx) * fy),
        (1, 1, fx * fy),
    ):
        cx = x0 + dx
        cy = y0 + dy
        inside = (cx >= 0) & (cx < width) & (cy >= 0) & (cy < height)
        weight = w * importance
        target = cy[inside] * width + cx[inside]
        np.add.at(coverage, target, weight[inside])
        np.add.at(accum_flat, target, values[inside] * weight[inside, None])

    covered = coverage >= coverage_eps
    out = values.copy()
    out[covered] = accum_flat[covered] / coverage[covered, None]
    out = out.reshape(height, width, channels)
    coverage = coverage.reshape(height, width)
    if squeeze:
        out = out[:, :, 0]
    return out, coverage


def warp_pyramid(pyr: FeaturePyramid, flow_uv: np.ndarray, mode: str = "average") -> FeaturePyramid:
    """Warp each pyramid level by the level-0 flow rescaled to its resolution."""
    uv = np.asarray(flow_uv, dtype=np.float64)
    if uv.shape[:2] != (pyr.height, pyr.width):
        raise ShapeError(
            f"flow {uv.shape[:2]} must match pyramid level 0 {(pyr.height, pyr.width)}",
            module=_MODULE,
        )
    warped = []
    for s, level in enumerate(pyr.levels):
        scaled = scale_flow_frame(uv, s)
        warped.append(forward_warp(level, scaled, mode)[0])
    return FeaturePyramid(levels=tuple(warped))
