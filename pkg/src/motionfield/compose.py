"""Combining several motion fields into one via region masks.

Two entry points: per-pixel flow selection for motion brushes, and
priority-ordered pyramid fusion when multiple warped previews cover
overlapping regions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, ShapeError
from .types import FeaturePyramid, FlowField, RegionMask, Trajectory, round_pixel

_MODULE = "compose"


@dataclass
class BrushGroup:
    """Trajectories split by whether their start pixel falls inside the mask."""

    inside: list[Trajectory]
    outside: list[Trajectory]


def split_trajectories(trajectories: Sequence[Trajectory], mask: RegionMask) -> BrushGroup:
    """Partition by mask membership of the rounded start point.

    Starts that round off the grid count as outside.
    """
    height, width = mask.grid.shape
    inside: list[Trajectory] = []
    outside: list[Trajectory] = []
    for traj in trajectories:
        x, y = traj.start
        col = round_pixel(x)
        row = round_pixel(y)
        if 0 <= row < height and 0 <= col < width and mask.grid[row, col]:
            inside.append(traj)
        else:
            outside.append(traj)
    return BrushGroup(inside=inside, outside=outside)


def brush_compose(flow_in: FlowField, flow_out: FlowField, mask: RegionMask) -> FlowField:
    """Per-pixel select, every frame: mask-1 pixels take flow_in, the rest flow_out."""
    if flow_in.data.shape != flow_out.data.shape:
        raise ShapeError(
            f"flow shapes differ: {flow_in.data.shape} vs {flow_out.data.shape}",
            module=_MODULE,
        )
    if mask.grid.shape != (flow_in.height, flow_in.width):
        raise ShapeError(
            f"mask {mask.grid.shape} does not match flow {(flow_in.height, flow_in.width)}",
            module=_MODULE,
        )
    region = mask.grid.astype(bool)
    out = flow_out.data.copy()
    out[:, region, :] = flow_in.data[:, region, :]
    return FlowField(out)


def downsample_mask(grid: np.ndarray, level: int) -> np.ndarray:
    """Area-average then threshold at 0.5; exact ties count as inside."""
    if level == 0:
        return grid.astype(np.uint8)
    factor = 1 << level
    h, w = grid.shape
    if h % factor or w % factor:
        raise ShapeError(f"mask {h}x{w} not divisible by {factor}", module=_MODULE)
    avg = grid.astype(np.float64).reshape(h // factor, factor, w // factor, factor).mean(axis=(1, 3))
    return (avg >= 0.5).astype(np.uint8)


def fuse_adapters(
    pyrs: Sequence[tuple[FeaturePyramid, RegionMask]],
    priority: Sequence[int] | None = None,
) -> FeaturePyramid:
    """Priority-select warped pyramids per pixel at every level.

    ``priority`` orders indices into ``pyrs``, highest first (default: given
    order). A pixel takes the first pyramid whose downsampled mask covers
    it; pixels no mask claims fall to the lowest-priority pyramid, so the
    last entry acts as the background adapter.
    """
    if not pyrs:
        raise ParameterError("need at least one (pyramid, mask) pair", module=_MODULE)
    order = list(range(len(pyrs))) if priority is None else list(priority)
    if sorted(order) != list(range(len(pyrs))):
        raise ParameterError(
            f"priority must permute 0..{len(pyrs) - 1}, got {order}", module=_MODULE
        )
    ref = pyrs[0][0]
    for i, (pyr, mask) in enumerate(pyrs):
        if pyr.num_levels != ref.num_levels:
            raise ShapeError(f"pyramid {i} level count differs", module=_MODULE)
        for s in range(ref.num_levels):
            if pyr.levels[s].shape != ref.levels[s].shape:
                raise ShapeError(f"pyramid {i} level {s} shape differs", module=_MODULE)
        if mask.grid.shape != (ref.height, ref.width):
            raise ShapeError(
                f"mask {i} shape {mask.grid.shape} differs from pyramid {(ref.height, ref.width)}",
                module=_MODULE,
            )
    fused = []
    for s in range(ref.num_levels):
        level = pyrs[order[-1]][0].levels[s].copy()
        # Walk priority lowest-first so higher entries overwrite overlaps.
        for idx in reversed(order):
            region = downsample_mask(pyrs[idx][1].grid, s).astype(bool)
            level[region] = pyrs[idx][0].levels[s][region]
        fused.append(level)
    return FeaturePyramid(levels=tuple(fused))
