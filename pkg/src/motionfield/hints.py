"""Sparse motion hints from every supported control modality.

Four constructors produce :class:`SparseHints`: masking a dense flow field,
resampled drag trajectories, landmark sequences, and nothing at all (camera
patterns skip the sparse stage and emit a dense :class:`FlowField` directly).
All hint vectors are anchored at frame-0 pixel positions.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ParameterError, ShapeError
from .types import (
    FlowField,
    LandmarkSequence,
    SparseHints,
    Trajectory,
    as_binary_mask,
    round_pixel,
)

_MODULE = "hints"

# Dense parameter grid used to invert the arc-length function. Trapezoid
# error decays as 1/N^2; 2^17 intervals keep resampled positions well below
# the 1e-6 px tolerance the dense-oracle tests check against.
_ARC_SAMPLES = (1 << 17) + 1


def sparse_from_flow(flow: FlowField, mask) -> SparseHints:
    """Keep flow vectors at mask-1 pixels, zero everywhere else.

    The same spatial mask applies to every frame.
    """
    mask = as_binary_mask(mask, "hint mask", module=_MODULE)
    if mask.shape != (flow.height, flow.width):
        raise ShapeError(
            f"mask shape {mask.shape} does not match flow {(flow.height, flow.width)}",
            module=_MODULE,
        )
    vectors = flow.data * mask[None, :, :, None]
    return SparseHints(vectors=vectors, mask=mask)


def sample_watershed(flow: FlowField, n: int, seed: int | None = None) -> np.ndarray:
    """Pick n spread-out hint pixels from the last-frame flow magnitude.

    Greedy non-maximum suppression: pixels are visited in order of
    decreasing magnitude (ties in row-major order, optionally permuted by
    ``seed``) and accepted while they keep a minimum Euclidean separation
    r = floor(sqrt(H*W/n))/2 from everything accepted before. If the radius
    constraint cannot place all n points, the remainder is filled from the
    same ordering with the constraint dropped, so the result always has
    exactly n ones.
    """
    height, width = flow.height, flow.width
    if not 1 <= n <= height * width:
        raise ParameterError(f"n must be in [1, {height * width}], got {n}", module=_MODULE)

    magnitude = np.hypot(flow.data[-1, :, :, 0], flow.data[-1, :, :, 1]).ravel()
    order = np.argsort(-magnitude, kind="stable")
    if seed is not None:
        order = _permute_ties(order, magnitude, seed)

    radius = np.floor(np.sqrt(height * width / n)) / 2.0
    rows = order // width
    cols = order % width

    selected = np.zeros(n, dtype=np.int64)
    count = 0
    taken = np.zeros(order.size, dtype=bool)
    for i in range(order.size):
        if count == n:
            break
        r, c = rows[i], cols[i]
        sel_r = selected[:count] // width
        sel_c = selected[:count] % width
        if count and ((sel_r - r) ** 2 + (sel_c - c) ** 2).min() < radius**2:
            continue
        selected[count] = order[i]
        taken[i] = True
        count += 1
    if count < n:
        for i in range(order.size):
            if count == n:
                break
            if not taken[i]:
                selected[count] = order[i]
                count += 1

    mask = np.zeros(height * width, dtype=np.uint8)
    mask[selected] = 1
    return mask.reshape(height, width)


def _permute_ties(order: np.ndarray, magnitude: np.ndarray, seed: int) -> np.ndarray:
    """Shuffle runs of equal magnitude in-place within the sorted order."""
    rng = np.random.default_rng(seed)
    out = order.copy()
    sorted_mag = magnitude[order]
    boundaries = np.flatnonzero(np.diff(sorted_mag) != 0) + 1
    for lo, hi in zip(np.r_[0, boundaries], np.r_[boundaries, order.size]):
        if hi - lo > 1:
            out[lo:hi] = rng.permutation(out[lo:hi])
    return out


def resample_trajectory(trajectory: Trajectory, count: int) -> np.ndarray:
    """Resample a control-point polyline to ``count`` points equally spaced in arc length.

    Two control points degrade to exact linear interpolation; more go
    through a natural cubic spline (chord-length parameterised) whose arc
    length is inverted on a dense parameter grid. A zero-length trajectory
    yields ``count`` copies of its start point.
    """
    if count < 2:
        raise ParameterError(f"resample count must be >= 2, got {count}", module=_MODULE)
    pts = trajectory.points

    # Consecutive duplicates carry no geometry and break the strictly
    # increasing parameterisation required by the spline.
    keep = np.r_[True, np.linalg.norm(np.diff(pts, axis=0), axis=1) > 0]
    pts = pts[keep]
    if pts.shape[0] == 1:
        return np.repeat(pts, count, axis=0)
    if pts.shape[0] == 2:
        t = np.linspace(0.0, 1.0, count)[:, None]
        return pts[0] + t * (pts[1] - pts[0])

    chord = np.cumsum(np.r_[0.0, np.linalg.norm(np.diff(pts, axis=0), axis=1)])
    spline = CubicSpline(chord, pts, bc_type="natural", axis=0)

    t_dense = np.linspace(chord[0], chord[-1], _ARC_SAMPLES)
    speed = np.linalg.norm(spline.derivative()(t_dense), axis=1)
    dt = t_dense[1] - t_dense[0]
    arc = np.r_[0.0, np.cumsum((speed[1:] + speed[:-1]) * (dt / 2.0))]

    targets = np.linspace(0.0, arc[-1], count)
    t_at_targets = np.interp(targets, arc, t_dense)
    return spline(t_at_targets)


def sparse_from_trajectories(
    trajectories: Sequence[Trajectory], frame_count: int, height: int, width: int
) -> SparseHints:
    """Resample each trajectory to ``frame_count`` points and write the
    per-frame displacement from its start at the rounded start pixel.

    Start pixels falling outside the image are clamped (counted in
    ``clamped``); trajectories sharing a start pixel overwrite earlier ones
    (counted in ``collisions``).
    """
    if not trajectories:
        raise ParameterError("trajectory list must not be empty", module=_MODULE)
    if frame_count < 2:
        raise ParameterError(f"frame count must be >= 2, got {frame_count}", module=_MODULE)

    vectors = np.zeros((frame_count - 1, height, width, 2))
    mask = np.zeros((height, width), dtype=np.uint8)
    collisions = 0
    clamped = 0
    for trajectory in trajectories:
        resampled = resample_trajectory(trajectory, frame_count)
        col = round_pixel(resampled[0, 0])
        row = round_pixel(resampled[0, 1])
        if not (0 <= col < width and 0 <= row < height):
            col = min(max(col, 0), width - 1)
            row = min(max(row, 0), height - 1)
            clamped += 1
        if mask[row, col]:
            collisions += 1
        mask[row, col] = 1
        vectors[:, row, col, :] = resampled[1:] - resampled[0]
    return SparseHints(vectors=vectors, mask=mask, collisions=collisions, clamped=clamped)


def sparse_from_landmarks(seq: LandmarkSequence, height: int, width: int) -> SparseHints:
    """Point-wise sparse flow from a landmark sequence.

    For every frame l >= 1 and landmark k, the displacement from the
    reference landmark is written at the rounded reference pixel. Clamping
    and collision bookkeeping matches :func:`sparse_from_trajectories`.
    """
    if seq.frames < 2:
        raise ParameterError(f"landmark sequence needs >= 2 frames, got {seq.frames}", module=_MODULE)

    reference = seq.reference
    vectors = np.zeros((seq.frames - 1, height, width, 2))
    mask = np.zeros((height, width), dtype=np.uint8)
    collisions = 0
    clamped = 0
    for k in range(seq.points_per_frame):
        col = round_pixel(reference[k, 0])
        row = round_pixel(reference[k, 1])
        if not (0 <= col < width and 0 <= row < height):
            col = min(max(col, 0), width - 1)
            row = min(max(row, 0), height - 1)
            clamped += 1
        if mask[row, col]:
            collisions += 1
        mask[row, col] = 1
        vectors[:, row, col, :] = seq.coords[1:, k, :] - reference[k]
    return SparseHints(vectors=vectors, mask=mask, collisions=collisions, clamped=clamped)


def merge_hints(hint_sets: Iterable[SparseHints]) -> SparseHints:
    """Overlay hint sets; later sets overwrite earlier ones pixel-wise.

    Overwrites add to the merged collision count, and per-set diagnostics
    accumulate.
    """
    merged = list(hint_sets)
    if not merged:
        raise ParameterError("need at least one hint set to merge", module=_MODULE)
    first = merged[0]
    shape = first.vectors.shape
    vectors = first.vectors.copy()
    mask = first.mask.copy()
    collisions = first.collisions
    clamped = first.clamped
    for hints in merged[1:]:
        if hints.vectors.shape != shape:
            raise ShapeError(
                f"hint shapes differ: {hints.vectors.shape} vs {shape}", module=_MODULE
            )
        collisions += hints.collisions + int((mask & hints.mask).sum())
        clamped += hints.clamped
        on = hints.mask == 1
        vectors[:, on, :] = hints.vectors[:, on, :]
        mask |= hints.mask
    return SparseHints(vectors=vectors, mask=mask, collisions=collisions, clamped=clamped)


_CAMERA_PARAMS = {
    "pan": ({"dx", "dy"}, set()),
    "zoom": ({"scale"}, {"center"}),
    "rotate": ({"degrees"}, {"center"}),
}


def camera_pattern(kind: str, params: Mapping, frame_count: int, height: int, width: int) -> FlowField:
    """Dense flow for a parametric camera move.

    pan:    frame l displaces every pixel by ((l+1)/(L-1)) * (dx, dy).
    zoom:   scale about the centre, geometrically eased from 1 to ``scale``.
    rotate: rotation about the centre, angle linearly eased to ``degrees``.

    With y pointing down, a positive rotation angle appears clockwise on
    screen. ``center`` defaults to the image centre ((W-1)/2, (H-1)/2).
    """
    if kind not in _CAMERA_PARAMS:
        raise ParameterError(f"unknown camera kind {kind!r}", module=_MODULE)
    required, optional = _CAMERA_PARAMS[kind]
    given = set(params)
    if given - required - optional or required - given:
        raise ParameterError(
            f"camera {kind!r} takes parameters {sorted(required | optional)}, got {sorted(given)}",
            module=_MODULE,
        )
    if frame_count < 2:
        raise ParameterError(f"frame count must be >= 2, got {frame_count}", module=_MODULE)

    progress = np.arange(1, frame_count) / (frame_count - 1)  # (L-1,)
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))

    if kind == "pan":
        dx, dy = float(params["dx"]), float(params["dy"])
        if not (np.isfinite(dx) and np.isfinite(dy)):
            raise ParameterError("pan displacement must be finite", module=_MODULE)
        data = np.zeros((frame_count - 1, height, width, 2))
        data[..., 0] = progress[:, None, None] * dx
        data[..., 1] = progress[:, None, None] * dy
        return FlowField(data)

    cx, cy = params.get("center", ((width - 1) / 2.0, (height - 1) / 2.0))
    rel_x, rel_y = xs - cx, ys - cy

    if kind == "zoom":
        scale = float(params["scale"])
        if not (np.isfinite(scale) and scale > 0):
            raise ParameterError(f"zoom scale must be > 0, got {scale}", module=_MODULE)
        factors = scale**progress - 1.0
        data = np.zeros((frame_count - 1, height, width, 2))
        data[..., 0] = factors[:, None, None] * rel_x
        data[..., 1] = factors[:, None, None] * rel_y
        return FlowField(data)

    degrees = float(params["degrees"])
    if not np.isfinite(degrees):
        raise ParameterError("rotation angle must be finite", module=_MODULE)
    angles = np.deg2rad(degrees) * progress
    cos = np.cos(angles)[:, None, None]
    sin = np.sin(angles)[:, None, None]
    data = np.zeros((frame_count - 1, height, width, 2))
    data[..., 0] = cos * rel_x - sin * rel_y - rel_x
    data[..., 1] = sin * rel_x + cos * rel_y - rel_y
    return FlowField(data)
