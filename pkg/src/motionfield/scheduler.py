"""Overlapping-window scheduling for long-sequence denoisers.

Generators that animate L frames in fixed-size groups need the groups to
overlap so seams stay coherent. This module plans the windows, exposes the
per-group averaging weights, and blends per-group predictions into one
full-length prediction per step. The denoiser is pluggable and opaque; the
diffusion update rule belongs to the caller. A toy driver ships for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import ContractError, ParameterError, ShapeError

_MODULE = "scheduler"


@dataclass(frozen=True)
class GroupSchedule:
    total_frames: int
    window: int
    starts: tuple[int, ...]

    @property
    def groups(self) -> tuple[range, ...]:
        return tuple(range(s, s + self.window) for s in self.starts)


def build_schedule(total_frames: int, window: int = 14, stride: int = 7) -> GroupSchedule:
    """Window starts at 0, stride, 2*stride, ... plus a final group anchored at the end.

    The anchored group is appended only when the strided groups leave trailing
    frames uncovered; it may overlap its predecessor by more than
    window - stride. Every frame is covered and frame 0 sits in the first
    group.
    """
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window}", module=_MODULE)
    if not 1 <= stride <= window:
        raise ParameterError(
            f"stride must be in 1..window, got stride={stride} window={window}", module=_MODULE
        )
    if total_frames < window:
        raise ParameterError(
            f"total_frames={total_frames} shorter than window={window}", module=_MODULE
        )
    starts = list(range(0, total_frames - window + 1, stride))
    if starts[-1] + window < total_frames:
        starts.append(total_frames - window)
    return GroupSchedule(total_frames=total_frames, window=window, starts=tuple(starts))


def _coverage_counts(schedule: GroupSchedule) -> np.ndarray:
    counts = np.zeros(schedule.total_frames, dtype=np.int64)
    for start in schedule.starts:
        counts[start : start + schedule.window] += 1
    return counts


def frame_weights(schedule: GroupSchedule) -> np.ndarray:
    """(groups, frames) averaging table: 1/k where group g covers frame f, else 0.

    k counts the groups covering f, so each column sums to exactly 1.
    """
    counts = _coverage_counts(schedule)
    if (counts == 0).any():
        raise ParameterError("schedule leaves frames uncovered", module=_MODULE)
    table = np.zeros((len(schedule.starts), schedule.total_frames))
    for g, start in enumerate(schedule.starts):
        table[g, start : start + schedule.window] = 1.0 / counts[start : start + schedule.window]
    return table


class DenoiserInterface(Protocol):
    """Shape-preserving prediction over one window of per-frame state."""

    def __call__(
        self, block: np.ndarray, step: int, condition: np.ndarray | None
    ) -> np.ndarray: ...


def blend_step(
    state: np.ndarray,
    schedule: GroupSchedule,
    denoise: DenoiserInterface,
    step: int,
    condition: np.ndarray | None = None,
    group_order: Sequence[int] | None = None,
) -> np.ndarray:
    """Mean per-frame prediction across all groups covering each frame.

    ``condition`` is forwarded to every group call unchanged (callers pass
    the clean frame-0 state). The returned array is the blended prediction
    only; applying it as a diffusion update is the caller's job. Every
    group reads the same input state, so the result is invariant to
    ``group_order`` up to floating-point associativity.
    """
    if state.shape[0] != schedule.total_frames:
        raise ShapeError(
            f"state has {state.shape[0]} frames, schedule expects {schedule.total_frames}",
            module=_MODULE,
        )
    order = list(range(len(schedule.starts))) if group_order is None else list(group_order)
    if sorted(order) != list(range(len(schedule.starts))):
        raise ParameterError(
            f"group_order must permute 0..{len(schedule.starts) - 1}", module=_MODULE
        )
    counts = _coverage_counts(schedule)
    if (counts == 0).any():
        raise ParameterError("schedule leaves frames uncovered", module=_MODULE)
    accum = np.zeros_like(state, dtype=np.float64)
    for idx in order:
        start = schedule.starts[idx]
        block = state[start : start + schedule.window]
        predicted = denoise(block, step, condition)
        if predicted.shape != block.shape:
            raise ContractError(
                f"denoiser changed block shape {block.shape} -> {predicted.shape}",
                module=_MODULE,
            )
        accum[start : start + schedule.window] += predicted
    shape = (schedule.total_frames,) + (1,) * (state.ndim - 1)
    return accum / counts.reshape(shape)


@dataclass
class ToyDiffusionDriver:
    """Minimal denoise-and-update loop over a schedule.

    The "noise" prediction for a window is its deviation from the condition
    frame, and the update subtracts ``rate`` times the blended prediction,
    so every frame converges geometrically to the frame-0 state. Enough to
    exercise scheduling, conditioning, and blending without a model.
    """

    rate: float = 0.5

    def __call__(
        self, block: np.ndarray, step: int, condition: np.ndarray | None
    ) -> np.ndarray:
        if condition is None:
            raise ParameterError("driver requires the frame-0 condition", module=_MODULE)
        return block - condition[None, ...]

    def run(self, initial: np.ndarray, schedule: GroupSchedule, steps: int) -> np.ndarray:
        if initial.shape[0] != schedule.total_frames:
            raise ShapeError(
                f"initial has {initial.shape[0]} frames, schedule expects "
                f"{schedule.total_frames}",
                module=_MODULE,
            )
        state = initial.astype(np.float64)
        condition = state[0].copy()
        for step in range(steps):
            prediction = blend_step(state, schedule, self, step, condition)
            state = state - self.rate * prediction
        return state
