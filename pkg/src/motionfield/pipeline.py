"""End-to-end preview: project in, dense flow and warped frames out.

The chain is hints -> per-region densify -> masked compose -> camera add ->
forward-warp the reference image once per output frame. Frame 0 is always
the untouched reference image; flow frame i carries frame 0 to frame i+1.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .compose import brush_compose, split_trajectories
from .densify import DensifyStats, densify_with_stats
from .errors import EngineError
from .hints import camera_pattern, merge_hints, sparse_from_landmarks, sparse_from_trajectories
from .projects import Project
from .types import FlowField, ImageFrame, SparseHints, Trajectory
from .warp import COVERAGE_EPS, forward_warp

_MODULE = "pipeline"


@dataclass
class Diagnostics:
    """Preview bookkeeping surfaced through the CLI and HTTP API."""

    hint_count: int
    collisions: int
    clamped: int
    max_residual: float
    solver_iterations: int
    hole_pixels: list[int]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PreviewResult:
    frames: list[ImageFrame]
    dense_flow: FlowField
    diagnostics: Diagnostics


def _empty_hints(project: Project) -> SparseHints:
    height, width = project.height, project.width
    return SparseHints(
        vectors=np.zeros((project.frame_count - 1, height, width, 2)),
        mask=np.zeros((height, width), dtype=np.uint8),
    )


def _trajectory_hints(project: Project, trajectories: list[Trajectory]) -> SparseHints:
    if not trajectories:
        return _empty_hints(project)
    return sparse_from_trajectories(
        trajectories, project.frame_count, project.height, project.width
    )


@dataclass
class _HintTotals:
    hint_count: int = 0
    collisions: int = 0
    clamped: int = 0

    def add(self, hints: SparseHints) -> SparseHints:
        self.hint_count += hints.hint_count
        self.collisions += hints.collisions
        self.clamped += hints.clamped
        return hints


def build_dense_flow(project: Project) -> tuple[FlowField, _HintTotals, DensifyStats]:
    """Hints -> densified per region -> composed -> camera term added."""
    remaining = list(project.trajectories)
    per_region: list[list[Trajectory]] = []
    for mask in project.brush_masks:
        group = split_trajectories(remaining, mask)
        per_region.append(group.inside)
        remaining = group.outside

    totals = _HintTotals()
    background_sets = [totals.add(_trajectory_hints(project, remaining))]
    if project.landmark_sequence is not None:
        background_sets.append(
            totals.add(
                sparse_from_landmarks(project.landmark_sequence, project.height, project.width)
            )
        )
    background_hints = merge_hints(background_sets)

    residuals: list[float] = []
    iterations: list[int] = []
    flow, stats = densify_with_stats(background_hints, project.densify)
    residuals.extend(stats.residuals)
    iterations.extend(stats.iterations)

    # Walk regions last-to-first so the first mask wins where masks overlap.
    for idx in range(len(project.brush_masks) - 1, -1, -1):
        hints = totals.add(_trajectory_hints(project, per_region[idx]))
        region_flow, stats = densify_with_stats(hints, project.densify)
        residuals.extend(stats.residuals)
        iterations.extend(stats.iterations)
        flow = brush_compose(region_flow, flow, project.brush_masks[idx])

    if project.camera is not None:
        params = {k: v for k, v in project.camera.items() if k != "kind"}
        camera_flow = camera_pattern(
            project.camera["kind"], params, project.frame_count, project.height, project.width
        )
        flow = FlowField(flow.data + camera_flow.data)

    return flow, totals, DensifyStats(residuals=tuple(residuals), iterations=tuple(iterations))


def run_pipeline(project: Project, warp_mode: str = "average") -> PreviewResult:
    flow, totals, stats = build_dense_flow(project)
    reference = project.reference_image
    frames = [reference]
    hole_pixels = [0]
    for i in range(flow.frames):
        warped, coverage = forward_warp(reference.data, flow.data[i], warp_mode)
        hole_pixels.append(int((coverage < COVERAGE_EPS).sum()))
        frames.append(ImageFrame(np.clip(warped, 0.0, 1.0)))
    diagnostics = Diagnostics(
        hint_count=totals.hint_count,
        collisions=totals.collisions,
        clamped=totals.clamped,
        max_residual=stats.max_residual,
        solver_iterations=stats.total_iterations,
        hole_pixels=hole_pixels,
    )
    return PreviewResult(frames=frames, dense_flow=flow, diagnostics=diagnostics)


def attach_module(exc: Exception) -> str:
    """Module name an error originated from; unknown errors report this module."""
    if isinstance(exc, EngineError) and exc.module:
        return exc.module
    return _MODULE
