"""Motion field authoring engine.

Sparse user control signals (drawn trajectories, landmark sequences, sampled
flow, camera moves) are densified into per-frame motion fields, composed by
region masks, and rendered into forward-warped previews. See README.md for
the tour; conventions (coordinates, flow anchoring) live in :mod:`.types`.
"""

from .compose import BrushGroup, brush_compose, downsample_mask, fuse_adapters, split_trajectories
from .densify import (
    DensifyConfig,
    DensifyStats,
    densify,
    densify_interface,
    densify_with_stats,
    register_backend,
)
from .errors import (
    ContractError,
    ConvergenceError,
    EngineError,
    FormatError,
    InputError,
    ParameterError,
    SchemaError,
    ShapeError,
)
from .flowio import encode_flo, read_flo, write_flo
from .hints import (
    camera_pattern,
    merge_hints,
    resample_trajectory,
    sample_watershed,
    sparse_from_flow,
    sparse_from_landmarks,
    sparse_from_trajectories,
)
from .images import decode_png, encode_png, read_png, write_png
from .pipeline import Diagnostics, PreviewResult, build_dense_flow, run_pipeline
from .projects import Project, ScheduleParams, load_project, save_project, validate_document
from .scheduler import (
    GroupSchedule,
    ToyDiffusionDriver,
    blend_step,
    build_schedule,
    frame_weights,
)
from .service import create_app, serve
from .types import (
    FeaturePyramid,
    FlowField,
    ImageFrame,
    LandmarkSequence,
    RegionMask,
    SparseHints,
    Trajectory,
    round_pixel,
)
from .viz import flow_to_color
from .warp import (
    COVERAGE_EPS,
    SOFTMAX_TAU,
    WARP_MODES,
    build_pyramid,
    forward_warp,
    pad_to_multiple,
    scale_flow,
    scale_flow_frame,
    warp_pyramid,
)

__all__ = [
    "BrushGroup",
    "COVERAGE_EPS",
    "SOFTMAX_TAU",
    "WARP_MODES",
    "ContractError",
    "ConvergenceError",
    "Diagnostics",
    "DensifyConfig",
    "DensifyStats",
    "EngineError",
    "FeaturePyramid",
    "FlowField",
    "FormatError",
    "GroupSchedule",
    "ImageFrame",
    "InputError",
    "LandmarkSequence",
    "ParameterError",
    "PreviewResult",
    "Project",
    "RegionMask",
    "ScheduleParams",
    "SchemaError",
    "ShapeError",
    "SparseHints",
    "ToyDiffusionDriver",
    "Trajectory",
    "blend_step",
    "brush_compose",
    "build_dense_flow",
    "build_pyramid",
    "build_schedule",
    "camera_pattern",
    "create_app",
    "decode_png",
    "densify",
    "densify_interface",
    "densify_with_stats",
    "downsample_mask",
    "encode_flo",
    "encode_png",
    "flow_to_color",
    "forward_warp",
    "frame_weights",
    "fuse_adapters",
    "load_project",
    "merge_hints",
    "pad_to_multiple",
    "read_flo",
    "read_png",
    "register_backend",
    "resample_trajectory",
    "round_pixel",
    "run_pipeline",
    "sample_watershed",
    "save_project",
    "scale_flow",
    "scale_flow_frame",
    "serve",
    "sparse_from_flow",
    "sparse_from_landmarks",
    "sparse_from_trajectories",
    "split_trajectories",
    "validate_document",
    "warp_pyramid",
    "write_flo",
    "write_png",
]
