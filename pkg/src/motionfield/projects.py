"""Project documents: schema-versioned JSON plus sidecar image/mask assets.

A project file references its assets by path relative to itself. Validation
is hand-rolled so every message carries the offending field path; unknown
fields are rejected rather than ignored.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .densify import DensifyConfig
from .errors import SchemaError
from .hints import _CAMERA_PARAMS
from .images import decode_mask_png, decode_png, write_mask_png, write_png
from .types import ImageFrame, LandmarkSequence, RegionMask, Trajectory

_MODULE = "projects"

SCHEMA_VERSION = 1

_DOCUMENT_KEYS = (
    "version",
    "image",
    "L",
    "trajectories",
    "masks",
    "landmarks",
    "camera",
    "densify",
    "schedule",
)


@dataclass(frozen=True)
class ScheduleParams:
    window: int = 14
    stride: int = 7


@dataclass
class Project:
    reference_image: ImageFrame
    frame_count: int
    trajectories: list[Trajectory] = field(default_factory=list)
    brush_masks: list[RegionMask] = field(default_factory=list)
    landmark_sequence: LandmarkSequence | None = None
    camera: dict | None = None
    densify: DensifyConfig = field(default_factory=DensifyConfig)
    schedule: ScheduleParams = field(default_factory=ScheduleParams)

    def __post_init__(self):
        if self.frame_count < 2:
            raise SchemaError(
                f"frame count must be >= 2, got {self.frame_count}", module=_MODULE, path="L"
            )
        shape = (self.reference_image.data.shape[0], self.reference_image.data.shape[1])
        for i, mask in enumerate(self.brush_masks):
            if mask.grid.shape != shape:
                raise SchemaError(
                    f"mask {mask.grid.shape} does not match image {shape}",
                    module=_MODULE,
                    path=f"masks[{i}]",
                )
        if self.landmark_sequence is not None and self.landmark_sequence.frames != self.frame_count:
            raise SchemaError(
                f"landmark sequence has {self.landmark_sequence.frames} frames, project has "
                f"{self.frame_count}",
                module=_MODULE,
                path="landmarks",
            )

    @property
    def height(self) -> int:
        return self.reference_image.data.shape[0]

    @property
    def width(self) -> int:
        return self.reference_image.data.shape[1]


def _fail(path: str, message: str):
    raise SchemaError(f"{path}: {message}" if path else message, module=_MODULE, path=path)


def _expect_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}")
    return value


def _expect_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    out = float(value)
    if not np.isfinite(out):
        _fail(path, f"must be finite, got {out}")
    return out


def _expect_point(value, path: str) -> list:
    if not isinstance(value, list) or len(value) != 2:
        _fail(path, "expected an [x, y] pair")
    return [_expect_number(value[0], f"{path}[0]"), _expect_number(value[1], f"{path}[1]")]


def validate_document(doc) -> None:
    """Structural schema check; raises :class:`SchemaError` naming the bad field."""
    if not isinstance(doc, dict):
        _fail("", f"project document must be an object, got {type(doc).__name__}")
    if "version" not in doc:
        _fail("version", "missing required field")
    version = _expect_int(doc["version"], "version")
    if version != SCHEMA_VERSION:
        _fail("version", f"unsupported schema version {version}, this reader handles {SCHEMA_VERSION}")
    for key in _DOCUMENT_KEYS:
        if key not in doc:
            _fail(key, "missing required field")
    for key in doc:
        if key not in _DOCUMENT_KEYS:
            _fail(key, "unknown field")

    if not isinstance(doc["image"], str) or not doc["image"]:
        _fail("image", "expected a non-empty path string")
    frame_count = _expect_int(doc["L"], "L")
    if frame_count < 2:
        _fail("L", f"must be >= 2, got {frame_count}")

    if not isinstance(doc["trajectories"], list):
        _fail("trajectories", "expected a list")
    for i, traj in enumerate(doc["trajectories"]):
        if not isinstance(traj, list) or len(traj) < 2:
            _fail(f"trajectories[{i}]", "expected a list of at least 2 points")
        for j, point in enumerate(traj):
            _expect_point(point, f"trajectories[{i}][{j}]")

    if not isinstance(doc["masks"], list):
        _fail("masks", "expected a list")
    for i, name in enumerate(doc["masks"]):
        if not isinstance(name, str) or not name:
            _fail(f"masks[{i}]", "expected a non-empty path string")

    if doc["landmarks"] is not None and (not isinstance(doc["landmarks"], str) or not doc["landmarks"]):
        _fail("landmarks", "expected a path string or null")

    _validate_camera(doc["camera"])

    densify = doc["densify"]
    if not isinstance(densify, dict):
        _fail("densify", "expected an object")
    for key in ("lambda", "tol"):
        if key not in densify:
            _fail(f"densify.{key}", "missing required field")
    for key in densify:
        if key not in ("lambda", "tol"):
            _fail(f"densify.{key}", "unknown field")
    lam = _expect_number(densify["lambda"], "densify.lambda")
    if lam < 0:
        _fail("densify.lambda", f"must be >= 0, got {lam}")
    tol = _expect_number(densify["tol"], "densify.tol")
    if tol <= 0:
        _fail("densify.tol", f"must be > 0, got {tol}")

    schedule = doc["schedule"]
    if not isinstance(schedule, dict):
        _fail("schedule", "expected an object")
    for key in ("window", "stride"):
        if key not in schedule:
            _fail(f"schedule.{key}", "missing required field")
    for key in schedule:
        if key not in ("window", "stride"):
            _fail(f"schedule.{key}", "unknown field")
    for key in ("window", "stride"):
        if _expect_int(schedule[key], f"schedule.{key}") < 1:
            _fail(f"schedule.{key}", f"must be >= 1, got {schedule[key]}")


def _validate_camera(camera) -> None:
    if camera is None:
        return
    if not isinstance(camera, dict):
        _fail("camera", "expected an object or null")
    kind = camera.get("kind")
    if kind is None:
        _fail("camera.kind", "missing required field")
    if not isinstance(kind, str) or kind not in _CAMERA_PARAMS:
        _fail("camera.kind", f"expected one of {sorted(_CAMERA_PARAMS)}, got {kind!r}")
    required, optional = _CAMERA_PARAMS[kind]
    for key in required:
        if key not in camera:
            _fail(f"camera.{key}", "missing required field")
    for key in camera:
        if key != "kind" and key not in required and key not in optional:
            _fail(f"camera.{key}", f"unknown field for camera kind {kind!r}")
    for key in required | (set(camera) & optional):
        if key == "center":
            _expect_point(camera["center"], "camera.center")
        else:
            _expect_number(camera[key], f"camera.{key}")


def _parse_landmarks(blob: bytes, name: str) -> LandmarkSequence:
    try:
        raw = json.loads(blob)
    except json.JSONDecodeError as exc:
        _fail("landmarks", f"{name}: not valid JSON: {exc}")
    try:
        coords = np.asarray(raw, dtype=np.float64)
    except ValueError:
        coords = np.empty(0)
    if coords.ndim != 3 or coords.shape[2] != 2:
        _fail("landmarks", f"{name}: expected an (L, K, 2) nested list")
    return LandmarkSequence(coords)


def document_to_project(doc, base_dir: str | os.PathLike | None = None, *, read_blob=None) -> Project:
    """Validate a document and load its assets.

    Assets resolve either relative to ``base_dir`` on disk or through a
    ``read_blob(name) -> bytes`` callable (the HTTP store passes one).
    """
    validate_document(doc)
    if read_blob is None:
        base = Path(base_dir if base_dir is not None else ".")

        def read_blob(name: str) -> bytes:
            return (base / name).read_bytes()

    image = decode_png(read_blob(doc["image"]))
    masks = [decode_mask_png(read_blob(name)) for name in doc["masks"]]
    landmarks = (
        None
        if doc["landmarks"] is None
        else _parse_landmarks(read_blob(doc["landmarks"]), doc["landmarks"])
    )
    trajectories = [
        Trajectory(np.asarray(points, dtype=np.float64)) for points in doc["trajectories"]
    ]
    config = DensifyConfig(
        regularization=float(doc["densify"]["lambda"]),
        residual_tolerance=float(doc["densify"]["tol"]),
    )
    return Project(
        reference_image=image,
        frame_count=doc["L"],
        trajectories=trajectories,
        brush_masks=masks,
        landmark_sequence=landmarks,
        camera=None if doc["camera"] is None else dict(doc["camera"]),
        densify=config,
        schedule=ScheduleParams(
            window=doc["schedule"]["window"], stride=doc["schedule"]["stride"]
        ),
    )


def project_to_document(project: Project) -> dict:
    """Document skeleton with canonical asset names; assets written by save_project."""
    return {
        "version": SCHEMA_VERSION,
        "image": "image.png",
        "L": project.frame_count,
        "trajectories": [
            [[float(x), float(y)] for x, y in traj.points] for traj in project.trajectories
        ],
        "masks": [f"mask_{i:03d}.png" for i in range(len(project.brush_masks))],
        "landmarks": None if project.landmark_sequence is None else "landmarks.json",
        "camera": None if project.camera is None else dict(project.camera),
        "densify": {
            "lambda": project.densify.regularization,
            "tol": project.densify.residual_tolerance,
        },
        "schedule": {"window": project.schedule.window, "stride": project.schedule.stride},
    }


def load_project(path: str | os.PathLike) -> Project:
    path = Path(path)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path.name}: not valid JSON: {exc}", module=_MODULE) from exc
    return document_to_project(doc, path.parent)


def save_project(path: str | os.PathLike, project: Project) -> None:
    """Write project.json plus image/mask/landmark assets next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = project_to_document(project)
    write_png(path.parent / doc["image"], project.reference_image)
    for name, mask in zip(doc["masks"], project.brush_masks):
        write_mask_png(path.parent / name, mask)
    if project.landmark_sequence is not None:
        with open(path.parent / doc["landmarks"], "w") as fh:
            json.dump(project.landmark_sequence.coords.tolist(), fh)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
