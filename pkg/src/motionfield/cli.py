"""Command line front end.

Exit codes: 0 ok, 2 validation problem, 3 solver failure, 4 I/O problem.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from .densify import DensifyConfig, densify_with_stats
from .errors import ConvergenceError, EngineError, SchemaError
from .flowio import write_flo
from .images import write_png
from .pipeline import run_pipeline
from .projects import load_project
from .scheduler import build_schedule, frame_weights
from .types import ImageFrame, SparseHints
from .viz import flow_to_color

_MODULE = "cli"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engine", description="motion field authoring engine")
    sub = parser.add_subparsers(dest="command", required=True)

    preview = sub.add_parser("preview", help="render a project to frames and flow files")
    preview.add_argument("project", help="path to project.json")
    preview.add_argument("--out", required=True, help="output directory")
    preview.add_argument("--gif", action="store_true", help="also write preview.gif")
    preview.add_argument("--flow-viz", action="store_true", help="also write flow color PNGs")

    densify = sub.add_parser("densify", help="densify a sparse hints file to .flo frames")
    densify.add_argument("hints", help="path to hints.json")
    densify.add_argument("--out", required=True, help="output directory for .flo files")

    schedule = sub.add_parser("schedule", help="print group windows and frame weights")
    schedule.add_argument("--frames", type=int, required=True)
    schedule.add_argument("--window", type=int, default=14)
    schedule.add_argument("--stride", type=int, default=7)

    serve = sub.add_parser("serve", help="run the HTTP preview service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static", default=None, help="directory of studio UI assets")
    return parser


def _write_gif(path: Path, frames) -> None:
    images = []
    for frame in frames:
        arr = np.round(frame.data * 255.0).astype(np.uint8)
        if arr.shape[2] == 1:
            arr = np.repeat(arr, 3, axis=2)
        images.append(Image.fromarray(arr[:, :, :3], mode="RGB").convert("P", palette=Image.ADAPTIVE))
    images[0].save(path, save_all=True, append_images=images[1:], duration=100, loop=0)


def _cmd_preview(args) -> int:
    project = load_project(args.project)
    result = run_pipeline(project)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(result.frames):
        write_png(out / f"frame_{i:03d}.png", frame)
    for i in range(result.dense_flow.frames):
        write_flo(out / f"flow_{i:03d}.flo", result.dense_flow.data[i])
        if args.flow_viz:
            write_png(out / f"flow_{i:03d}.png", ImageFrame(flow_to_color(result.dense_flow.data[i])))
    if args.gif:
        _write_gif(out / "preview.gif", result.frames)
    print(f"wrote {len(result.frames)} frames and {result.dense_flow.frames} flow files to {out}")
    for key, value in result.diagnostics.to_dict().items():
        print(f"  {key}: {value}")
    return EXIT_OK


def _load_hints_file(path: str) -> tuple[SparseHints, DensifyConfig]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}", module=_MODULE) from exc
    if not isinstance(doc, dict):
        raise SchemaError("hints document must be an object", module=_MODULE)
    for key in ("height", "width", "frames", "hints"):
        if key not in doc:
            raise SchemaError(f"{key}: missing required field", module=_MODULE, path=key)
    height, width, frames = doc["height"], doc["width"], doc["frames"]
    for name, value in (("height", height), ("width", width), ("frames", frames)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise SchemaError(f"{name}: expected a positive integer", module=_MODULE, path=name)
    vectors = np.zeros((frames, height, width, 2))
    mask = np.zeros((height, width), dtype=np.uint8)
    if not isinstance(doc["hints"], list):
        raise SchemaError("hints: expected a list", module=_MODULE, path="hints")
    for i, hint in enumerate(doc["hints"]):
        path_i = f"hints[{i}]"
        if not isinstance(hint, dict) or not {"x", "y", "flow"} <= set(hint):
            raise SchemaError(
                f"{path_i}: expected an object with x, y, flow", module=_MODULE, path=path_i
            )
        x, y = hint["x"], hint["y"]
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (x, y)):
            raise SchemaError(f"{path_i}: x and y must be integers", module=_MODULE, path=path_i)
        if not (0 <= x < width and 0 <= y < height):
            raise SchemaError(f"{path_i}: ({x}, {y}) outside {width}x{height}", module=_MODULE, path=path_i)
        flow = np.asarray(hint["flow"], dtype=np.float64)
        if flow.shape != (frames, 2):
            raise SchemaError(
                f"{path_i}.flow: expected {frames} [u, v] pairs", module=_MODULE, path=f"{path_i}.flow"
            )
        vectors[:, y, x, :] = flow
        mask[y, x] = 1
    config = DensifyConfig(
        regularization=float(doc.get("lambda", 0.0)),
        residual_tolerance=float(doc.get("tol", 1e-8)),
    )
    extra = set(doc) - {"height", "width", "frames", "hints", "lambda", "tol"}
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)}", module=_MODULE)
    return SparseHints(vectors=vectors, mask=mask), config


def _cmd_densify(args) -> int:
    hints, config = _load_hints_file(args.hints)
    flow, stats = densify_with_stats(hints, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(flow.frames):
        write_flo(out / f"flow_{i:03d}.flo", flow.data[i])
    print(
        f"wrote {flow.frames} flow files to {out} "
        f"(max residual {stats.max_residual:.3e}, {stats.total_iterations} iterations)"
    )
    return EXIT_OK


def _cmd_schedule(args) -> int:
    schedule = build_schedule(args.frames, args.window, args.stride)
    table = frame_weights(schedule)
    for start in schedule.starts:
        print(f"group [{start}, {start + schedule.window - 1}]")
    print("frame weights:")
    for f in range(schedule.total_frames):
        per_group = table[:, f].max()  # 1/k for the k groups covering f
        print(f"  frame {f}: {int(table[:, f].astype(bool).sum())} groups, weight {per_group:.6f}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, host=args.host, static_dir=args.static)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    commands = {
        "preview": _cmd_preview,
        "densify": _cmd_densify,
        "schedule": _cmd_schedule,
        "serve": _cmd_serve,
    }
    try:
        return commands[args.command](args)
    except ConvergenceError as exc:
        print(f"solver failure [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except EngineError as exc:
        print(f"invalid input [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
