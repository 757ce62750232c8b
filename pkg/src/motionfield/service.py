"""HTTP surface over the preview pipeline.

Projects live in an in-memory store keyed by id. Documents submitted over
HTTP reference uploaded assets as "asset:<id>" in the image/masks/landmarks
fields. Preview renders are cached per project until the next PUT. Writes
are serialized per project id; previews run on immutable snapshots.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .errors import ConvergenceError, EngineError, SchemaError
from .flowio import encode_flo
from .images import encode_png
from .pipeline import attach_module, run_pipeline
from .projects import Project, document_to_project
from .types import ImageFrame
from .viz import flow_to_color

_MODULE = "service"


@dataclass
class _Entry:
    document: dict
    project: Project
    lock: threading.Lock = field(default_factory=threading.Lock)
    frames: list[bytes] | None = None
    flow_blobs: list[bytes] | None = None
    flow_pngs: list[bytes] | None = None
    diagnostics: dict | None = None


class ProjectStore:
    def __init__(self):
        self._entries: dict[str, _Entry] = {}
        self._assets: dict[str, bytes] = {}
        self._lock = threading.Lock()

    def add_asset(self, blob: bytes) -> str:
        asset_id = uuid.uuid4().hex
        with self._lock:
            self._assets[asset_id] = blob
        return asset_id

    def read_ref(self, name: str) -> bytes:
        if not name.startswith("asset:"):
            raise SchemaError(
                f"{name!r}: HTTP projects must reference uploaded assets as 'asset:<id>'",
                module=_MODULE,
            )
        asset_id = name[len("asset:") :]
        with self._lock:
            if asset_id not in self._assets:
                raise SchemaError(f"unknown asset {asset_id!r}", module=_MODULE)
            return self._assets[asset_id]

    def build(self, document) -> Project:
        return document_to_project(document, read_blob=self.read_ref)

    def create(self, document) -> str:
        project = self.build(document)
        project_id = uuid.uuid4().hex
        with self._lock:
            self._entries[project_id] = _Entry(document=document, project=project)
        return project_id

    def get(self, project_id: str) -> _Entry | None:
        with self._lock:
            return self._entries.get(project_id)

    def replace(self, project_id: str, document) -> bool:
        entry = self.get(project_id)
        if entry is None:
            return False
        project = self.build(document)
        with entry.lock:
            entry.document = document
            entry.project = project
            entry.frames = None
            entry.flow_blobs = None
            entry.flow_pngs = None
            entry.diagnostics = None
        return True


def _error(status: int, message: str, module: str) -> JSONResponse:
    return JSONResponse({"error": message, "module": module}, status_code=status)


def _not_found(what: str) -> JSONResponse:
    return _error(404, f"unknown {what}", _MODULE)


def _status_for(exc: EngineError) -> int:
    if isinstance(exc, ConvergenceError):
        return 422
    return 400


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="motion preview service")
    store = ProjectStore()
    app.state.store = store

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return _error(_status_for(exc), str(exc), attach_module(exc))

    @app.exception_handler(RequestValidationError)
    async def request_error_handler(request: Request, exc: RequestValidationError):
        return _error(400, str(exc.errors()), _MODULE)

    @app.exception_handler(Exception)
    async def fallback_handler(request: Request, exc: Exception):
        return _error(500, f"internal error: {exc}", _MODULE)

    async def _read_json(request: Request):
        try:
            return await request.json()
        except json.JSONDecodeError as exc:
            raise SchemaError(f"request body is not valid JSON: {exc}", module=_MODULE) from exc

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/assets", status_code=201)
    async def upload_asset(request: Request):
        blob = await request.body()
        if not blob:
            return _error(400, "empty asset body", _MODULE)
        asset_id = store.add_asset(blob)
        return {"id": asset_id, "ref": f"asset:{asset_id}"}

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        document = await _read_json(request)
        return {"id": store.create(document)}

    @app.get("/projects/{project_id}")
    async def get_project(project_id: str):
        entry = store.get(project_id)
        if entry is None:
            return _not_found("project id")
        return entry.document

    @app.put("/projects/{project_id}")
    async def put_project(project_id: str, request: Request):
        document = await _read_json(request)
        if not store.replace(project_id, document):
            return _not_found("project id")
        return {"id": project_id}

    @app.post("/projects/{project_id}/preview")
    async def preview(project_id: str):
        entry = store.get(project_id)
        if entry is None:
            return _not_found("project id")
        with entry.lock:
            project = entry.project
        result = run_pipeline(project)
        frames = [encode_png(frame) for frame in result.frames]
        flow_blobs = [encode_flo(uv) for uv in result.dense_flow.data]
        flow_pngs = [
            encode_png(ImageFrame(flow_to_color(uv))) for uv in result.dense_flow.data
        ]
        diagnostics = result.diagnostics.to_dict()
        with entry.lock:
            entry.frames = frames
            entry.flow_blobs = flow_blobs
            entry.flow_pngs = flow_pngs
            entry.diagnostics = diagnostics
        base = f"/projects/{project_id}"
        return {
            "frames": [f"{base}/frames/{i}.png" for i in range(len(frames))],
            "flow": [f"{base}/flow/{i}.flo" for i in range(len(flow_blobs))],
            "diagnostics": diagnostics,
        }

    def _cached(project_id: str, attr: str, index: int, media: str):
        entry = store.get(project_id)
        if entry is None:
            return _not_found("project id")
        with entry.lock:
            blobs = getattr(entry, attr)
            if blobs is None:
                return _error(404, "no preview rendered yet", _MODULE)
            if not 0 <= index < len(blobs):
                return _not_found("frame index")
            return Response(blobs[index], media_type=media)

    @app.get("/projects/{project_id}/frames/{index}.png")
    async def get_frame(project_id: str, index: int):
        return _cached(project_id, "frames", index, "image/png")

    @app.get("/projects/{project_id}/flow/{index}.flo")
    async def get_flow(project_id: str, index: int):
        return _cached(project_id, "flow_blobs", index, "application/octet-stream")

    @app.get("/projects/{project_id}/flow/{index}.png")
    async def get_flow_png(project_id: str, index: int):
        return _cached(project_id, "flow_pngs", index, "image/png")

    @app.get("/projects/{project_id}/image.png")
    async def get_image(project_id: str):
        entry = store.get(project_id)
        if entry is None:
            return _not_found("project id")
        with entry.lock:
            blob = encode_png(entry.project.reference_image)
        return Response(blob, media_type="image/png")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="studio")

    return app


def serve(port: int = 8000, host: str = "127.0.0.1", static_dir: str | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(static_dir), host=host, port=port)
