"""HTTP curation service.

Serves review candidates from a manifest, records Yes/No verdicts into
the on-disk decision log, and exposes progress counters. The data
directory (``--data`` flag or the AMODAL_DATA_DIR environment variable)
must contain ``manifest.json``; decisions are appended to
``decisions.log`` next to it, so a restarted service recovers its exact
effective state from the log alone.

Endpoints:
  GET  /api/queue?round={1|2}&annotator={id}   next candidate or 204
  GET  /api/images/{image_id}                  PNG (photo, else rendered masks)
  POST /api/records/{record_id}/decision       {round, verdict, annotator_id, tags?}
  GET  /api/progress                           per-round counters

When a built review UI is available its static files are mounted at ``/``.
"""

from __future__ import annotations

import io
import os
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Response
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel, Field

from .curation import ROUNDS, VERDICTS, CurationDecision, CurationError, CurationState, DecisionLog, now_ms
from .manifest import DatasetManifest, import_manifest
from .masks import rle_encode

MANIFEST_NAME = "manifest.json"
DECISION_LOG_NAME = "decisions.log"
DATA_DIR_ENV = "AMODAL_DATA_DIR"
UI_DIR_ENV = "AMODAL_UI_DIR"

# palette for the fallback mask visualization (id 0 stays black)
_PALETTE = (
    (230, 80, 60),
    (70, 160, 230),
    (90, 200, 110),
    (240, 190, 60),
    (170, 110, 220),
    (240, 130, 190),
    (110, 220, 210),
    (230, 150, 90),
)


class DecisionBody(BaseModel):
    round: int
    verdict: str
    annotator_id: str
    tags: list[str] = Field(default_factory=list)


def resolve_data_dir(data_dir: str | Path | None) -> Path:
    if data_dir is None:
        data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir is None:
        raise ValueError(f"no data directory: pass --data or set {DATA_DIR_ENV}")
    return Path(data_dir)


def create_app(data_dir: str | Path | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    data_dir = resolve_data_dir(data_dir)
    manifest = import_manifest(data_dir / MANIFEST_NAME)
    log = DecisionLog(data_dir / DECISION_LOG_NAME)
    state = CurationState(manifest, log.load())
    write_lock = threading.Lock()

    app = FastAPI(title="amodal curation service")

    @app.get("/api/queue")
    def get_queue(round: int = Query(...), annotator: str = Query("")):
        try:
            candidate = state.next_candidate(round, annotator)
        except CurationError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        if candidate is None:
            return Response(status_code=204)
        return {
            "record_id": candidate.record_id,
            "image_url": f"/api/images/{candidate.image_id}",
            "modal": rle_encode(candidate.modal).to_json(),
            "amodal": rle_encode(candidate.amodal).to_json(),
            "occluder": rle_encode(candidate.occluder).to_json(),
            "occlusion_ratio": candidate.occlusion_ratio,
            "semantic_label": candidate.semantic_label,
            "category": candidate.category,
        }

    @app.post("/api/records/{record_id}/decision")
    def post_decision(record_id: str, body: DecisionBody):
        if body.round not in ROUNDS:
            return JSONResponse({"error": f"unknown round {body.round}"}, status_code=400)
        if body.verdict not in VERDICTS:
            return JSONResponse({"error": f"unknown verdict {body.verdict!r}"}, status_code=400)
        decision = CurationDecision(
            record_id=record_id,
            round=body.round,
            verdict=body.verdict,
            annotator_id=body.annotator_id,
            timestamp_ms=now_ms(),
            tags=tuple(body.tags),
        )
        with write_lock:
            try:
                effective = state.record_decision(decision)
            except CurationError as exc:
                message = str(exc)
                status = 409 if "round 2" in message else 404 if "unknown record" in message else 400
                return JSONResponse({"error": message}, status_code=status)
            log.append(decision)
        return {"record_id": record_id, "round": body.round, "effective_verdict": effective}

    @app.get("/api/progress")
    def get_progress():
        return state.progress()

    @app.get("/api/images/{image_id}")
    def get_image(image_id: str):
        try:
            info = manifest.image_by_id(image_id)
        except KeyError:
            return JSONResponse({"error": f"unknown image {image_id!r}"}, status_code=404)
        if info.file_path:
            path = data_dir / info.file_path
            if path.exists():
                return FileResponse(path, media_type="image/png")
        return Response(content=_render_fallback_png(manifest, image_id), media_type="image/png")

    ui_dir = ui_dir or os.environ.get(UI_DIR_ENV)
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _render_fallback_png(manifest: DatasetManifest, image_id: str) -> bytes:
    """Visualize the image's modal masks when no photograph is on disk."""
    from PIL import Image

    info = manifest.image_by_id(image_id)
    rgb = np.zeros((info.height, info.width, 3), dtype=np.uint8)
    for rec in sorted(manifest.records_for_image(image_id), key=lambda r: r.instance_id):
        color = _PALETTE[(rec.instance_id - 1) % len(_PALETTE)]
        rgb[rec.modal] = color
    buf = io.BytesIO()
    Image.fromarray(rgb).save(buf, format="PNG")
    return buf.getvalue()


def run_server(data_dir: str | Path | None, port: int = 8080, ui_dir: str | Path | None = None) -> None:
    import uvicorn

    app = create_app(data_dir, ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
