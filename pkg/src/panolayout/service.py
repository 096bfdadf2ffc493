"""Stateful rendering service backing the interactive layout editor.

Sessions are in-memory: a background panorama, a scene layout, a revision
counter, and a bounded undo stack. Mutations on one session are serialized
under its lock; renders read an immutable layout snapshot, so repeating a
render at an unchanged revision returns a byte-identical body.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, Request, Response, UploadFile

from . import formats
from .imageops import PerspectiveCamera, project_perspective
from .layout import (
    SceneLayout,
    composite,
    composite_weight,
    manipulate,
    object_distance_field,
    object_opacity_field,
    random_layout,
)

UNDO_DEPTH = 64
# one fixed seed for the display projection keeps composite-rgb stable for
# the lifetime of a session (and comparable across sessions)
DISPLAY_PROJECTION_SEED = 1234


@dataclass
class SceneSession:
    id: str
    background: np.ndarray
    layout: SceneLayout
    revision: int = 0
    undo_stack: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def display_projection(d_f: int) -> np.ndarray:
    """Fixed random projection of d_f feature channels to 3 display channels."""
    rng = np.random.default_rng(DISPLAY_PROJECTION_SEED)
    return rng.standard_normal((d_f, 3)) / np.sqrt(d_f)


def composite_rgb(layout: SceneLayout) -> np.ndarray:
    vals = composite(layout).values
    rgb = vals @ display_projection(layout.d_f)
    return 0.5 + 0.5 * np.tanh(rgb)


def weight_heatmap(weight: np.ndarray) -> np.ndarray:
    w = np.clip(weight, 0.0, 1.0)
    return np.stack([w, 0.35 * w, np.zeros_like(w)], axis=-1)


def create_app(root: str | None = None) -> FastAPI:
    """Build the app; `root` optionally serves a static frontend at /ui."""
    app = FastAPI(title="panolayout service")
    sessions: dict[str, SceneSession] = {}
    if root is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=root, html=True), name="ui")

    def get_session(sid: str) -> SceneSession:
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return sess

    @app.get("/healthz")
    def healthz():
        return Response(content="ok", media_type="text/plain")

    @app.post("/sessions")
    async def create_session(image: UploadFile, layout: UploadFile | None = File(None),
                             random: str | None = Form(None)):
        data = await image.read()
        try:
            background = formats.load_png(data)
        except Exception as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        h, w = background.shape[:2]
        if layout is not None:
            try:
                doc = formats.layout_from_json((await layout.read()).decode())
            except formats.FormatError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            if (doc.width, doc.height) != (w, h):
                raise HTTPException(
                    status_code=400,
                    detail=f"layout {doc.width}x{doc.height} does not match image {w}x{h}",
                )
        elif random is not None:
            try:
                spec = json.loads(random)
                doc = random_layout(seed=int(spec["seed"]), n=int(spec.get("n", 20)),
                                    d_f=int(spec.get("d_f", 1024)), width=w, height=h)
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise HTTPException(status_code=400, detail=f"bad random spec: {exc}")
        else:
            raise HTTPException(status_code=400, detail="supply a layout file or a random spec")
        sid = uuid.uuid4().hex
        sessions[sid] = SceneSession(id=sid, background=background, layout=doc)
        return {"id": sid, "revision": 0}

    @app.get("/sessions/{sid}/layout")
    def get_layout(sid: str):
        sess = get_session(sid)
        with sess.lock:
            return {"revision": sess.revision, "layout": formats.layout_to_dict(sess.layout)}

    @app.post("/sessions/{sid}/ops")
    async def apply_op(sid: str, request: Request):
        sess = get_session(sid)
        try:
            op = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise HTTPException(status_code=400, detail=f"invalid JSON: {exc}")
        with sess.lock:
            try:
                new_layout = manipulate(sess.layout, op)
            except (ValueError, IndexError, KeyError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            sess.undo_stack.append(sess.layout)
            if len(sess.undo_stack) > UNDO_DEPTH:
                sess.undo_stack.pop(0)
            sess.layout = new_layout
            sess.revision += 1
            return {"revision": sess.revision}

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        sess = get_session(sid)
        with sess.lock:
            if not sess.undo_stack:
                raise HTTPException(status_code=409, detail="nothing to undo")
            sess.layout = sess.undo_stack.pop()
            sess.revision += 1
            return {"revision": sess.revision}

    @app.get("/sessions/{sid}/render")
    def render(sid: str, mode: str, yaw: float = 0.0, pitch: float = 0.0,
               roll: float = 0.0, fov: float = 1.2, out_w: int = 256, out_h: int = 192):
        sess = get_session(sid)
        with sess.lock:
            layout = sess.layout
            revision = sess.revision
        background = sess.background
        headers = {"X-Revision": str(revision)}
        try:
            if mode == "composite-rgb":
                body, media = formats.png_bytes(composite_rgb(layout)), "image/png"
            elif mode == "weight":
                body = formats.png_bytes(weight_heatmap(composite_weight(layout)))
                media = "image/png"
            elif mode == "overlay":
                heat = weight_heatmap(composite_weight(layout))
                body = formats.png_bytes(0.5 * background + 0.5 * heat)
                media = "image/png"
            elif mode == "background":
                body, media = formats.png_bytes(background), "image/png"
            elif mode == "perspective":
                cam = PerspectiveCamera(yaw=yaw, pitch=pitch, roll=roll, hfov=fov,
                                        out_w=out_w, out_h=out_h)
                body = formats.png_bytes(project_perspective(background, cam))
                media = "image/png"
            elif mode.startswith("opacity:"):
                body = formats.plt1_bytes(object_opacity_field(layout, int(mode.split(":")[1])))
                media = "application/octet-stream"
            elif mode.startswith("distance:"):
                body = formats.plt1_bytes(object_distance_field(layout, int(mode.split(":")[1])))
                media = "application/octet-stream"
            else:
                raise HTTPException(status_code=400, detail=f"unknown render mode {mode!r}")
        except (ValueError, IndexError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return Response(content=body, media_type=media, headers=headers)

    return app


def serve(port: int = 8000, host: str = "127.0.0.1", root: str | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(root=root), host=host, port=port)
