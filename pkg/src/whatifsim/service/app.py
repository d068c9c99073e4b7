"""HTTP API over the pipeline: scene creation, hypothetical-action answering,
and 30 Hz trajectory playback data for the browser client.

The store is an in-memory map guarded by a lock; simulations run outside it,
one per request, so requests on different scenes never interfere.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..core.serialize import SchemaError, decode_scene, dumps, encode_action, encode_scene, loads
from ..core.validate import validate_scene
from ..datagen import sample_scene
from ..physics.engine import SimulationResult, downsample_30hz
from ..pipeline import ModelBundle, PipelineError, WhatIfAnswer, answer_whatif
from .schemas import (
    CreateSceneRequest,
    ErrorResponse,
    SceneModel,
    SceneResponse,
    WhatIfRequest,
    WhatIfResponse,
)


@dataclass
class SessionStore:
    """Scene registry plus each scene's most recent simulation result.

    In-memory by default; with persist_dir set, scenes are mirrored to disk
    and reloaded on startup.
    """

    persist_dir: Path | None = None
    scenes: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self) -> None:
        if self.persist_dir is None:
            return
        self.persist_dir = Path(self.persist_dir)
        self.persist_dir.mkdir(parents=True, exist_ok=True)
        for path in sorted(self.persist_dir.glob("*.json")):
            self.scenes[path.stem] = decode_scene(loads(path.read_text(encoding="utf-8")))

    def _path(self, sid: str) -> Path:
        assert self.persist_dir is not None
        return self.persist_dir / f"{sid}.json"

    def put(self, scene) -> str:
        sid = uuid.uuid4().hex[:12]
        with self.lock:
            self.scenes[sid] = scene
            if self.persist_dir is not None:
                self._path(sid).write_text(dumps(encode_scene(scene)), encoding="utf-8")
        return sid

    def get(self, sid: str):
        with self.lock:
            return self.scenes.get(sid)

    def delete(self, sid: str) -> bool:
        with self.lock:
            self.results.pop(sid, None)
            if self.persist_dir is not None:
                self._path(sid).unlink(missing_ok=True)
            return self.scenes.pop(sid, None) is not None

    def remember_result(self, sid: str, result: SimulationResult) -> None:
        with self.lock:
            if sid in self.scenes:
                self.results[sid] = result


def _error(status: int, stage: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content=ErrorResponse(stage=stage, message=message).model_dump(),
    )


def _whatif_response(answer: WhatIfAnswer) -> WhatIfResponse:
    descriptions = [
        {
            "subject": cls.value,
            "text": text,
            "event": answer.events[cls].kind.value,
            "agent": answer.events[cls].agent.value if answer.events[cls].agent else None,
        }
        for cls, text in sorted(answer.descriptions.items())
    ]
    events = [
        {
            "t": ev.t,
            "a": ev.a.value,
            "b": ev.b if isinstance(ev.b, str) else ev.b.value,
            "impulse": ev.impulse_magnitude,
        }
        for ev in answer.result.contacts
    ]
    trajectories = []
    for cls in sorted(answer.result.trajectories):
        low = downsample_30hz(answer.result.trajectories[cls])
        trajectories.append(
            {
                "class": cls.value,
                "removed": low.removed,
                "rate_hz": 30,
                "samples": [
                    {
                        "t": float(low.times[i]),
                        "t3": [float(v) for v in low.translations[i]],
                        "r9": [float(v) for v in low.rotations[i].reshape(9)],
                    }
                    for i in range(len(low))
                ],
            }
        )
    return WhatIfResponse(
        action=encode_action(answer.action),
        descriptions=descriptions,
        events=events,
        trajectories_30hz=trajectories,
    )


def create_app(
    models: ModelBundle | None = None, store_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="whatifsim", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(Path(store_dir) if store_dir else None)
    app.state.store = store
    app.state.models = models

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        path = ".".join(str(p) for p in first.get("loc", ())[1:])
        message = f".{path}: {first.get('msg', 'invalid request body')}"
        return _error(400, "schema", message)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/scenes", response_model=SceneResponse, status_code=201)
    def create_scene(body: CreateSceneRequest):
        if body.scene is not None:
            try:
                scene = decode_scene(body.scene.model_dump(by_alias=True))
            except SchemaError as exc:
                return _error(400, "schema", str(exc))
            violations = validate_scene(scene)
            if violations:
                return _error(422, "validate", "; ".join(violations))
        else:
            scene = sample_scene(body.seed if body.seed is not None else 0)
        sid = store.put(scene)
        return SceneResponse(id=sid, scene=SceneModel.model_validate(encode_scene(scene)))

    @app.get("/scenes/{sid}", response_model=SceneResponse)
    def get_scene(sid: str):
        scene = store.get(sid)
        if scene is None:
            return _error(404, "store", f"unknown scene id {sid!r}")
        return SceneResponse(id=sid, scene=SceneModel.model_validate(encode_scene(scene)))

    @app.delete("/scenes/{sid}", status_code=204)
    def delete_scene(sid: str):
        if not store.delete(sid):
            return _error(404, "store", f"unknown scene id {sid!r}")
        return JSONResponse(status_code=204, content=None)

    @app.post("/scenes/{sid}/whatif", response_model=WhatIfResponse)
    def whatif(sid: str, body: WhatIfRequest):
        scene = store.get(sid)
        if scene is None:
            return _error(404, "store", f"unknown scene id {sid!r}")
        try:
            answer = answer_whatif(
                scene, body.text, app.state.models, backend=body.backend
            )
        except PipelineError as exc:
            return _error(422, exc.stage, str(exc))
        store.remember_result(sid, answer.result)
        return _whatif_response(answer)

    return app
