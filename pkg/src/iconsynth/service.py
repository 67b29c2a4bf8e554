"""HTTP generation service consumed by the design UI.

Endpoints (JSON over HTTP):
    GET  /health    -> {"status": ..., "checkpoint_id": ...}   (503 while loading)
    POST /generate  {text, count, seed?}          -> {"icons": [command-list]}
    POST /suggest   {text, partial, seed?}        -> {"path": command-list-path} | {"end": true}
    POST /fill      {text, left, right, seed?}    -> {"icon": command-list}

Malformed payloads get 400 with field-level messages; prompts that
exceed the sequence budget get 422. All sampling is grammar-constrained.
The checkpoint is read-only; every request runs an isolated sampling
session over the shared frozen parameters, so requests may be served
concurrently (endpoints are sync and run in the server's thread pool).
"""

from __future__ import annotations

import hashlib
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import sampler, wire
from .model import IconModel


class GenerateRequest(BaseModel):
    text: str = ""
    count: int = Field(default=1, ge=1, le=32)
    seed: int | None = None


class SuggestRequest(BaseModel):
    text: str = ""
    partial: list = Field(default_factory=list)  # command-list JSON (may be empty)
    seed: int | None = None


class FillRequest(BaseModel):
    text: str = ""
    left: list = Field(default_factory=list)
    right: list = Field(default_factory=list)
    seed: int | None = None


def _checkpoint_id(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def _strategy(defaults, seed):
    if defaults is None:
        return sampler.DecodeStrategy(grammar_constrained=True, seed=seed)
    return sampler.DecodeStrategy(
        kind=defaults.kind,
        temperature=defaults.temperature,
        k=defaults.k,
        p=defaults.p,
        grammar_constrained=True,  # the UI contract requires decodable icons
        max_icon_tokens=defaults.max_icon_tokens,
        seed=seed,
    )


def create_app(
    ckpt_path=None,
    vocab_path=None,
    model: IconModel | None = None,
    strategy_defaults=None,
    defer_load: bool = False,
) -> FastAPI:
    """Build the service app. Pass a loaded `model` directly (tests), or
    checkpoint/vocab paths; with defer_load the checkpoint loads in a
    background thread and requests get 503 until it is ready."""
    app = FastAPI(title="iconsynth", version="0.1.0")
    state = {"model": model, "checkpoint_id": "in-memory" if model else None}

    def _load():
        state["checkpoint_id"] = _checkpoint_id(ckpt_path)
        state["model"] = IconModel.load(ckpt_path, vocab_path)

    if model is None:
        if ckpt_path is None:
            raise ValueError("create_app needs a model or a checkpoint path")
        if defer_load:
            threading.Thread(target=_load, daemon=True).start()
        else:
            _load()

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(p) for p in e["loc"] if p != "body"),
             "message": e["msg"]}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": errors})

    @app.exception_handler(wire.WireError)
    async def wire_handler(request: Request, exc: wire.WireError):
        return JSONResponse(
            status_code=400, content={"errors": [{"field": "paths", "message": str(exc)}]}
        )

    @app.exception_handler(sampler.BudgetError)
    async def budget_handler(request: Request, exc: sampler.BudgetError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(sampler.GenerationError)
    async def generation_handler(request: Request, exc: sampler.GenerationError):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    def _model() -> IconModel | None:
        return state["model"]

    @app.get("/health")
    def health():
        if _model() is None:
            return JSONResponse(
                status_code=503,
                content={"status": "loading", "checkpoint_id": state["checkpoint_id"]},
            )
        return {"status": "ok", "checkpoint_id": state["checkpoint_id"]}

    def _require_model():
        m = _model()
        if m is None:
            raise _Loading()
        return m

    class _Loading(Exception):
        pass

    @app.exception_handler(_Loading)
    async def loading_handler(request: Request, exc: _Loading):
        return JSONResponse(status_code=503, content={"error": "checkpoint still loading"})

    @app.post("/generate")
    def generate(req: GenerateRequest):
        m = _require_model()
        icons = []
        base = req.seed if req.seed is not None else 0
        for i in range(req.count):
            strategy = _strategy(strategy_defaults, base + i)
            icon = sampler.generate(m, req.text, strategy)
            icons.append(wire.icon_to_json(icon))
        return {"icons": icons}

    @app.post("/suggest")
    def suggest(req: SuggestRequest):
        m = _require_model()
        partial = wire.icon_from_json(req.partial) if req.partial else None
        strategy = _strategy(strategy_defaults, req.seed if req.seed is not None else 0)
        path = sampler.suggest_next_path(m, req.text, partial, strategy)
        if path is None:
            return {"end": True}
        return {"path": wire.path_to_json(path)}

    @app.post("/fill")
    def fill(req: FillRequest):
        m = _require_model()
        left = wire.icon_from_json(req.left) if req.left else None
        right = wire.icon_from_json(req.right) if req.right else None
        strategy = _strategy(strategy_defaults, req.seed if req.seed is not None else 0)
        icon = sampler.fill_in_middle(m, req.text, left, right, strategy)
        return {"icon": wire.icon_to_json(icon)}

    return app
