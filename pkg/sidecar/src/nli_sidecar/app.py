"""The /entail HTTP surface.

POST /entail with ``{"premise": str, "hypotheses": [str, ...]}`` returns
``{"scores": [{"entail": f, "neutral": f, "contradict": f}, ...]}`` parallel to
the input order. Hypotheses are fed to the model in chunks of at most
``max_batch`` per forward pass. Malformed requests get a 400 with a reason.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .models import ScoringModel


def create_app(model: ScoringModel, max_batch: int = 32) -> FastAPI:
    if max_batch < 1:
        raise ValueError("max_batch must be >= 1")
    app = FastAPI(title="nli-sidecar", docs_url=None, redoc_url=None)
    app.state.model = model
    app.state.max_batch = max_batch
    # Forward passes are serialized: scoring models need not be thread-safe.
    forward_lock = threading.Lock()

    def bad_request(reason: str) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "bad_request", "detail": reason})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "model": getattr(model, "name", getattr(model, "model_id", "?"))}

    @app.post("/entail")
    async def entail(request: Request):
        try:
            body = await request.json()
        except Exception:
            return bad_request("body must be JSON")
        if not isinstance(body, dict):
            return bad_request("body must be a JSON object")
        premise = body.get("premise")
        hypotheses = body.get("hypotheses")
        if not isinstance(premise, str):
            return bad_request("'premise' must be a string")
        if not isinstance(hypotheses, list) or not all(isinstance(h, str) for h in hypotheses):
            return bad_request("'hypotheses' must be a list of strings")

        scores = []
        with forward_lock:
            for start in range(0, len(hypotheses), max_batch):
                chunk = hypotheses[start : start + max_batch]
                scores.extend(model.score(premise, chunk))
        return {
            "scores": [
                {"entail": e, "neutral": n, "contradict": c} for (e, n, c) in scores
            ]
        }

    return app
