"""HTTP facade for the workbench UI and external clients.

Endpoints (JSON bodies; errors are ``{"error": code, "detail": ...}``):

* ``GET /schema`` / ``PUT /schema``: read or replace the session schema. PUT
  validates before committing (422 carries the violation report) and bumps the
  schema version.
* ``POST /analyze``: ``{"text", "mode": "e2e"|"task", "task"?, "gold"?}``;
  returns document annotations with ranked per-type scores per extraction
  (truncated to the top 5 types unless ``?full=1``).
* ``POST /label``: ``{"extraction_id", "verdict"}``.
* ``GET /metrics?scope=&sort=``: the metrics board.
* ``GET /config`` / ``PUT /config``: read or update the session run config
  (extension: lets the UI's threshold slider persist).

Sessions are single-tenant, keyed by the ``X-Session`` header (default
``default``); each has its own schema, run config and label log. Analyze runs
within a session are serialized so metric attribution is unambiguous.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .backends import BackendError, EntailmentBackend, make_backend
from .labelstore import (
    SCOPES,
    SORT_KEYS,
    LabelStore,
    UnknownExtractionError,
    extraction_payload,
)
from .pipeline import (
    MODE_E2E,
    MODE_TASK,
    TASKS,
    ConfigurationError,
    DocumentAnnotations,
    RunConfig,
    resolve_gold,
    run_e2e,
    run_task,
)
from .preprocess import TaggerBackend, TaggerTransportError, make_tagger, preprocess
from .schema import (
    Schema,
    SchemaParseError,
    SchemaValidationError,
    load_schema,
    schema_to_dict,
)

SESSION_HEADER = "X-Session"
DEFAULT_SESSION = "default"
RANKED_TOP = 5


def _error(status: int, code: str, detail) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


@dataclass
class Session:
    id: str
    schema: Schema
    config: RunConfig
    store: LabelStore
    lock: threading.Lock = field(default_factory=threading.Lock)


class Workbench:
    """Shared service state: sessions plus the backends they analyze with."""

    def __init__(
        self,
        schema: Schema | None = None,
        config: RunConfig | None = None,
        backend: EntailmentBackend | None = None,
        tagger: TaggerBackend | None = None,
        data_dir: str | Path | None = None,
    ):
        self.initial_schema = schema or Schema()
        self.initial_config = config or RunConfig()
        self._backend = backend
        self._tagger = tagger
        self.data_dir = Path(data_dir) if data_dir else None
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()

    def backend_for(self, config: RunConfig) -> EntailmentBackend:
        return (
            self._backend
            if self._backend is not None
            else make_backend(config.backend, max_batch=config.max_batch)
        )

    def tagger_for(self, config: RunConfig) -> TaggerBackend:
        return self._tagger if self._tagger is not None else make_tagger(config.tagger)

    def session(self, token: str) -> Session:
        with self._sessions_lock:
            existing = self._sessions.get(token)
            if existing is not None:
                return existing
            store_path = self.data_dir / f"{token}.jsonl" if self.data_dir else None
            session = Session(
                id=token,
                schema=self.initial_schema,
                config=self.initial_config,
                store=LabelStore(store_path),
            )
            self._sessions[token] = session
            return session


def _register_extractions(session: Session, annotations: DocumentAnnotations) -> None:
    sentences = annotations.sentences
    for extraction in annotations.all_extractions():
        if extraction.winning_template_id is None:
            continue  # gold echoes are provenance, not labelable output
        premise = sentences[extraction.candidate.sentence_index].text
        session.store.register_extraction(extraction_payload(extraction, premise))


def create_app(
    schema: Schema | None = None,
    config: RunConfig | None = None,
    backend: EntailmentBackend | None = None,
    tagger: TaggerBackend | None = None,
    data_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    bench = Workbench(schema=schema, config=config, backend=backend, tagger=tagger, data_dir=data_dir)
    app = FastAPI(title="entail-ie", docs_url=None, redoc_url=None)
    app.state.workbench = bench

    def session_of(request: Request) -> Session:
        return bench.session(request.headers.get(SESSION_HEADER, DEFAULT_SESSION))

    @app.get("/schema")
    def get_schema(request: Request):
        session = session_of(request)
        return {"schema": schema_to_dict(session.schema), "version": session.schema.version}

    @app.put("/schema")
    async def put_schema(request: Request):
        session = session_of(request)
        body = await request.body()
        try:
            incoming = load_schema(body)
        except SchemaValidationError as exc:
            return _error(422, "validation", [v.to_dict() for v in exc.report])
        except SchemaParseError as exc:
            return _error(400, "parse", str(exc))
        with session.lock:
            session.schema = replace(incoming, version=session.schema.version + 1)
            return {"version": session.schema.version}

    @app.post("/analyze")
    async def analyze(request: Request):
        session = session_of(request)
        full = request.query_params.get("full") == "1"
        try:
            body = await request.json()
        except Exception:
            return _error(400, "parse", "body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            return _error(400, "parse", "body must be an object with a 'text' string")
        mode = body.get("mode", MODE_E2E)
        with session.lock:
            config = session.config
            current = session.schema
            try:
                backend_impl = bench.backend_for(config)
                tagger_impl = bench.tagger_for(config)
                if mode == MODE_E2E:
                    annotations = run_e2e(body["text"], current, config, backend_impl, tagger_impl)
                elif mode == MODE_TASK:
                    task = body.get("task")
                    if task not in TASKS:
                        return _error(400, "parse", f"task must be one of {list(TASKS)}")
                    gold = None
                    if body.get("gold") is not None:
                        sentences = preprocess(body["text"], tagger_impl)
                        gold = resolve_gold(body["gold"], sentences)
                    annotations = run_task(
                        task, body["text"], gold, current, config, backend_impl, tagger_impl
                    )
                else:
                    return _error(400, "parse", "mode must be 'e2e' or 'task'")
            except ConfigurationError as exc:
                return _error(409, "configuration", str(exc))
            except (BackendError, TaggerTransportError) as exc:
                return _error(502, "backend", str(exc))
            if annotations.incomplete:
                return _error(502, "backend", annotations.error or "incomplete run")
            _register_extractions(session, annotations)
            return annotations.to_dict(top=None if full else RANKED_TOP)

    @app.post("/label")
    async def label(request: Request):
        session = session_of(request)
        try:
            body = await request.json()
        except Exception:
            return _error(400, "parse", "body must be JSON")
        extraction_id = body.get("extraction_id") if isinstance(body, dict) else None
        verdict = body.get("verdict") if isinstance(body, dict) else None
        if not isinstance(extraction_id, str) or verdict not in ("correct", "incorrect"):
            return _error(400, "parse", "need extraction_id and verdict correct|incorrect")
        try:
            recorded = session.store.record_label(extraction_id, verdict)
        except UnknownExtractionError:
            return _error(404, "unknown_extraction", extraction_id)
        return {"extraction_id": recorded.extraction_id, "verdict": recorded.verdict}

    @app.get("/metrics")
    def metrics(request: Request):
        session = session_of(request)
        scope = request.query_params.get("scope")
        sort = request.query_params.get("sort", "name")
        if scope is not None and scope not in SCOPES:
            return _error(400, "parse", f"scope must be one of {list(SCOPES)}")
        if sort not in SORT_KEYS:
            return _error(400, "parse", f"sort must be one of {list(SORT_KEYS)}")
        rows = session.store.metrics(scope=scope, sort=sort)
        return {"rows": [r.to_dict() for r in rows]}

    @app.get("/devset")
    def devset(request: Request):
        session = session_of(request)
        return Response(content=session.store.export_devset(), media_type="application/x-ndjson")

    @app.get("/config")
    def get_config(request: Request):
        return session_of(request).config.to_dict()

    @app.put("/config")
    async def put_config(request: Request):
        session = session_of(request)
        try:
            body = await request.json()
        except Exception:
            return _error(400, "parse", "body must be JSON")
        with session.lock:
            merged = {**session.config.to_dict(), **(body or {})}
            try:
                session.config = RunConfig.from_dict(merged)
            except ConfigurationError as exc:
                return _error(422, "validation", str(exc))
            return session.config.to_dict()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
