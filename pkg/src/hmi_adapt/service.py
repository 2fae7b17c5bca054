"""JSON-over-HTTP recommendation service.

Client flow: emit every interaction to ``POST /api/events``, retrain on
demand via ``POST /api/train``, then poll ``POST /api/recommend`` with the
most recent interactions after each step. The serving model and its version
tag swap atomically, so a response's recommendations always match its
``model_version``, and requests in flight during a retrain finish against
the model they started with.

Accepted events are appended to a JSONL store and fsynced before the
acknowledgement is returned; the store is the single source of truth for
retraining, which makes ingestion at-least-once and restart-safe.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .events import (
    ContextAttributes,
    ElementVocabulary,
    RecordError,
    event_to_record,
    ingest_event_log,
    parse_event_record,
)
from .markov import (
    DEFAULT_MIN_SUPPORT,
    ContextModelStore,
    build_context_store,
    recommend_top_k,
    select_model,
    store_to_doc,
)
from .sequences import extract_corpus


@dataclass(frozen=True)
class ServiceConfig:
    vocabulary: ElementVocabulary
    store_path: Path
    default_order: int = 2
    default_context_mode: bool = True
    default_min_support: int = DEFAULT_MIN_SUPPORT
    default_k: int = 3
    surface_end_marker: bool = True


class _EventsBody(BaseModel):
    events: list[dict]


class _TrainBody(BaseModel):
    order: Optional[int] = Field(default=None, ge=1)
    context_mode: Optional[bool] = None
    min_support: Optional[int] = Field(default=None, ge=1)


class _RecommendBody(BaseModel):
    role: str
    shift: str
    recent: list[str] = Field(min_length=1)
    k: Optional[int] = Field(default=None, ge=1)


class _ServiceState:
    """Mutable service core shared by the route handlers."""

    def __init__(self, config: ServiceConfig) -> None:
        self.config = config
        self._swap_lock = threading.Lock()
        self._append_lock = threading.Lock()
        self._store: Optional[ContextModelStore] = None
        self._version: Optional[str] = None
        self._train_counter = 0

    def snapshot(self) -> tuple[Optional[ContextModelStore], Optional[str]]:
        with self._swap_lock:
            return self._store, self._version

    def install(self, store: ContextModelStore) -> str:
        digest = hashlib.sha256(
            json.dumps(store_to_doc(store), sort_keys=True).encode("utf-8")
        ).hexdigest()[:12]
        with self._swap_lock:
            self._train_counter += 1
            self._version = f"v{self._train_counter}-{digest}"
            self._store = store
            return self._version

    def append_events(self, lines: list[str]) -> None:
        path = self.config.store_path
        with self._append_lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8", newline="\n") as fp:
                for line in lines:
                    fp.write(line + "\n")
                fp.flush()
                os.fsync(fp.fileno())

    def read_store_lines(self) -> list[str]:
        with self._append_lock:
            if not self.config.store_path.exists():
                return []
            return self.config.store_path.read_text(encoding="utf-8").splitlines()


def _error(status: int, detail: str, fields: Optional[list[str]] = None) -> JSONResponse:
    body: dict = {"detail": detail}
    if fields is not None:
        body["fields"] = fields
    return JSONResponse(status_code=status, content=body)


def create_app(config: ServiceConfig) -> FastAPI:
    state = _ServiceState(config)
    app = FastAPI(title="hmi-adapt recommender", docs_url=None, redoc_url=None)
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
        fields = sorted(
            {
                ".".join(str(part) for part in error["loc"] if part != "body") or "body"
                for error in exc.errors()
            }
        )
        return _error(400, "request body failed validation", fields)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/model")
    def model_info() -> dict:
        store, version = state.snapshot()
        if store is None:
            return {"ready": False}
        return {
            "ready": True,
            "model_version": version,
            "order": store.order,
            "min_support": store.min_support,
            "sequence_count": store.sequence_count,
            "context_tiers": sorted(
                f"{role}/{shift}" for role, shift in store.per_context
            ),
            "role_tiers": sorted(store.per_role),
        }

    @app.post("/api/events")
    def ingest(body: _EventsBody) -> dict:
        accepted_lines: list[str] = []
        reasons: list[dict] = []
        for index, record in enumerate(body.events):
            try:
                event = parse_event_record(record, config.vocabulary)
            except RecordError as exc:
                reasons.append({"index": index, "reason": exc.reason})
                continue
            accepted_lines.append(json.dumps(event_to_record(event), sort_keys=True))
        if accepted_lines:
            state.append_events(accepted_lines)
        return {
            "accepted": len(accepted_lines),
            "rejected": len(reasons),
            "reasons": reasons,
        }

    @app.post("/api/train")
    def train(body: _TrainBody):
        order = body.order if body.order is not None else config.default_order
        context_mode = (
            body.context_mode if body.context_mode is not None else config.default_context_mode
        )
        min_support = (
            body.min_support if body.min_support is not None else config.default_min_support
        )

        lines = state.read_store_lines()
        if not lines:
            return _error(409, "event store is empty")
        ingested = ingest_event_log(lines, config.vocabulary)
        corpus, _stats = extract_corpus(ingested.events_by_user, config.vocabulary)
        if not corpus:
            return _error(409, "no valid sequences in the event store; model unchanged")

        store = build_context_store(
            corpus,
            order,
            min_support=min_support,
            vocabulary=config.vocabulary,
            context_mode=context_mode,
        )
        version = state.install(store)
        return {
            "model_version": version,
            "order": order,
            "context_mode": context_mode,
            "min_support": min_support,
            "sequence_count": store.sequence_count,
            "sequences_by_context": {
                f"{role}/{shift}": count
                for (role, shift), count in sorted(store.context_counts.items())
            },
            "sequences_by_role": dict(sorted(store.role_counts.items())),
        }

    @app.post("/api/recommend")
    def recommend(body: _RecommendBody):
        store, version = state.snapshot()
        if store is None:
            return _error(409, "model not ready")
        k = body.k if body.k is not None else config.default_k
        selection = select_model(store, ContextAttributes(role=body.role, shift=body.shift))
        fetch = k if config.surface_end_marker else k + 1
        try:
            ranked = recommend_top_k(selection.model, body.recent, fetch)
        except ValueError as exc:
            return _error(400, str(exc), ["recent"])

        items = list(ranked.items)
        if not config.surface_end_marker:
            items = [item for item in items if item.element != config.vocabulary.end_marker]
            items = items[:k]
        return {
            "recommendations": [
                {"element_id": item.element, "score": item.score, "rank": position}
                for position, item in enumerate(items, start=1)
            ],
            "model_tier": selection.tier,
            "model_order": selection.model.order,
            "model_version": version,
        }

    return app
