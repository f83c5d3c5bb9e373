"""HTTP API exposing the full teach-rank-create loop.

Endpoints:
    POST /sessions                   start a session from a seed color
    GET  /sessions/{id}/query        the outstanding query pair (idempotent)
    POST /sessions/{id}/responses    ingest a 0/1/2 choice
    GET  /sessions/{id}/results      ranking plus the synthesized colormap

The browser UI is served from the frontend build directory when present.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles

from ..colorspace import hex_to_lab
from ..corpus import Corpus, load_corpus, load_starter_corpus
from ..environment import SeedUnsupportedError
from ..presets import PRESET_SEEDS
from .schemas import (
    ResponseAck,
    ResponseRequest,
    SessionCreateRequest,
    SessionCreateResponse,
)
from .state import SessionStore

_UI_DIR = Path(__file__).resolve().parents[3] / "frontend" / "dist"


def create_app(
    corpus: Corpus | None = None,
    corpus_path: str | None = None,
    rng_seed: int | None = None,
    n_default: int | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    if corpus is None:
        corpus_path = corpus_path or os.environ.get("CMAPSMITH_CORPUS")
        corpus = load_corpus(corpus_path) if corpus_path else load_starter_corpus()
    if rng_seed is None:
        rng_seed = int(os.environ.get("CMAPSMITH_RNG_SEED", "0"))
    if n_default is None:
        n_default = int(os.environ.get("CMAPSMITH_N_QUERIES", "15"))
    store = SessionStore(
        corpus,
        rng_seed=rng_seed,
        n_default=n_default,
        snapshot_dir=os.environ.get("CMAPSMITH_SNAPSHOT_DIR"),
    )

    app = FastAPI(title="cmapsmith", version="0.1.0")
    app.state.store = store

    def _session_or_404(session_id: str):
        session = store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.get("/api/info")
    def info():
        return {
            "corpus": corpus.name,
            "corpus_size": len(corpus),
            "n_default": n_default,
            "preset_seeds": PRESET_SEEDS,
        }

    @app.post("/sessions", response_model=SessionCreateResponse, status_code=201)
    def create_session(body: SessionCreateRequest):
        try:
            seed = hex_to_lab(body.seed)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))
        if body.n_queries is not None and body.n_queries < 0:
            raise HTTPException(status_code=400, detail="n_queries must be >= 0")
        try:
            session = store.create(seed, body.n_queries)
        except SeedUnsupportedError as e:
            raise HTTPException(
                status_code=422,
                detail={"error": "seed color unsupported", "suggestions": e.suggestions},
            )
        if len(session.candidates) < 2:
            raise HTTPException(
                status_code=422,
                detail={"error": "seed color unsupported", "suggestions": []},
            )
        return SessionCreateResponse(
            session_id=session.id, candidate_count=len(session.candidates)
        )

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        session = _session_or_404(session_id)
        with session.lock:
            if session.remaining <= 0:
                raise HTTPException(status_code=409, detail="query budget exhausted")
            qid, query = session.next_query()
            return {
                "query_id": qid,
                "left": session.render_hex(query.left),
                "right": session.render_hex(query.right),
                "remaining": session.remaining,
            }

    @app.post("/sessions/{session_id}/responses", response_model=ResponseAck)
    def post_response(session_id: str, body: ResponseRequest):
        session = _session_or_404(session_id)
        if body.choice not in (0, 1, 2):
            raise HTTPException(status_code=400, detail="choice must be 0, 1, or 2")
        with session.lock:
            if body.query_id in session.answered_ids:
                raise HTTPException(status_code=409, detail="response already recorded")
            if session.current is None or session.current[0] != body.query_id:
                raise HTTPException(status_code=409, detail="stale or unknown query_id")
            if session.remaining <= 0:
                raise HTTPException(status_code=409, detail="query budget exhausted")
            session.ingest(body.query_id, body.choice)
            store.persist(session)
            return ResponseAck(remaining=session.remaining)

    @app.get("/sessions/{session_id}/results")
    def get_results(
        session_id: str,
        early: int = 0,
        background: int = Query(0, alias="async"),
    ):
        session = _session_or_404(session_id)
        with session.lock:
            if session.results_bytes is not None:
                return Response(content=session.results_bytes, media_type="application/json")
            if session.results_error is not None:
                raise HTTPException(status_code=500, detail=str(session.results_error))
            if session.remaining > 0 and not early:
                raise HTTPException(
                    status_code=409,
                    detail="training incomplete; pass early=1 to finish now",
                )
            if background:
                if session.results_thread is None:

                    def work():
                        try:
                            payload = session.compute_results()
                        except Exception as e:  # surfaced on the next poll
                            session.results_error = e
                        else:
                            session.results_bytes = payload

                    session.results_thread = threading.Thread(target=work, daemon=True)
                    session.results_thread.start()
                return Response(
                    content=(
                        '{"status": "pending", "poll": "/sessions/%s/results?async=1&early=%d"}'
                        % (session_id, early)
                    ),
                    media_type="application/json",
                    status_code=202,
                )
            session.results_bytes = session.compute_results()
            return Response(content=session.results_bytes, media_type="application/json")

    ui = Path(ui_dir) if ui_dir else _UI_DIR
    if ui.is_dir():
        app.mount("/", StaticFiles(directory=str(ui), html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return {
                "service": "cmapsmith",
                "hint": "build the frontend (frontend/dist) to serve the UI here",
            }

    return app
