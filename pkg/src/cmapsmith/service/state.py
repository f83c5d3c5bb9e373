"""In-memory session store driving the interactive training loop.

One session per seed-color/training run. Mutating calls are serialized by a
per-session lock; distinct sessions never share mutable state. Given the
process rng seed, a session's results are fully determined by its response
sequence.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import colormap as cmod
from .. import planner as pl
from .. import preference as pref
from ..colorspace import LabColor, lab_to_hex
from ..corpus import Corpus
from ..environment import ColorGraph, Trajectory, build_graph, get_state_space
from ..reward import RewardContext


@dataclass
class Session:
    id: str
    seed_lab: LabColor
    seed_hex: str
    n_queries: int
    graph: ColorGraph
    candidates: list
    ctx: RewardContext
    model: pref.PreferenceModel
    rng: np.random.Generator
    lock: threading.Lock = field(default_factory=threading.Lock)
    query_counter: int = 0
    answered: int = 0
    current: tuple | None = None  # (query_id, Query)
    answered_ids: set = field(default_factory=set)
    results_bytes: bytes | None = None
    results_thread: threading.Thread | None = None
    results_error: Exception | None = None
    hex_cache: dict = field(default_factory=dict)

    @property
    def remaining(self) -> int:
        return self.n_queries - self.answered

    def render_hex(self, traj: Trajectory) -> list[str]:
        key = traj.state_ids if traj.state_ids is not None else traj.id
        if key not in self.hex_cache:
            cm = cmod.finalize(traj, self.seed_lab.to_array())
            self.hex_cache[key] = cm.hex_colors()
        return self.hex_cache[key]

    def next_query(self) -> tuple:
        """Current outstanding query, acquiring a new one when none is open."""
        if self.current is None:
            query = pref.acquire_query(self.model, self.candidates, self.ctx)
            self.query_counter += 1
            self.current = (f"q{self.query_counter}", query)
        return self.current

    def ingest(self, query_id: str, choice: int) -> None:
        qid, query = self.current
        self.model = pref.update_belief(self.model, query, choice, self.ctx, self.rng)
        self.answered += 1
        self.answered_ids.add(query_id)
        self.current = None

    def compute_results(self) -> bytes:
        """Rank the corpus and search for a novel colormap; serialize once."""
        ranked = pref.rank_corpus(self.model, self.candidates, self.ctx)
        ranking = [
            {"id": t.id, "score": score, "colors": self.render_hex(t)}
            for t, score in ranked
        ]
        theta = self.model.mean
        result = pl.search(
            self.graph,
            theta,
            self.ctx,
            self.candidates,
            pl.QLearningConfig(),
            rng_seed=int(self.rng.integers(2**31)),
        )
        novel = None
        if result.found:
            novel = {
                "colors": self.render_hex(result.best),
                "reward": result.best_reward,
            }
        doc = {"ranking": ranking, "novel": novel}
        return json.dumps(doc, sort_keys=True).encode()

    def snapshot(self) -> dict:
        return {
            "format": "session-snapshot/1",
            "session_id": self.id,
            "seed_color": self.seed_hex,
            "n_queries": self.n_queries,
            "answered": self.answered,
            "model": self.model.to_doc(),
        }


class SessionStore:
    """Process-wide registry; session rng streams derive from one root seed."""

    def __init__(self, corpus: Corpus, rng_seed: int = 0, n_default: int = 15,
                 snapshot_dir: str | None = None):
        self.corpus = corpus
        self.rng_seed = rng_seed
        self.n_default = n_default
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        self._sessions: dict[str, Session] = {}
        self._counter = 0
        self._lock = threading.Lock()

    def create(self, seed: LabColor, n_queries: int | None) -> Session:
        space = get_state_space(self.rng_seed)
        graph, candidates = build_graph(self.corpus, seed, space)
        ctx = RewardContext.for_candidates(candidates)
        with self._lock:
            self._counter += 1
            counter = self._counter
        rng = np.random.default_rng([self.rng_seed, counter])
        model = pref.PreferenceModel.prior(rng=rng)
        session = Session(
            id=uuid.uuid4().hex,
            seed_lab=seed,
            seed_hex=lab_to_hex(seed),
            n_queries=n_queries if n_queries is not None else self.n_default,
            graph=graph,
            candidates=candidates,
            ctx=ctx,
            model=model,
            rng=rng,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def persist(self, session: Session) -> None:
        if self.snapshot_dir is None:
            return
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        path = self.snapshot_dir / f"{session.id}.json"
        path.write_text(json.dumps(session.snapshot(), sort_keys=True))
