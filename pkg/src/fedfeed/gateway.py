"""HTTP service tying the pipeline together: feeds, feedback, persona
profiles, video queries and federated simulation runs.

State is event-sourced: every mutation goes through the append-only log, and
rebuilding the service over the same corpus + log reproduces responses
byte-for-byte. Recency math never reads the wall clock when a request
supplies an X-Now header or the config pins a clock.
"""

from __future__ import annotations

import dataclasses
import hashlib
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Header, HTTPException
from pydantic import BaseModel

from . import feedfilter, fedsim, persona, socialrank, vidquery
from .config import AppConfig
from .corpus import (
    CATEGORIES,
    Corpus,
    EventLog,
    FeedbackEvent,
    InteractionEvent,
    load_corpus,
)


def shard_index(author_id: str, k: int) -> int:
    """Deterministic client assignment for federated runs."""
    digest = hashlib.blake2b(author_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % k


@dataclass
class ServiceState:
    corpus: Corpus
    log: EventLog
    config: AppConfig
    store: vidquery.NodeStore = field(default_factory=vidquery.NodeStore)
    affinities: dict[str, dict[str, float]] = field(default_factory=dict)
    bow_model: fedsim.BowModel | None = None
    _profile_cache: dict[str, persona.PersonaProfile] = field(default_factory=dict)
    _rank_cache: dict[str, list[socialrank.FriendEngagement]] = field(default_factory=dict)
    _write_lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def build(cls, corpus_path: str | Path, log_path: str | Path, config: AppConfig) -> "ServiceState":
        corpus = load_corpus(corpus_path)
        log = EventLog(Path(log_path), corpus)
        state = cls(corpus=corpus, log=log, config=config)
        state._index_videos()
        state._replay()
        return state

    def _index_videos(self) -> None:
        for post in self.corpus.posts:
            if post.media_kind == "video" and post.transcript:
                vidquery.index_video(self.store, post.id, post.transcript)

    def _replay(self) -> None:
        for event in self.log.replay():
            if isinstance(event, InteractionEvent):
                self._apply_interaction(event)
            else:
                self._apply_feedback(event)

    def _invalidate(self, user_id: str | None = None) -> None:
        if user_id is None:
            self._profile_cache.clear()
            self._rank_cache.clear()
        else:
            self._profile_cache.pop(user_id, None)
            self._rank_cache.pop(user_id, None)

    def _apply_interaction(self, event: InteractionEvent) -> None:
        self.corpus.add_event(event)
        self._invalidate()

    def _apply_feedback(self, event: FeedbackEvent) -> None:
        post = self.corpus.post(event.post_id)
        profile = self.profile(event.user_id).with_affinities(
            self.user_affinities(event.user_id)
        )
        updated = feedfilter.apply_feedback(
            profile, event, self.config.feed.beta, post.category
        )
        self.affinities[event.user_id] = updated.affinities

    def profile(self, user_id: str) -> persona.PersonaProfile:
        if user_id not in self._profile_cache:
            self._profile_cache[user_id] = persona.build_profile(
                user_id, self.corpus, self.config.persona
            )
        return self._profile_cache[user_id]

    def user_affinities(self, user_id: str) -> dict[str, float]:
        if user_id in self.affinities:
            return self.affinities[user_id]
        return self.profile(user_id).affinities

    def ranks(self, user_id: str) -> list[socialrank.FriendEngagement]:
        if user_id not in self._rank_cache:
            self._rank_cache[user_id] = socialrank.rank_friends(
                user_id, self.corpus, self.config.friend_weights
            )
        return self._rank_cache[user_id]

    def clock(self, header_now: int | None = None) -> int:
        if header_now is not None:
            return header_now
        if self.config.now is not None:
            return self.config.now
        return int(time.time())

    def feed(self, user_id: str, now: int) -> list[feedfilter.FeedCandidate]:
        profile = self.profile(user_id).with_affinities(self.user_affinities(user_id))
        return feedfilter.build_feed(
            user_id, self.corpus, profile, self.ranks(user_id), self.config.feed, now
        )

    def record_feedback(self, event: FeedbackEvent) -> dict[str, float]:
        with self._write_lock:
            self.log.append(event)
            self._apply_feedback(event)
            return self.affinities[event.user_id]

    def record_interaction(self, event: InteractionEvent) -> int:
        with self._write_lock:
            seq = self.log.append(event)
            self._apply_interaction(event)
            return seq

    def quadratic_demo_shards(self, k: int, dim: int, seed: int) -> list[fedsim.Shard]:
        rng = np.random.default_rng(seed)
        return [
            fedsim.QuadraticShard(
                client_id=i,
                center=rng.uniform(-5.0, 5.0, size=dim),
                n_k=int(rng.integers(1, 101)),
            )
            for i in range(k)
        ]

    def corpus_bow_shards(self, k: int) -> list[fedsim.Shard]:
        docs_per_client: list[list[tuple[str, str]]] = [[] for _ in range(k)]
        for post in self.corpus.posts:
            text = post.body + (" " + post.transcript if post.transcript else "")
            docs_per_client[shard_index(post.author_id, k)].append((text, post.category))
        return fedsim.make_bow_shards(docs_per_client, CATEGORIES)

    def run_federated(self, cfg: fedsim.FedConfig, k: int, dim: int) -> dict:
        if cfg.loss_model == "quadratic":
            shards = self.quadratic_demo_shards(k, dim, cfg.seed)
        else:
            shards = self.corpus_bow_shards(k)
            if not shards:
                raise ValueError("corpus has no posts to shard")
        trace = fedsim.run_simulation(shards, cfg)
        summary = {
            "loss_model": cfg.loss_model,
            "rounds": cfg.rounds,
            "clients": len(shards),
            "initial_loss": trace.records[0].loss,
            "final_loss": trace.records[-1].loss,
        }
        if cfg.rounds >= 1:
            report = fedsim.check_descent(trace, cfg)
            summary["descent"] = dataclasses.asdict(report)
        if cfg.loss_model == "bow_classifier":
            with self._write_lock:
                self.bow_model = fedsim.BowModel(w=trace.final_w)
            summary["training_accuracy"] = fedsim.bow_accuracy(self.bow_model, shards)
        return summary


class FeedbackBody(BaseModel):
    user_id: str
    post_id: str
    verdict: str
    occurred_at: int | None = None


class QueryBody(BaseModel):
    question: str


class FedRunBody(BaseModel):
    eta: float = 0.5
    rounds: int = 100
    mode: str = "gradient"
    local_epochs: int = 1
    loss_model: str = "quadratic"
    lipschitz_l: float | None = None
    seed: int = 0
    clients: int = 4
    dim: int = 8


def _candidate_dict(c: feedfilter.FeedCandidate) -> dict:
    return dataclasses.asdict(c)


def _sorted_affinities(aff: dict[str, float]) -> dict[str, float]:
    return {k: aff[k] for k in sorted(aff)}


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="fedfeed gateway")
    app.state.service = state

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/feed/{user_id}")
    def get_feed(user_id: str, limit: int = 20, x_now: int | None = Header(default=None)):
        if limit < 0:
            raise HTTPException(status_code=400, detail="limit must be >= 0")
        if not state.corpus.has_user(user_id):
            raise HTTPException(status_code=404, detail=f"unknown user {user_id}")
        now = state.clock(x_now)
        feed = state.feed(user_id, now)
        return {
            "user_id": user_id,
            "now": now,
            "total": len(feed),
            "feed": [_candidate_dict(c) for c in feed[:limit]],
        }

    @app.post("/feedback")
    def post_feedback(body: FeedbackBody, x_now: int | None = Header(default=None)):
        if body.verdict not in ("like", "dislike"):
            raise HTTPException(status_code=400, detail=f"bad verdict {body.verdict}")
        if not state.corpus.has_user(body.user_id):
            raise HTTPException(status_code=404, detail=f"unknown user {body.user_id}")
        if state.corpus.post(body.post_id) is None:
            raise HTTPException(status_code=404, detail=f"unknown post {body.post_id}")
        occurred = body.occurred_at if body.occurred_at is not None else state.clock(x_now)
        event = FeedbackEvent(
            user_id=body.user_id,
            post_id=body.post_id,
            verdict=body.verdict,
            occurred_at=occurred,
        )
        affinities = state.record_feedback(event)
        return {"user_id": body.user_id, "affinities": _sorted_affinities(affinities)}

    @app.post("/videos/{video_id}/query")
    def post_video_query(video_id: str, body: QueryBody):
        if not body.question.strip():
            raise HTTPException(status_code=400, detail="empty question")
        try:
            result = vidquery.answer_query(state.store, video_id, body.question)
        except vidquery.VidQueryError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return {
            "video_id": video_id,
            "answer": result.answer,
            "node_id": result.node_id,
            "similarity": result.similarity,
            "prompt": result.prompt,
        }

    @app.get("/persona/{user_id}")
    def get_persona(user_id: str):
        if not state.corpus.has_user(user_id):
            raise HTTPException(status_code=404, detail=f"unknown user {user_id}")
        profile = state.profile(user_id)
        affinities = state.user_affinities(user_id)
        return {
            "user_id": user_id,
            "cold_start": profile.cold_start,
            "categories": {
                cat: dataclasses.asdict(cs) for cat, cs in sorted(profile.categories.items())
            },
            "affinities": _sorted_affinities(affinities),
        }

    @app.post("/fed/run")
    def post_fed_run(body: FedRunBody):
        try:
            cfg = fedsim.FedConfig(
                eta=body.eta,
                rounds=body.rounds,
                mode=body.mode,
                local_epochs=body.local_epochs,
                loss_model=body.loss_model,
                lipschitz_l=body.lipschitz_l,
                seed=body.seed,
            )
            return state.run_federated(cfg, body.clients, body.dim)
        except fedsim.DivergenceError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "divergence", "round": exc.round_index},
            ) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app
