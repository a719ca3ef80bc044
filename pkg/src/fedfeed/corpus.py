"""Domain types, corpus ingestion and the append-only event log.

The corpus file is UTF-8 line-delimited JSON with a "type" discriminator
(user / post / event). The event log is a separate line-delimited JSON file
with monotonically increasing sequence numbers; replaying it reconstructs the
exact in-memory state (event-sourcing contract).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .wordlists import NEGATIVE_WORDS, POSITIVE_WORDS

CATEGORIES = ("sports", "politics", "entertainment", "science", "general")
SENTIMENT_LABELS = ("positive", "negative", "neutral")
EVENT_KINDS = ("like", "comment", "share")
VERDICTS = ("like", "dislike")


class CorpusError(Exception):
    """Base class for corpus loading/validation failures."""


class ParseError(CorpusError):
    """Malformed corpus or log file."""


class ReferentialError(CorpusError):
    """A record references an unknown user or post."""


class ValidationError(CorpusError):
    """A record fails a field-level invariant."""


@dataclass(frozen=True)
class Comment:
    author_id: str
    text: str
    sentiment_label: str
    created_at: int


@dataclass(frozen=True)
class Post:
    id: str
    author_id: str
    category: str
    body: str
    media_kind: str
    published_at: int
    likes: int = 0
    shares: int = 0
    comments: tuple[Comment, ...] = ()
    transcript: str | None = None


@dataclass(frozen=True)
class InteractionEvent:
    actor_id: str
    target_post_id: str
    kind: str
    category: str
    occurred_at: int


@dataclass(frozen=True)
class FeedbackEvent:
    user_id: str
    post_id: str
    verdict: str
    occurred_at: int


@dataclass
class Corpus:
    users: list[str]
    friendships: dict[str, list[str]]
    posts: list[Post]
    events: list[InteractionEvent]

    def __post_init__(self):
        self._posts_by_id = {p.id: p for p in self.posts}

    def post(self, post_id: str) -> Post | None:
        return self._posts_by_id.get(post_id)

    def has_user(self, user_id: str) -> bool:
        return user_id in set(self.users)

    def friends_of(self, user_id: str) -> list[str]:
        return list(self.friendships.get(user_id, []))

    def events_by(self, user_id: str) -> list[InteractionEvent]:
        return [e for e in self.events if e.actor_id == user_id]

    def add_event(self, event: InteractionEvent) -> None:
        """Append a validated interaction (used when replaying the log)."""
        validate_interaction(self, event)
        self.events.append(event)


def annotate_sentiment(text: str) -> str:
    """Keyword-lexicon fallback for comments that arrive without a label."""
    words = [w.strip(".,!?;:'\"()").lower() for w in text.split()]
    pos = sum(1 for w in words if w in POSITIVE_WORDS)
    neg = sum(1 for w in words if w in NEGATIVE_WORDS)
    if pos > neg:
        return "positive"
    if neg > pos:
        return "negative"
    return "neutral"


def _comment_from_record(rec: dict, post_id: str) -> Comment:
    label = rec.get("sentiment_label")
    if label is None:
        label = annotate_sentiment(rec.get("text", ""))
    if label not in SENTIMENT_LABELS:
        raise ValidationError(f"post {post_id}: bad sentiment label {label!r}")
    return Comment(
        author_id=rec["author_id"],
        text=rec.get("text", ""),
        sentiment_label=label,
        created_at=int(rec.get("created_at", 0)),
    )


def _post_from_record(rec: dict) -> Post:
    pid = rec["id"]
    likes = int(rec.get("likes", 0))
    shares = int(rec.get("shares", 0))
    if likes < 0 or shares < 0:
        raise ValidationError(f"post {pid}: negative counts")
    media_kind = rec.get("media_kind", "text")
    if media_kind not in ("text", "video"):
        raise ValidationError(f"post {pid}: bad media_kind {media_kind!r}")
    transcript = rec.get("transcript")
    if media_kind == "video" and not transcript:
        raise ValidationError(f"post {pid}: video post missing transcript")
    category = rec.get("category", "general")
    if category not in CATEGORIES:
        raise ValidationError(f"post {pid}: unknown category {category!r}")
    comments = tuple(_comment_from_record(c, pid) for c in rec.get("comments", []))
    return Post(
        id=pid,
        author_id=rec["author_id"],
        category=category,
        body=rec.get("body", ""),
        media_kind=media_kind,
        published_at=int(rec["published_at"]),
        likes=likes,
        shares=shares,
        comments=comments,
        transcript=transcript,
    )


def validate_interaction(corpus: Corpus, event: InteractionEvent) -> None:
    if event.kind not in EVENT_KINDS:
        raise ValidationError(f"bad event kind {event.kind!r}")
    if corpus.post(event.target_post_id) is None:
        raise ReferentialError(
            f"event references unknown post {event.target_post_id!r}"
        )


def validate_feedback(corpus: Corpus, event: FeedbackEvent) -> None:
    if event.verdict not in VERDICTS:
        raise ValidationError(f"bad verdict {event.verdict!r}")
    if corpus.post(event.post_id) is None:
        raise ReferentialError(f"feedback references unknown post {event.post_id!r}")


def load_corpus(path: str | Path) -> Corpus:
    """Parse and validate a line-delimited JSON corpus file.

    Pure function of the file bytes: identical bytes yield a structurally
    identical Corpus. Events come back sorted ascending by occurred_at.
    """
    users: list[str] = []
    friendships: dict[str, list[str]] = {}
    posts: list[Post] = []
    raw_events: list[dict] = []

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON ({exc})") from exc
            kind = rec.get("type")
            if kind == "user":
                users.append(rec["id"])
                friendships[rec["id"]] = list(rec.get("friends", []))
            elif kind == "post":
                posts.append(_post_from_record(rec))
            elif kind == "event":
                raw_events.append(rec)
            else:
                raise ParseError(f"line {lineno}: unknown record type {kind!r}")

    known_users = set(users)
    for uid, friends in friendships.items():
        for f in friends:
            if f not in known_users:
                raise ReferentialError(f"user {uid}: unknown friend {f!r}")

    posts_by_id = {}
    for p in posts:
        if p.id in posts_by_id:
            raise ValidationError(f"duplicate post id {p.id!r}")
        posts_by_id[p.id] = p

    events: list[InteractionEvent] = []
    for rec in raw_events:
        target = rec["target_post_id"]
        post = posts_by_id.get(target)
        if post is None:
            raise ReferentialError(f"event references unknown post {target!r}")
        kind = rec["kind"]
        if kind not in EVENT_KINDS:
            raise ValidationError(f"event on {target}: bad kind {kind!r}")
        events.append(
            InteractionEvent(
                actor_id=rec["actor_id"],
                target_post_id=target,
                kind=kind,
                category=rec.get("category", post.category),
                occurred_at=int(rec["occurred_at"]),
            )
        )
    events.sort(key=lambda e: e.occurred_at)

    return Corpus(users=users, friendships=friendships, posts=posts, events=events)


def _event_to_record(event: InteractionEvent | FeedbackEvent) -> dict:
    if isinstance(event, InteractionEvent):
        return {
            "event": "interaction",
            "actor_id": event.actor_id,
            "target_post_id": event.target_post_id,
            "kind": event.kind,
            "category": event.category,
            "occurred_at": event.occurred_at,
        }
    return {
        "event": "feedback",
        "user_id": event.user_id,
        "post_id": event.post_id,
        "verdict": event.verdict,
        "occurred_at": event.occurred_at,
    }


def _event_from_record(rec: dict) -> InteractionEvent | FeedbackEvent:
    if rec["event"] == "interaction":
        return InteractionEvent(
            actor_id=rec["actor_id"],
            target_post_id=rec["target_post_id"],
            kind=rec["kind"],
            category=rec["category"],
            occurred_at=int(rec["occurred_at"]),
        )
    if rec["event"] == "feedback":
        return FeedbackEvent(
            user_id=rec["user_id"],
            post_id=rec["post_id"],
            verdict=rec["verdict"],
            occurred_at=int(rec["occurred_at"]),
        )
    raise ParseError(f"unknown log record {rec.get('event')!r}")


@dataclass
class EventLog:
    """Append-only JSONL event log with monotonically increasing seq numbers.

    Single-writer: appends are serialized through a lock; readers replay a
    consistent prefix of the file.
    """

    path: Path
    corpus: Corpus
    _seq: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        self.path = Path(self.path)
        if self.path.exists():
            for rec in self._read_records():
                self._seq = max(self._seq, rec["seq"])
        else:
            self.path.touch()

    def _read_records(self) -> list[dict]:
        records = []
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ParseError(f"log line {lineno}: {exc}") from exc
        return records

    def append(self, event: InteractionEvent | FeedbackEvent) -> int:
        """Validate, durably append, and return the assigned sequence number."""
        if isinstance(event, InteractionEvent):
            validate_interaction(self.corpus, event)
        elif isinstance(event, FeedbackEvent):
            validate_feedback(self.corpus, event)
        else:
            raise ValidationError(f"unsupported event type {type(event).__name__}")
        with self._lock:
            self._seq += 1
            rec = {"seq": self._seq, **_event_to_record(event)}
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            return self._seq

    def replay(self) -> list[InteractionEvent | FeedbackEvent]:
        """Return every logged event in append order."""
        records = sorted(self._read_records(), key=lambda r: r["seq"])
        return [_event_from_record(r) for r in records]

    def __len__(self) -> int:
        return self._seq
