"""Application config: per-module weight/threshold blocks loaded from one
JSON file. The FEDFEED_CONFIG env var overrides the config path."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .feedfilter import FeedWeights
from .persona import ScoringWeights
from .socialrank import DEFAULT_FRIEND_WEIGHTS

ENV_CONFIG = "FEDFEED_CONFIG"


@dataclass(frozen=True)
class AppConfig:
    persona: ScoringWeights = field(default_factory=ScoringWeights)
    feed: FeedWeights = field(default_factory=FeedWeights)
    friend_weights: tuple[float, float, float] = DEFAULT_FRIEND_WEIGHTS
    now: int | None = None  # fixed clock for reproducible recency math

    @classmethod
    def from_dict(cls, data: dict) -> "AppConfig":
        persona = ScoringWeights(**data.get("persona", {}))
        feed = FeedWeights(**data.get("feed", {}))
        friend = tuple(data.get("friend_weights", DEFAULT_FRIEND_WEIGHTS))
        if len(friend) != 3:
            raise ValueError("friend_weights needs exactly three entries")
        return cls(persona=persona, feed=feed, friend_weights=friend, now=data.get("now"))

    @classmethod
    def from_file(cls, path: str | Path) -> "AppConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def resolve(cls, path: str | Path | None = None) -> "AppConfig":
        """Load from the given path, else FEDFEED_CONFIG, else defaults."""
        env_path = os.environ.get(ENV_CONFIG)
        if env_path:
            path = env_path
        if path is None:
            return cls()
        return cls.from_file(path)
