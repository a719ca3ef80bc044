"""Feed construction: importance scoring, sentiment/trend gating,
Flesch-Kincaid readability and the adaptive like/dislike feedback loop.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Comment, Corpus, FeedbackEvent
from .persona import (
    PersonaProfile,
    SentimentCounts,
    normalize_sentiment,
    sentiment_score,
)
from .socialrank import FriendEngagement

_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class FeedWeights:
    w_c: float = 0.3
    w_l: float = 0.2
    w_s: float = 0.3
    w_t: float = 0.2
    tau: float = 0.5
    beta: float = 0.1
    t_min: float = 1.0 / 60.0  # hours
    max_r: float = 18.0
    m: int = 10

    def __post_init__(self):
        if min(self.w_c, self.w_l, self.w_s, self.w_t) < 0:
            raise ValueError("importance weights must be non-negative")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        if self.t_min <= 0 or self.max_r <= 0:
            raise ValueError("t_min and max_r must be positive")


@dataclass(frozen=True)
class FeedCandidate:
    post_id: str
    category: str
    author_id: str
    comment_count: int
    like_count: int
    share_count: int
    age_hours: float
    sentiment: float
    trend: float
    importance: float
    filter_status: int
    readability: float
    friend_delta: float
    score: float


def post_importance(comments: int, likes: int, shares: int, age_hours: float, wts: FeedWeights) -> float:
    """w_C*C + w_L*L + w_S*S + w_T/T with the age clamped to t_min."""
    if min(comments, likes, shares) < 0:
        raise ValueError("counts must be non-negative")
    t = max(age_hours, wts.t_min)
    return wts.w_c * comments + wts.w_l * likes + wts.w_s * shares + wts.w_t * (1.0 / t)


def trend_score(comments: list[Comment] | tuple[Comment, ...], m: int) -> float:
    """Normalized sentiment of the most recent min(m, len) comments.

    No comments at all gets the neutral prior 0.5.
    """
    recent = list(comments)[-m:] if m > 0 else []
    if not recent:
        return 0.5
    pos = sum(1 for c in recent if c.sentiment_label == "positive")
    neg = sum(1 for c in recent if c.sentiment_label == "negative")
    neu = sum(1 for c in recent if c.sentiment_label == "neutral")
    return normalize_sentiment(sentiment_score(SentimentCounts(pos, neg, neu)))


def filter_status(sentiment: float, trend: float, tau: float) -> int:
    """1 iff sentiment > 0 and trend > tau, both strict."""
    return 1 if (sentiment > 0.0 and trend > tau) else 0


def count_syllables(word: str) -> int:
    """Maximal vowel groups (a e i o u y), minus a trailing silent 'e',
    never below 1."""
    w = "".join(ch for ch in word.lower() if ch.isalpha())
    if not w:
        return 0
    groups = _VOWEL_GROUP.findall(w)
    count = len(groups)
    if count > 1 and w.endswith("e") and groups[-1] == "e":
        count -= 1
    return max(count, 1)


def flesch_kincaid_grade(text: str) -> float:
    """FKGL = 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59.

    Sentences split on [.?!]; words split on whitespace; syllables counted by
    the vowel-group rule above, so the result is reproducible bit-for-bit.
    """
    sentences = [s for s in _SENTENCE_SPLIT.split(text) if s.strip()]
    words = [w for w in text.split() if any(ch.isalpha() for ch in w)]
    if not words or not sentences:
        raise ValueError("text needs at least one word and one sentence")
    syllables = sum(count_syllables(w) for w in words)
    return 0.39 * (len(words) / len(sentences)) + 11.8 * (syllables / len(words)) - 15.59


def readability_norm(fkgl: float, max_r: float) -> float:
    """1 - FKGL/MaxR, clamped into [0, 1]."""
    if max_r <= 0:
        raise ValueError("max_r must be positive")
    return min(1.0, max(0.0, 1.0 - fkgl / max_r))


def apply_feedback(profile: PersonaProfile, event: FeedbackEvent, beta: float, category: str) -> PersonaProfile:
    """Multiplicative affinity update followed by simplex renormalization.

    A like scales the post's category by (1+beta), a dislike by (1-beta).
    Unknown categories join the simplex with prior mass 0 first. Returns a new
    profile; the input is untouched.
    """
    affinities = dict(profile.affinities)
    affinities.setdefault(category, 0.0)
    factor = (1.0 + beta) if event.verdict == "like" else (1.0 - beta)
    affinities[category] *= factor
    total = sum(affinities.values())
    if total > 0:
        affinities = {k: v / total for k, v in affinities.items()}
    elif event.verdict == "like":
        # Cold-start simplex: the first like seeds its category outright.
        affinities = {k: (1.0 if k == category else 0.0) for k in affinities}
    return profile.with_affinities(affinities)


def build_feed(
    user_id: str,
    corpus: Corpus,
    profile: PersonaProfile,
    friend_ranks: list[FriendEngagement],
    wts: FeedWeights,
    now: int,
) -> list[FeedCandidate]:
    """Score and gate every friend post, returning the surviving candidates
    sorted by final score (importance x category affinity x friend bonus),
    ties broken by ascending post id.
    """
    if not corpus.has_user(user_id):
        raise KeyError(f"unknown user {user_id!r}")
    friends = set(corpus.friends_of(user_id))
    delta_by_friend = {fe.friend_id: fe.delta for fe in friend_ranks}
    delta_max = max(delta_by_friend.values(), default=0.0)

    candidates = []
    for post in corpus.posts:
        if post.author_id not in friends:
            continue
        age = max((now - post.published_at) / 3600.0, wts.t_min)
        pos = sum(1 for c in post.comments if c.sentiment_label == "positive")
        neg = sum(1 for c in post.comments if c.sentiment_label == "negative")
        neu = sum(1 for c in post.comments if c.sentiment_label == "neutral")
        s_i = sentiment_score(SentimentCounts(pos, neg, neu))
        t_i = trend_score(post.comments, wts.m)
        f_i = filter_status(s_i, t_i, wts.tau)
        p_i = post_importance(len(post.comments), post.likes, post.shares, age, wts)
        try:
            r_norm = readability_norm(flesch_kincaid_grade(post.body), wts.max_r)
        except ValueError:
            r_norm = 0.0
        delta = delta_by_friend.get(post.author_id, 0.0)
        affinity = profile.affinities.get(post.category, 0.0)
        score = p_i * affinity * (1.0 + delta / (1.0 + delta_max))
        candidates.append(
            FeedCandidate(
                post_id=post.id,
                category=post.category,
                author_id=post.author_id,
                comment_count=len(post.comments),
                like_count=post.likes,
                share_count=post.shares,
                age_hours=age,
                sentiment=s_i,
                trend=t_i,
                importance=p_i,
                filter_status=f_i,
                readability=r_norm,
                friend_delta=delta,
                score=score,
            )
        )

    passing = [c for c in candidates if c.filter_status == 1]
    passing.sort(key=lambda c: (-c.score, c.post_id))
    return passing
