"""Per-user, per-category persona scoring.

Combines interaction distribution, engagement, sentiment and a rubric
readability score into a composite score per category. All operations are
pure functions; profiles are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .corpus import Corpus, InteractionEvent, Post
from .wordlists import DICTIONARY_WORDS, JARGON_WORDS

WEIGHT_SUM_TOL = 1e-9

# Rubric thresholds (config-overridable through rate_post_readability args).
DICTIONARY_HIT_THRESHOLD = 0.5
JARGON_DENSITY_THRESHOLD = 0.15


@dataclass(frozen=True)
class ScoringWeights:
    w_likes: float = 0.2
    w_shares: float = 0.5
    w_comments: float = 0.3
    w_e: float = 0.5
    w_r: float = 0.2
    w_s: float = 0.3

    def __post_init__(self):
        if min(self.w_likes, self.w_shares, self.w_comments) < 0:
            raise ValueError("engagement weights must be non-negative")
        if self.w_likes + self.w_shares + self.w_comments == 0:
            raise ValueError("engagement weights must not all be zero")
        if abs(self.w_e + self.w_r + self.w_s - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("persona weights must sum to 1")


@dataclass(frozen=True)
class EngagementCounts:
    likes: int
    shares: int
    comments: int
    max_e: float


@dataclass(frozen=True)
class SentimentCounts:
    n_positive: int
    n_negative: int
    n_neutral: int

    @property
    def n_total(self) -> int:
        return self.n_positive + self.n_negative + self.n_neutral


@dataclass(frozen=True)
class CategoryScores:
    engagement: float
    readability: float
    sentiment_normalized: float
    persona: float
    share: float


@dataclass(frozen=True)
class PersonaProfile:
    user_id: str
    categories: dict[str, CategoryScores] = field(default_factory=dict)
    affinities: dict[str, float] = field(default_factory=dict)
    cold_start: bool = False

    def with_affinities(self, affinities: dict[str, float]) -> "PersonaProfile":
        return replace(self, affinities=dict(affinities))


def category_distribution(events: list[InteractionEvent]) -> dict[str, float]:
    """Share of interactions per category: count(category) / total."""
    if not events:
        return {}
    counts: dict[str, int] = {}
    for e in events:
        counts[e.category] = counts.get(e.category, 0) + 1
    total = len(events)
    return {cat: n / total for cat, n in sorted(counts.items())}


def raw_engagement(likes: int, shares: int, comments: int, wts: ScoringWeights) -> float:
    return wts.w_likes * likes + wts.w_shares * shares + wts.w_comments * comments


def max_engagement(posts: list[Post], wts: ScoringWeights) -> float:
    """Corpus-wide normalizer: the largest raw weighted engagement of any post."""
    best = max(
        (raw_engagement(p.likes, p.shares, len(p.comments), wts) for p in posts),
        default=0.0,
    )
    return best if best > 0 else 1.0


def engagement_score(c: EngagementCounts, wts: ScoringWeights) -> float:
    if c.max_e <= 0:
        raise ValueError("max_e must be positive")
    return raw_engagement(c.likes, c.shares, c.comments, wts) / c.max_e


def sentiment_score(c: SentimentCounts) -> float:
    """(positive - negative) / total; empty counts score neutral (0)."""
    if c.n_total == 0:
        return 0.0
    return (c.n_positive - c.n_negative) / c.n_total


def normalize_sentiment(s: float) -> float:
    if not -1.0 <= s <= 1.0:
        raise ValueError(f"sentiment {s} out of [-1, 1]")
    return (s + 1.0) / 2.0


def _tokenize(text: str) -> list[str]:
    words = []
    for raw in text.split():
        w = "".join(ch for ch in raw.lower() if ch.isalpha())
        if w:
            words.append(w)
    return words


def rate_post_readability(
    post: Post,
    hit_threshold: float = DICTIONARY_HIT_THRESHOLD,
    jargon_threshold: float = JARGON_DENSITY_THRESHOLD,
) -> int:
    """Rubric score in {0, 1, 2}.

    0 when the text looks unreadable (dictionary-hit ratio below threshold),
    2 when jargon density crosses its threshold, 1 otherwise.
    """
    words = _tokenize(post.body)
    if not words:
        return 0
    hits = sum(1 for w in words if w in DICTIONARY_WORDS)
    if hits / len(words) < hit_threshold:
        return 0
    jargon = sum(1 for w in words if w in JARGON_WORDS)
    if jargon / len(words) >= jargon_threshold:
        return 2
    return 1


def category_readability(scores: list[int]) -> float:
    if not scores:
        raise ValueError("no readability scores to average")
    return sum(scores) / len(scores)


def persona_score(e: float, r: float, s_normalized: float, wts: ScoringWeights) -> float:
    """Weighted blend of engagement, readability and sentiment for one category.

    The rubric readability lives on [0, 2]; it is rescaled by /2 here so the
    composite stays in [0, 1].
    """
    return wts.w_e * e + wts.w_r * (r / 2.0) + wts.w_s * s_normalized


def build_profile(user_id: str, corpus: Corpus, wts: ScoringWeights | None = None) -> PersonaProfile:
    """Score every category the user has interacted with.

    Per category: engagement is the mean engagement score of the distinct
    posts interacted with, sentiment aggregates those posts' comment labels,
    readability averages their rubric scores, and the share comes straight
    from the interaction distribution. Affinities start at the shares.
    """
    if not corpus.has_user(user_id):
        raise KeyError(f"unknown user {user_id!r}")
    wts = wts or ScoringWeights()
    events = corpus.events_by(user_id)
    if not events:
        return PersonaProfile(user_id=user_id, cold_start=True)

    max_e = max_engagement(corpus.posts, wts)
    shares = category_distribution(events)

    by_category: dict[str, list[InteractionEvent]] = {}
    for e in events:
        by_category.setdefault(e.category, []).append(e)

    categories: dict[str, CategoryScores] = {}
    for cat in sorted(by_category):
        post_ids = sorted({e.target_post_id for e in by_category[cat]})
        posts = [corpus.post(pid) for pid in post_ids]
        eng = sum(
            engagement_score(
                EngagementCounts(p.likes, p.shares, len(p.comments), max_e), wts
            )
            for p in posts
        ) / len(posts)
        n_pos = sum(1 for p in posts for c in p.comments if c.sentiment_label == "positive")
        n_neg = sum(1 for p in posts for c in p.comments if c.sentiment_label == "negative")
        n_neu = sum(1 for p in posts for c in p.comments if c.sentiment_label == "neutral")
        s_norm = normalize_sentiment(sentiment_score(SentimentCounts(n_pos, n_neg, n_neu)))
        r = category_readability([rate_post_readability(p) for p in posts])
        categories[cat] = CategoryScores(
            engagement=eng,
            readability=r,
            sentiment_normalized=s_norm,
            persona=persona_score(eng, r, s_norm, wts),
            share=shares[cat],
        )

    affinities = {cat: cs.share for cat, cs in categories.items()}
    return PersonaProfile(user_id=user_id, categories=categories, affinities=affinities)
