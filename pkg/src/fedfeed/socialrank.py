"""Friend engagement scoring and ranking.

The focal user's likes, comments and shares on each friend's content are
combined into a weighted engagement score; friends are ranked descending by
that score with a deterministic id tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus

DEFAULT_FRIEND_WEIGHTS = (0.2, 0.5, 0.3)  # (w_l, w_c, w_sh)


@dataclass(frozen=True)
class FriendEngagement:
    friend_id: str
    likes: int
    comments: int
    shares: int
    delta: float


def friend_engagement(
    likes: int,
    comments: int,
    shares: int,
    weights: tuple[float, float, float] = DEFAULT_FRIEND_WEIGHTS,
) -> float:
    if min(likes, comments, shares) < 0:
        raise ValueError("counts must be non-negative")
    w_l, w_c, w_sh = weights
    if min(w_l, w_c, w_sh) < 0:
        raise ValueError("weights must be non-negative")
    return w_l * likes + w_c * comments + w_sh * shares


def rank_friends(
    user_id: str,
    corpus: Corpus,
    weights: tuple[float, float, float] = DEFAULT_FRIEND_WEIGHTS,
) -> list[FriendEngagement]:
    """Rank every friend by the user's engagement with their content.

    Descending by score, ties broken by ascending friend id; friends the user
    never engaged with are kept with score 0.
    """
    if not corpus.has_user(user_id):
        raise KeyError(f"unknown user {user_id!r}")
    friends = corpus.friends_of(user_id)
    counts = {f: {"like": 0, "comment": 0, "share": 0} for f in friends}
    for event in corpus.events_by(user_id):
        post = corpus.post(event.target_post_id)
        if post is not None and post.author_id in counts:
            counts[post.author_id][event.kind] += 1
    ranked = [
        FriendEngagement(
            friend_id=f,
            likes=c["like"],
            comments=c["comment"],
            shares=c["share"],
            delta=friend_engagement(c["like"], c["comment"], c["share"], weights),
        )
        for f, c in counts.items()
    ]
    ranked.sort(key=lambda fe: (-fe.delta, fe.friend_id))
    return ranked


def close_friends(
    ranking: list[FriendEngagement], top_fraction: float = 0.2
) -> list[FriendEngagement]:
    """Percentile cut realizing the close-friend vs normal-friend split."""
    if not ranking:
        return []
    n = max(1, int(len(ranking) * top_fraction))
    return ranking[:n]
