"""Deterministic federated-learning simulator and personalization engine:
sample-weighted aggregation with descent checking, persona and engagement
scoring, friend ranking, sentiment-gated feed filtering, embedding retrieval
over video descriptions, and an adaptive like/dislike feedback loop.
"""

__version__ = "0.1.0"
