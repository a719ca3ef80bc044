"""Federated training simulator.

K clients and a coordinator run sample-weighted update/aggregation rounds on a
toy model: either a per-client quadratic (with a closed-form optimum for
oracle checks) or a multinomial logistic regression over hashed bag-of-words
features (the content categorizer). Every round the descent condition from
the smoothness analysis can be verified against the recorded loss trace.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .corpus import CATEGORIES, Post

BOW_BUCKETS = 2**16


class FedError(Exception):
    pass


class DivergenceError(FedError):
    def __init__(self, round_index: int):
        super().__init__(f"non-finite loss at round {round_index}")
        self.round_index = round_index


class UntrainedModelError(FedError):
    pass


@dataclass(frozen=True)
class QuadraticShard:
    client_id: int
    center: np.ndarray
    n_k: int


@dataclass(frozen=True)
class BowShard:
    client_id: int
    features: sparse.csr_matrix  # (n_k, n_buckets) token counts
    labels: np.ndarray  # (n_k,) class indices
    n_k: int
    n_classes: int
    n_buckets: int = BOW_BUCKETS


Shard = QuadraticShard | BowShard


@dataclass(frozen=True)
class FedConfig:
    eta: float = 0.5
    rounds: int = 100
    mode: str = "gradient"  # gradient | delta
    local_epochs: int = 1
    loss_model: str = "quadratic"  # quadratic | bow_classifier
    lipschitz_l: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if self.mode not in ("gradient", "delta"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.local_epochs < 1:
            raise ValueError("local_epochs must be >= 1")
        if self.mode == "gradient" and self.local_epochs != 1:
            raise ValueError("gradient mode implies local_epochs = 1")
        if self.loss_model not in ("quadratic", "bow_classifier"):
            raise ValueError(f"unknown loss model {self.loss_model!r}")


@dataclass(frozen=True)
class RoundRecord:
    t: int
    loss: float
    grad_norm: float
    weight_hash: str


@dataclass
class TrainingTrace:
    records: list[RoundRecord] = field(default_factory=list)
    final_w: np.ndarray | None = None
    lipschitz_l: float = 1.0


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def local_loss(w: np.ndarray, shard: Shard) -> float:
    if isinstance(shard, QuadraticShard):
        diff = w - shard.center
        with np.errstate(over="ignore"):  # divergence is detected via isfinite
            return 0.5 * float(diff @ diff)
    mat = w.reshape(shard.n_classes, shard.n_buckets)
    scores = shard.features @ mat.T  # (n, C)
    probs = _softmax(scores)
    picked = probs[np.arange(shard.n_k), shard.labels]
    return float(-np.mean(np.log(np.maximum(picked, 1e-300))))


def local_gradient(w: np.ndarray, shard: Shard) -> np.ndarray:
    if isinstance(shard, QuadraticShard):
        if w.shape != shard.center.shape:
            raise ValueError("dimension mismatch")
        return w - shard.center
    mat = w.reshape(shard.n_classes, shard.n_buckets)
    scores = shard.features @ mat.T
    probs = _softmax(scores)
    probs[np.arange(shard.n_k), shard.labels] -= 1.0
    grad = (probs.T @ shard.features) / shard.n_k  # (C, D)
    return np.asarray(grad).reshape(-1)


def local_update(w: np.ndarray, shard: Shard, cfg: FedConfig) -> np.ndarray:
    """Client-side update: raw gradient in gradient mode, or the weight delta
    after local_epochs full-batch descent steps at rate eta in delta mode."""
    if cfg.mode == "gradient":
        grad = local_gradient(w, shard)
        if not np.all(np.isfinite(grad)):
            raise FedError("non-finite gradient")
        return grad
    w_local = w.copy()
    for _ in range(cfg.local_epochs):
        w_local -= cfg.eta * local_gradient(w_local, shard)
    return w - w_local


def aggregate(updates: list[tuple[np.ndarray, int]], w: np.ndarray, eta: float) -> np.ndarray:
    """Server step: w - eta * sum_k (n_k/N) * delta_k.

    Summation runs left-to-right in the order given (callers pass ascending
    client_id) so the result is bit-deterministic.
    """
    if not updates:
        raise ValueError("no updates to aggregate")
    n_total = sum(n for _, n in updates)
    acc = np.zeros_like(w)
    for delta, n_k in updates:
        if delta.shape != w.shape:
            raise ValueError("dimension mismatch in update")
        acc = acc + (n_k / n_total) * delta
    return w - eta * acc


def global_loss(w: np.ndarray, shards: list[Shard]) -> float:
    if not shards:
        raise ValueError("no shards")
    n_total = sum(s.n_k for s in shards)
    return sum((s.n_k / n_total) * local_loss(w, s) for s in shards)


def global_gradient(w: np.ndarray, shards: list[Shard]) -> np.ndarray:
    n_total = sum(s.n_k for s in shards)
    acc = np.zeros_like(w)
    for s in sorted(shards, key=lambda s: s.client_id):
        acc = acc + (s.n_k / n_total) * local_gradient(w, s)
    return acc


def closed_form_optimum(shards: list[Shard]) -> np.ndarray:
    """Exact minimizer of the weighted quadratic: the n_k-weighted mean of the
    client centers."""
    if not all(isinstance(s, QuadraticShard) for s in shards):
        raise ValueError("closed-form optimum requires quadratic shards")
    n_total = sum(s.n_k for s in shards)
    acc = np.zeros_like(shards[0].center)
    for s in sorted(shards, key=lambda s: s.client_id):
        acc = acc + (s.n_k / n_total) * s.center
    return acc


def estimate_lipschitz(shards: list[Shard]) -> float:
    """Quadratic: the Hessian is the identity, so L = 1. Bag-of-words
    classifier: the standard logistic bound 0.25 * max_i ||x_i||^2
    (an estimate, not exact)."""
    if all(isinstance(s, QuadraticShard) for s in shards):
        return 1.0
    worst = 0.0
    for s in shards:
        sq = s.features.multiply(s.features).sum(axis=1)
        worst = max(worst, float(np.max(sq)))
    return 0.25 * worst if worst > 0 else 1.0


def model_dim(shards: list[Shard]) -> int:
    s0 = shards[0]
    if isinstance(s0, QuadraticShard):
        return s0.center.shape[0]
    return s0.n_classes * s0.n_buckets


def _weight_hash(w: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(w, dtype=np.float64).tobytes()).hexdigest()


def run_simulation(shards: list[Shard], cfg: FedConfig) -> TrainingTrace:
    """Execute cfg.rounds of local update + aggregation from w = 0.

    Deterministic for identical (shards, cfg): clients are processed in
    ascending client_id order and the aggregation sum order is fixed.
    """
    if not shards:
        raise ValueError("no shards")
    shards = sorted(shards, key=lambda s: s.client_id)
    w = np.zeros(model_dim(shards), dtype=np.float64)
    lip = cfg.lipschitz_l if cfg.lipschitz_l is not None else estimate_lipschitz(shards)

    trace = TrainingTrace(lipschitz_l=lip)
    loss = global_loss(w, shards)
    grad_norm = float(np.linalg.norm(global_gradient(w, shards)))
    trace.records.append(RoundRecord(0, loss, grad_norm, _weight_hash(w)))

    for t in range(1, cfg.rounds + 1):
        updates = [(local_update(w, s, cfg), s.n_k) for s in shards]
        w = aggregate(updates, w, cfg.eta)
        loss = global_loss(w, shards)
        if not np.isfinite(loss):
            raise DivergenceError(t)
        grad_norm = float(np.linalg.norm(global_gradient(w, shards)))
        trace.records.append(RoundRecord(t, loss, grad_norm, _weight_hash(w)))

    trace.final_w = w
    return trace


@dataclass(frozen=True)
class DescentReport:
    passed: bool
    eta: float
    lipschitz_l: float
    eta_in_stable_region: bool
    first_violation: int | None
    tol: float


def check_descent(trace: TrainingTrace, cfg: FedConfig, tol: float = 1e-9) -> DescentReport:
    """Verify the per-round descent condition L(w_{t+1}) <= L(w_t) + tol,
    which the smoothness analysis guarantees whenever 0 < eta < 2/L."""
    if len(trace.records) < 2:
        raise ValueError("trace too short for a descent check")
    lip = cfg.lipschitz_l if cfg.lipschitz_l is not None else trace.lipschitz_l
    stable = 0.0 < cfg.eta < 2.0 / lip
    first_violation = None
    for prev, nxt in zip(trace.records, trace.records[1:]):
        if nxt.loss > prev.loss + tol:
            first_violation = nxt.t
            break
    return DescentReport(
        passed=first_violation is None,
        eta=cfg.eta,
        lipschitz_l=lip,
        eta_in_stable_region=stable,
        first_violation=first_violation,
        tol=tol,
    )


def _stable_bucket(token: str, n_buckets: int) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % n_buckets


def hash_features(text: str, n_buckets: int = BOW_BUCKETS) -> sparse.csr_matrix:
    """Deterministic hashed bag-of-words counts for one document."""
    counts: dict[int, float] = {}
    for raw in text.lower().split():
        token = "".join(ch for ch in raw if ch.isalnum())
        if token:
            b = _stable_bucket(token, n_buckets)
            counts[b] = counts.get(b, 0.0) + 1.0
    cols = sorted(counts)
    data = [counts[c] for c in cols]
    return sparse.csr_matrix(
        (data, (np.zeros(len(cols), dtype=int), cols)), shape=(1, n_buckets)
    )


def make_bow_shards(
    docs_per_client: list[list[tuple[str, str]]],
    categories: tuple[str, ...] = CATEGORIES,
    n_buckets: int = BOW_BUCKETS,
) -> list[BowShard]:
    """Build classifier shards from (text, category-label) documents."""
    shards = []
    for client_id, docs in enumerate(docs_per_client):
        if not docs:
            continue
        feats = sparse.vstack([hash_features(text, n_buckets) for text, _ in docs]).tocsr()
        labels = np.array([categories.index(label) for _, label in docs], dtype=int)
        shards.append(
            BowShard(
                client_id=client_id,
                features=feats,
                labels=labels,
                n_k=len(docs),
                n_classes=len(categories),
                n_buckets=n_buckets,
            )
        )
    return shards


@dataclass(frozen=True)
class BowModel:
    w: np.ndarray
    categories: tuple[str, ...] = CATEGORIES
    n_buckets: int = BOW_BUCKETS


def classify_post(model: BowModel, post: Post) -> tuple[str, float]:
    """Argmax category of the hashed bag-of-words scores.

    Ties go to the earlier label in the model's category order. Posts with no
    tokens fall back to ("general", 0.0); an all-zero weight vector signals an
    untrained model.
    """
    if not np.any(model.w):
        raise UntrainedModelError("model weights are all zero")
    text = post.body + (" " + post.transcript if post.transcript else "")
    feats = hash_features(text, model.n_buckets)
    if feats.nnz == 0:
        return "general", 0.0
    mat = model.w.reshape(len(model.categories), model.n_buckets)
    scores = np.asarray(feats @ mat.T).reshape(-1)
    probs = _softmax(scores.reshape(1, -1)).reshape(-1)
    idx = int(np.argmax(scores))  # first max wins: earlier label on ties
    return model.categories[idx], float(probs[idx])


def bow_accuracy(model: BowModel, shards: list[BowShard]) -> float:
    """Pooled training accuracy of the classifier over every shard."""
    correct = 0
    total = 0
    mat = model.w.reshape(len(model.categories), model.n_buckets)
    for s in shards:
        scores = s.features @ mat.T
        pred = np.argmax(scores, axis=1)
        correct += int(np.sum(pred == s.labels))
        total += s.n_k
    return correct / total if total else 0.0
