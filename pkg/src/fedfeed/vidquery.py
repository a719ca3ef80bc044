"""Video description retrieval: hashed-embedding node store, cosine-similarity
nearest-node lookup and retrieval-augmented prompt assembly.

The shipped embedder is a deterministic hashed bag-of-words (256 buckets,
L2-normalized) so the pipeline runs offline; external embedders plug in
through the same text -> unit-vector contract.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

EMBED_DIM = 256
_EMPTY_BUCKET = 0  # reserved; token buckets land in 1..EMBED_DIM-1

PROMPT_TEMPLATE = "You are a video assistant. Context: {description}\nQuestion: {question}\nAnswer:"


class VidQueryError(Exception):
    pass


@dataclass(frozen=True)
class EmbeddingNode:
    node_id: str
    video_id: str
    description: str
    embedding: np.ndarray


@dataclass(frozen=True)
class QueryAnswer:
    answer: str
    node_id: str
    similarity: float
    prompt: str


def _bucket(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return 1 + int.from_bytes(digest, "big") % (EMBED_DIM - 1)


def embed_text(text: str) -> np.ndarray:
    """Hashed term-frequency vector over EMBED_DIM buckets, L2-normalized.

    Empty text maps to the reserved bucket so the result is always unit norm.
    """
    vec = np.zeros(EMBED_DIM, dtype=np.float64)
    for raw in text.lower().split():
        token = "".join(ch for ch in raw if ch.isalnum())
        if token:
            vec[_bucket(token)] += 1.0
    if not vec.any():
        vec[_EMPTY_BUCKET] = 1.0
    return vec / np.linalg.norm(vec)


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(a @ b) / (na * nb)


@dataclass
class NodeStore:
    """Flat collection of embedding nodes scanned exhaustively per query.

    Reads are lock-free over a snapshot dict; writes are serialized.
    """

    dim: int = EMBED_DIM
    _nodes: dict[str, EmbeddingNode] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __len__(self) -> int:
        return len(self._nodes)

    def nodes(self) -> list[EmbeddingNode]:
        return sorted(self._nodes.values(), key=lambda n: n.node_id)

    def add_node(self, node: EmbeddingNode) -> None:
        if node.embedding.shape != (self.dim,):
            raise ValueError("embedding dimension mismatch")
        with self._lock:
            self._nodes[node.node_id] = node

    def nodes_for_video(self, video_id: str) -> list[EmbeddingNode]:
        return [n for n in self.nodes() if n.video_id == video_id]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for n in self.nodes():
                fh.write(
                    json.dumps(
                        {
                            "node_id": n.node_id,
                            "video_id": n.video_id,
                            "description": n.description,
                            "embedding": n.embedding.tolist(),
                        }
                    )
                    + "\n"
                )

    @classmethod
    def load(cls, path: str | Path, dim: int = EMBED_DIM) -> "NodeStore":
        store = cls(dim=dim)
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                store.add_node(
                    EmbeddingNode(
                        node_id=rec["node_id"],
                        video_id=rec["video_id"],
                        description=rec["description"],
                        embedding=np.array(rec["embedding"], dtype=np.float64),
                    )
                )
        return store


def index_video(store: NodeStore, video_id: str, description: str) -> str:
    """Embed and store a video description; re-indexing a video replaces its
    node in place (node ids derive from the video id)."""
    if not description.strip():
        raise VidQueryError("empty description")
    node_id = f"video:{video_id}"
    store.add_node(
        EmbeddingNode(
            node_id=node_id,
            video_id=video_id,
            description=description,
            embedding=embed_text(description),
        )
    )
    return node_id


def nearest_node(store: NodeStore, query: np.ndarray, k: int = 1) -> list[tuple[EmbeddingNode, float]]:
    """Exhaustive scan, descending cosine similarity, ties by ascending
    node_id; returns min(k, store size) results."""
    if len(store) == 0:
        raise VidQueryError("empty store")
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = [(n, cosine_similarity(query, n.embedding)) for n in store.nodes()]
    scored.sort(key=lambda pair: (-pair[1], pair[0].node_id))
    return scored[:k]


def stub_generator(prompt: str, description: str) -> str:
    """Offline answerer: echoes the retrieved context."""
    return f"Based on the video: {description}"


def answer_query(
    store: NodeStore,
    video_id: str,
    question: str,
    generator: Callable[[str, str], str] = stub_generator,
) -> QueryAnswer:
    """Embed the question, retrieve the closest node for the video, assemble
    the role-based prompt and invoke the generator."""
    if not question.strip():
        raise VidQueryError("empty question")
    candidates = store.nodes_for_video(video_id)
    if not candidates:
        raise VidQueryError(f"no indexed nodes for video {video_id!r}")
    q = embed_text(question)
    scored = [(n, cosine_similarity(q, n.embedding)) for n in candidates]
    scored.sort(key=lambda pair: (-pair[1], pair[0].node_id))
    node, sim = scored[0]
    prompt = PROMPT_TEMPLATE.format(description=node.description, question=question)
    return QueryAnswer(
        answer=generator(prompt, node.description),
        node_id=node.node_id,
        similarity=sim,
        prompt=prompt,
    )
