"""Text embedding providers and the trained projection head.

Two providers implement the same contract (deterministic, fixed dimension):
a native signed-feature-hashing encoder that keeps the test suite hermetic,
and an HTTP client for the optional pre-trained-model server. A small MLP
trained with a temporary 3-class softmax head refines provider embeddings;
its 16-unit penultimate activations are the message-passing representation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import requests

from .core import CLASSES
from .errors import (DimensionMismatchError, DivergenceError,
                     MissingClassError, NetworkError, NonFiniteInputError,
                     RemoteEncoderError, ServerError)
from .eventtext import tokenize


@dataclass(frozen=True)
class HashingEncoderConfig:
    dimension: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 16:
            raise ValueError("dimension must be >= 16")


@dataclass(frozen=True)
class RemoteEncoderConfig:
    base_url: str
    batch_size: int = 32
    timeout: float = 30.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _token_hash(token: str, seed: int) -> int:
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=8,
                        key=seed.to_bytes(8, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


def hashing_embed(tokens: Sequence[str], cfg: HashingEncoderConfig) -> np.ndarray:
    """Signed feature hashing: seeded bucket + sign per token, L2-normalized.

    An empty token list maps to the zero vector (left unnormalized).
    """
    vec = np.zeros(cfg.dimension, dtype=np.float64)
    for tok in tokens:
        h = _token_hash(tok, cfg.seed)
        bucket = h % cfg.dimension
        sign = 1.0 if (h >> 63) & 1 else -1.0
        vec[bucket] += sign
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


class HashingProvider:
    """Deterministic fallback embedding provider (no model weights needed)."""

    def __init__(self, cfg: Optional[HashingEncoderConfig] = None):
        self.cfg = cfg or HashingEncoderConfig()

    @property
    def dimension(self) -> int:
        return self.cfg.dimension

    def describe(self) -> dict:
        return {"kind": "hashing", "dimension": self.cfg.dimension,
                "seed": self.cfg.seed}

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        return np.array([hashing_embed(tokenize(t), self.cfg) for t in texts]
                        ).reshape(len(texts), self.cfg.dimension)


class RemoteProvider:
    """Client for the embedding wire protocol (GET /info, POST /embed)."""

    def __init__(self, cfg: RemoteEncoderConfig, session=None):
        self.cfg = cfg
        self._session = session or requests.Session()
        self._info = None

    @property
    def info(self) -> dict:
        if self._info is None:
            try:
                resp = self._session.get(self.cfg.base_url.rstrip("/") + "/info",
                                         timeout=self.cfg.timeout)
            except requests.RequestException as exc:
                raise NetworkError(str(exc)) from exc
            if resp.status_code != 200:
                raise ServerError(resp.status_code, resp.text)
            self._info = resp.json()
        return self._info

    @property
    def dimension(self) -> int:
        return int(self.info["dimension"])

    def describe(self) -> dict:
        return {"kind": "remote", "base_url": self.cfg.base_url,
                "model": self.info.get("model"), "dimension": self.dimension}

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        return remote_embed(self.cfg, texts, session=self._session)


def remote_embed(cfg: RemoteEncoderConfig, texts: Sequence[str],
                 session=None) -> np.ndarray:
    """Embed texts via the server, chunked by batch_size, order-preserving."""
    session = session or requests.Session()
    base = cfg.base_url.rstrip("/")
    try:
        resp = session.get(base + "/info", timeout=cfg.timeout)
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    if resp.status_code != 200:
        raise ServerError(resp.status_code, resp.text)
    dim = int(resp.json()["dimension"])
    if not texts:
        return np.zeros((0, dim), dtype=np.float64)
    out: List[List[float]] = []
    for start in range(0, len(texts), cfg.batch_size):
        chunk = list(texts[start:start + cfg.batch_size])
        try:
            resp = session.post(base + "/embed", json={"texts": chunk},
                                timeout=cfg.timeout)
        except requests.RequestException as exc:
            raise NetworkError(str(exc)) from exc
        if resp.status_code != 200:
            raise ServerError(resp.status_code, resp.text)
        vectors = resp.json()["embeddings"]
        if len(vectors) != len(chunk):
            raise RemoteEncoderError(
                f"expected {len(chunk)} vectors, got {len(vectors)}")
        for vec in vectors:
            if len(vec) != dim:
                raise DimensionMismatchError(
                    f"server advertised dimension {dim}, vector has {len(vec)}")
        out.extend(vectors)
    return np.asarray(out, dtype=np.float64)


@dataclass(frozen=True)
class TrainingHyperparams:
    learning_rate: float = 1e-3
    epochs: int = 30
    batch_size: int = 64
    l2_penalty: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if min(self.learning_rate, self.epochs, self.batch_size) <= 0:
            raise ValueError("hyperparameters must be positive")
        if self.l2_penalty < 0:
            raise ValueError("l2_penalty must be >= 0")


class ProjectionHead:
    """[d_in, 64, 16, 3] feed-forward net with rectified-linear hiddens.

    The softmax output layer exists for training and diagnostics only; the
    16-unit penultimate activations are the downstream representation.
    """

    HIDDEN1 = 64
    HIDDEN2 = 16
    N_CLASSES = 3

    def __init__(self, d_in: int, rng: Optional[np.random.Generator] = None):
        self.d_in = d_in
        rng = rng or np.random.default_rng(0)
        # He-scaled init; small positive hidden biases keep units off the
        # rectifier kink so gradients flow even for all-zero inputs
        self.w1 = rng.normal(0.0, np.sqrt(2.0 / d_in), (d_in, self.HIDDEN1))
        self.b1 = np.full(self.HIDDEN1, 0.01)
        self.w2 = rng.normal(0.0, np.sqrt(2.0 / self.HIDDEN1),
                             (self.HIDDEN1, self.HIDDEN2))
        self.b2 = np.full(self.HIDDEN2, 0.01)
        self.w3 = rng.normal(0.0, np.sqrt(2.0 / self.HIDDEN2),
                             (self.HIDDEN2, self.N_CLASSES))
        self.b3 = np.zeros(self.N_CLASSES)

    # --- forward ---

    def _forward(self, x: np.ndarray):
        h1 = np.maximum(0.0, x @ self.w1 + self.b1)
        h2 = np.maximum(0.0, h1 @ self.w2 + self.b2)
        logits = h2 @ self.w3 + self.b3
        return h1, h2, logits

    def project(self, embedding: np.ndarray) -> np.ndarray:
        """16-dim penultimate activations for one embedding vector."""
        embedding = np.asarray(embedding, dtype=np.float64)
        if embedding.shape != (self.d_in,):
            raise DimensionMismatchError(
                f"expected embedding of length {self.d_in}, got {embedding.shape}")
        _, h2, _ = self._forward(embedding[None, :])
        return h2[0]

    def project_batch(self, embeddings: np.ndarray) -> np.ndarray:
        embeddings = np.asarray(embeddings, dtype=np.float64)
        if embeddings.ndim != 2 or embeddings.shape[1] != self.d_in:
            raise DimensionMismatchError(
                f"expected (*, {self.d_in}) matrix, got {embeddings.shape}")
        _, h2, _ = self._forward(embeddings)
        return h2

    def predict_proba(self, embeddings: np.ndarray) -> np.ndarray:
        _, _, logits = self._forward(np.asarray(embeddings, dtype=np.float64))
        logits = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        return exp / exp.sum(axis=1, keepdims=True)

    # --- loss and gradients ---

    def loss(self, x: np.ndarray, y: np.ndarray,
             l2_penalty: float) -> float:
        proba = self.predict_proba(x)
        ce = -np.mean(np.log(proba[np.arange(len(y)), y] + 1e-300))
        reg = 0.5 * l2_penalty * sum(
            float((w ** 2).sum()) for w in (self.w1, self.w2, self.w3))
        return float(ce + reg)

    def gradients(self, x: np.ndarray, y: np.ndarray, l2_penalty: float):
        n = len(y)
        h1, h2, logits = self._forward(x)
        logits = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        proba = exp / exp.sum(axis=1, keepdims=True)
        delta3 = proba.copy()
        delta3[np.arange(n), y] -= 1.0
        delta3 /= n
        gw3 = h2.T @ delta3 + l2_penalty * self.w3
        gb3 = delta3.sum(axis=0)
        delta2 = (delta3 @ self.w3.T) * (h2 > 0)
        gw2 = h1.T @ delta2 + l2_penalty * self.w2
        gb2 = delta2.sum(axis=0)
        delta1 = (delta2 @ self.w2.T) * (h1 > 0)
        gw1 = x.T @ delta1 + l2_penalty * self.w1
        gb1 = delta1.sum(axis=0)
        return {"w1": gw1, "b1": gb1, "w2": gw2, "b2": gb2,
                "w3": gw3, "b3": gb3}

    # --- serialization ---

    def to_dict(self) -> dict:
        return {"d_in": self.d_in,
                **{name: getattr(self, name).tolist()
                   for name in ("w1", "b1", "w2", "b2", "w3", "b3")}}

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectionHead":
        head = cls(int(data["d_in"]))
        for name in ("w1", "b1", "w2", "b2", "w3", "b3"):
            setattr(head, name, np.asarray(data[name], dtype=np.float64))
        return head


def _label_indices(labels) -> np.ndarray:
    idx = []
    for lab in labels:
        value = lab.value if hasattr(lab, "value") else lab
        if isinstance(value, str):
            idx.append(CLASSES.index(value))
        else:
            idx.append(int(value))
    return np.asarray(idx, dtype=np.int64)


def train_projection(embeddings: np.ndarray, labels,
                     hp: Optional[TrainingHyperparams] = None) -> ProjectionHead:
    """Train the projection head with cross-entropy + L2 via mini-batch SGD.

    Deterministic given hp.seed (initialization and shuffling).
    """
    hp = hp or TrainingHyperparams()
    x = np.asarray(embeddings, dtype=np.float64)
    if not np.isfinite(x).all():
        raise NonFiniteInputError("embedding matrix contains non-finite values")
    y = _label_indices(labels)
    present = set(y.tolist())
    missing = [CLASSES[i] for i in range(len(CLASSES)) if i not in present]
    if missing:
        raise MissingClassError(f"no samples for classes: {missing}")
    rng = np.random.default_rng(hp.seed)
    head = ProjectionHead(x.shape[1], rng=rng)
    n = len(y)
    for epoch in range(hp.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hp.batch_size):
            batch = order[start:start + hp.batch_size]
            grads = head.gradients(x[batch], y[batch], hp.l2_penalty)
            for name, g in grads.items():
                setattr(head, name, getattr(head, name) - hp.learning_rate * g)
        if not np.isfinite(head.loss(x, y, hp.l2_penalty)):
            raise DivergenceError(epoch)
    return head


def gradient_check(head: ProjectionHead, embeddings: np.ndarray, labels,
                   n_params: int = 50, step: float = 1e-5,
                   l2_penalty: float = 1e-4, seed: int = 0) -> float:
    """Max relative error of analytic vs central-finite-difference gradients.

    Samples at least n_params parameters across all weight and bias arrays.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    y = _label_indices(labels)
    if len(y) == 0:
        raise ValueError("batch must be non-empty")
    rng = np.random.default_rng(seed)
    analytic = head.gradients(x, y, l2_penalty)
    names = ("w1", "b1", "w2", "b2", "w3", "b3")
    max_rel = 0.0
    for _ in range(n_params):
        name = names[rng.integers(len(names))]
        arr = getattr(head, name)
        flat_idx = int(rng.integers(arr.size))
        idx = np.unravel_index(flat_idx, arr.shape)
        orig = arr[idx]
        arr[idx] = orig + step
        plus = head.loss(x, y, l2_penalty)
        arr[idx] = orig - step
        minus = head.loss(x, y, l2_penalty)
        arr[idx] = orig
        numeric = (plus - minus) / (2.0 * step)
        exact = analytic[name][idx]
        denom = max(abs(numeric), abs(exact), 1e-8)
        max_rel = max(max_rel, abs(numeric - exact) / denom)
    return max_rel
