"""Embedding backends behind the HTTP service.

TransformersBackend wraps a pre-trained code model and mean-pools the final
hidden states over non-padding positions. HashingBackend is a deterministic
stand-in with the same interface and dimension, so the service (and every
client contract) can be tested without model weights.
"""

from __future__ import annotations

import hashlib
import re
from typing import List, Sequence

import numpy as np

MODEL_CHECKPOINTS = {
    "codebert": "microsoft/codebert-base",
    "graphcodebert": "microsoft/graphcodebert-base",
    "unixcoder": "microsoft/unixcoder-base",
}

# all three checkpoints are RoBERTa-base sized
_MODEL_DIMENSION = 768


class TransformersBackend:
    """Mean-pooled sentence vectors from a pre-trained code model.

    The model runs in evaluation mode with gradients disabled, so repeated
    requests for the same text return identical vectors.
    """

    def __init__(self, model_name: str, max_tokens: int = 256,
                 device: str = "cpu"):
        if model_name not in MODEL_CHECKPOINTS:
            raise ValueError(f"unknown model {model_name!r}; expected one of "
                             f"{sorted(MODEL_CHECKPOINTS)}")
        import torch
        from transformers import AutoModel, AutoTokenizer

        self._torch = torch
        self.model_name = model_name
        self.max_tokens = max_tokens
        checkpoint = MODEL_CHECKPOINTS[model_name]
        self._tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self._model = AutoModel.from_pretrained(checkpoint).to(device).eval()
        self._device = device
        self.dimension = int(self._model.config.hidden_size)

    def embed(self, texts: Sequence[str]) -> List[List[float]]:
        torch = self._torch
        batch = self._tokenizer(list(texts), padding=True, truncation=True,
                                max_length=self.max_tokens,
                                return_tensors="pt").to(self._device)
        with torch.no_grad():
            hidden = self._model(**batch).last_hidden_state
        mask = batch["attention_mask"].unsqueeze(-1).to(hidden.dtype)
        summed = (hidden * mask).sum(dim=1)
        counts = mask.sum(dim=1).clamp(min=1.0)
        return (summed / counts).cpu().numpy().tolist()


class HashingBackend:
    """Deterministic fallback: mean of signed per-token hash vectors.

    Mirrors the real backend's shape (768-dim vectors, truncation at
    max_tokens, mean pooling), with no model weights required.
    """

    def __init__(self, model_name: str = "codebert", max_tokens: int = 256,
                 dimension: int = _MODEL_DIMENSION):
        self.model_name = model_name
        self.max_tokens = max_tokens
        self.dimension = dimension

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return rng.standard_normal(self.dimension)

    def embed(self, texts: Sequence[str]) -> List[List[float]]:
        out = []
        for text in texts:
            tokens = re.findall(r"\w+|[^\w\s]", text)[:self.max_tokens]
            if not tokens:
                out.append([0.0] * self.dimension)
                continue
            stacked = np.vstack([self._token_vector(t) for t in tokens])
            out.append(stacked.mean(axis=0).tolist())
        return out


def make_backend(kind: str, model_name: str, max_tokens: int,
                 device: str = "cpu"):
    if kind == "transformers":
        return TransformersBackend(model_name, max_tokens=max_tokens,
                                   device=device)
    if kind == "hashing":
        return HashingBackend(model_name, max_tokens=max_tokens)
    raise ValueError(f"unknown backend kind {kind!r}")
