"""FastAPI application implementing the embedding wire protocol.

GET /info  -> {"model", "dimension", "pooling", "max_tokens"}
POST /embed {"texts": [...]} -> {"embeddings": [[...]]}

Errors: 400 malformed body, 413 batch larger than max_batch, 500 backend
failure.
"""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, HTTPException, Request

from .backends import MODEL_CHECKPOINTS, make_backend


@dataclass(frozen=True)
class ServerConfig:
    model_name: str = "codebert"
    port: int = 8230
    max_batch: int = 64
    max_tokens: int = 256
    device: str = "cpu"
    backend: str = "transformers"

    def __post_init__(self):
        if self.model_name not in MODEL_CHECKPOINTS:
            raise ValueError(f"unknown model {self.model_name!r}")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


def create_app(cfg: ServerConfig, backend=None) -> FastAPI:
    """Build the service; an explicit backend overrides cfg.backend."""
    if backend is None:
        backend = make_backend(cfg.backend, cfg.model_name, cfg.max_tokens,
                               device=cfg.device)
    app = FastAPI(title="xsema-embed-server")
    app.state.backend = backend
    app.state.config = cfg

    @app.get("/info")
    def info():
        return {"model": cfg.model_name,
                "dimension": backend.dimension,
                "pooling": "mean",
                "max_tokens": cfg.max_tokens}

    @app.post("/embed")
    async def embed(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body is not JSON")
        if not isinstance(body, dict) or "texts" not in body:
            raise HTTPException(status_code=400,
                                detail='body must be {"texts": [...]}')
        texts = body["texts"]
        if (not isinstance(texts, list)
                or any(not isinstance(t, str) for t in texts)):
            raise HTTPException(status_code=400,
                                detail="texts must be a list of strings")
        if len(texts) > cfg.max_batch:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(texts)} exceeds max_batch "
                       f"{cfg.max_batch}")
        try:
            vectors = backend.embed(texts)
        except Exception as exc:
            raise HTTPException(status_code=500,
                                detail=f"embedding failed: {exc}")
        return {"embeddings": vectors}

    return app
