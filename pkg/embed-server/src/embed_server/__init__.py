"""HTTP embedding service speaking the wire protocol used by xsema's
remote encoder: GET /info for the model descriptor, POST /embed for
batched sentence vectors."""

from .app import ServerConfig, create_app
from .backends import (MODEL_CHECKPOINTS, HashingBackend, TransformersBackend,
                       make_backend)

__all__ = [
    "ServerConfig",
    "create_app",
    "MODEL_CHECKPOINTS",
    "HashingBackend",
    "TransformersBackend",
    "make_backend",
]

__version__ = "0.1.0"
