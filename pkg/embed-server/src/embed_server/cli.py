"""Command-line launcher: pick a model checkpoint and serve it."""

from __future__ import annotations

import argparse

from .app import ServerConfig, create_app
from .backends import MODEL_CHECKPOINTS


def build_config(argv=None):
    """Parse arguments into (ServerConfig, host)."""
    parser = argparse.ArgumentParser(
        prog="xsema-embed-server",
        description="Serve a pre-trained code model behind the embedding "
                    "wire protocol")
    parser.add_argument("--model", default="codebert",
                        choices=sorted(MODEL_CHECKPOINTS))
    parser.add_argument("--port", type=int, default=8230)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--max-batch", type=int, default=64)
    parser.add_argument("--max-tokens", type=int, default=256)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--backend", default="transformers",
                        choices=["transformers", "hashing"],
                        help="hashing is a deterministic weights-free "
                             "fallback for offline testing")
    args = parser.parse_args(argv)
    cfg = ServerConfig(model_name=args.model, port=args.port,
                       max_batch=args.max_batch, max_tokens=args.max_tokens,
                       device=args.device, backend=args.backend)
    return cfg, args.host


def main() -> None:
    import uvicorn

    cfg, host = build_config()
    uvicorn.run(create_app(cfg), host=host, port=cfg.port)


if __name__ == "__main__":
    main()
