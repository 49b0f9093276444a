"""Sidecar command line: serve the HTTP API or run offline batch mode."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .batch import run_batch
from .encoder import load_encoder
from .service import DEFAULT_MAX_BATCH, create_app


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sidecar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8752)
    serve.add_argument("--model", default="hashlex", help='"hashlex" or "st:<model name>"')
    serve.add_argument("--dim", type=int, default=512, help="hashlex dimension")
    serve.add_argument("--max-batch", type=int, default=DEFAULT_MAX_BATCH)

    batch = sub.add_parser("batch", help="process a raw docs JSONL offline")
    batch.add_argument("--in", dest="in_path", required=True, help="raw docs JSONL")
    batch.add_argument("--embed-out", help="embedding provider file to write")
    batch.add_argument("--embed-format", choices=["binary", "csv"], default="binary")
    batch.add_argument("--lemma-out", help="lemma corpus JSONL to write")
    batch.add_argument("--parse-out", help="CoNLL-U file to write")
    batch.add_argument("--manifest", help="batch manifest JSON path")
    batch.add_argument("--model", default="hashlex")
    batch.add_argument("--dim", type=int, default=512)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    encoder = load_encoder(args.model, dim=args.dim)

    if args.command == "serve":
        import uvicorn

        app = create_app(encoder, max_batch=args.max_batch)
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
        return 0

    manifest = run_batch(
        Path(args.in_path),
        encoder,
        embed_out=Path(args.embed_out) if args.embed_out else None,
        lemma_out=Path(args.lemma_out) if args.lemma_out else None,
        parse_out=Path(args.parse_out) if args.parse_out else None,
        manifest_out=Path(args.manifest) if args.manifest else None,
        embed_format=args.embed_format,
    )
    summary = {k: manifest[k] for k in ("docs", "sentences_embedded", "provider_id")}
    summary["failures"] = len(manifest["failures"])
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
