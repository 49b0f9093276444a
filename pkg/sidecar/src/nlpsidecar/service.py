"""HTTP service: /embed, /lemmatize, /parse, /healthz.

Stateless beyond the loaded encoder weights. /embed is deterministic and
order-preserving; /lemmatize and /parse return the corpus file content
(lemma JSONL / CoNLL-U) as the response body, with per-document failures
counted in the X-Sidecar-Skipped header rather than failing the batch.
"""

from __future__ import annotations

import json
import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .depparse import PARSER_VERSION, conllu_document
from .lemmatizer import LEMMATIZER_VERSION, lemma_sentences

log = logging.getLogger(__name__)

DEFAULT_MAX_BATCH = 64


class EmbedRequest(BaseModel):
    sentences: list[str]


class DocRecord(BaseModel):
    doc_id: str
    year: int
    text: str


class DocsRequest(BaseModel):
    docs: list[DocRecord]


def create_app(encoder=None, max_batch: int = DEFAULT_MAX_BATCH) -> FastAPI:
    app = FastAPI(title="nlp-sidecar")
    app.state.encoder = encoder
    app.state.max_batch = max_batch

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request"})

    def _encoder_or_503():
        enc = app.state.encoder
        if enc is None:
            return None, JSONResponse(status_code=503, content={"detail": "model not loaded"})
        return enc, None

    @app.get("/healthz")
    def healthz():
        enc, err = _encoder_or_503()
        if err is not None:
            return err
        return {
            "status": "ok",
            "provider_id": enc.provider_id,
            "dim": enc.dim,
            "normalizes": bool(getattr(enc, "normalizes", False)),
            "lemmatizer": LEMMATIZER_VERSION,
            "parser": PARSER_VERSION,
        }

    @app.post("/embed")
    def embed(request: EmbedRequest):
        enc, err = _encoder_or_503()
        if err is not None:
            return err
        if len(request.sentences) > app.state.max_batch:
            return JSONResponse(
                status_code=413,
                content={
                    "detail": f"batch of {len(request.sentences)} exceeds "
                    f"limit {app.state.max_batch}"
                },
            )
        vectors = enc.encode(request.sentences)
        return {
            "provider_id": enc.provider_id,
            "dim": enc.dim,
            "vectors": vectors.tolist(),
        }

    def _per_doc(docs, render):
        lines = []
        skipped = 0
        for doc in docs:
            try:
                lines.append(render(doc))
            except Exception as exc:  # per-doc failure, batch continues
                skipped += 1
                log.warning("doc %s failed: %s", doc.doc_id, exc)
        return "".join(lines), skipped

    @app.post("/lemmatize")
    def lemmatize_docs(request: DocsRequest):
        body, skipped = _per_doc(
            request.docs,
            lambda d: json.dumps(
                {"doc_id": d.doc_id, "year": d.year, "sentences": lemma_sentences(d.text)}
            )
            + "\n",
        )
        return PlainTextResponse(
            body,
            media_type="application/x-ndjson",
            headers={"X-Sidecar-Skipped": str(skipped)},
        )

    @app.post("/parse")
    def parse_docs(request: DocsRequest):
        body, skipped = _per_doc(
            request.docs, lambda d: conllu_document(d.doc_id, d.year, d.text)
        )
        return PlainTextResponse(
            body,
            media_type="text/plain",
            headers={"X-Sidecar-Skipped": str(skipped)},
        )

    return app
