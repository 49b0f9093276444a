"""Offline batch mode: raw docs JSONL in, provider files out.

Outputs load directly through the analysis toolkit's file provider and
corpus loaders. Embedding files are keyed by the shared sentence hash (see
conventions). Per-document failures are recorded in the batch manifest,
never fatal to the batch.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .conventions import sentence_hash, split_sentences
from .depparse import PARSER_VERSION, conllu_document
from .lemmatizer import LEMMATIZER_VERSION, lemma_sentences

BINARY_MAGIC = b"LEXEMB01"
UNINFORMATIVE_TAGS = ("PUNCT", "SYM", "SPACE", "NUM")


def write_embedding_csv(path: Path, provider_id: str, dim: int, vectors: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"provider_id={provider_id},dim={dim}\n")
        for key in sorted(vectors):
            fh.write(key + "," + ",".join(repr(float(x)) for x in vectors[key]) + "\n")


def write_embedding_binary(path: Path, provider_id: str, dim: int, vectors: dict) -> None:
    pid = provider_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack(">H", len(pid)))
        fh.write(pid)
        fh.write(struct.pack(">I", dim))
        fh.write(struct.pack(">Q", len(vectors)))
        for key in sorted(vectors):
            fh.write(struct.pack(">Q", int(key, 16)))
            fh.write(np.asarray(vectors[key], dtype="<f8").tobytes())


def run_batch(
    in_path: Path,
    encoder,
    embed_out: Path | None = None,
    lemma_out: Path | None = None,
    parse_out: Path | None = None,
    manifest_out: Path | None = None,
    embed_format: str = "binary",
    batch_size: int = 64,
) -> dict:
    """Process a raw-docs JSONL file; returns (and optionally writes) the manifest."""
    docs = []
    failures = []
    with open(in_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                docs.append((str(rec["doc_id"]), int(rec["year"]), str(rec["text"])))
            except (ValueError, KeyError, TypeError) as exc:
                failures.append({"line": lineno, "error": str(exc)})

    lemma_records = 0
    if lemma_out is not None:
        with open(lemma_out, "w", encoding="utf-8", newline="") as fh:
            for doc_id, year, text in docs:
                sentences = lemma_sentences(text)
                fh.write(
                    json.dumps({"doc_id": doc_id, "year": year, "sentences": sentences})
                    + "\n"
                )
                lemma_records += 1

    parse_records = 0
    if parse_out is not None:
        with open(parse_out, "w", encoding="utf-8", newline="") as fh:
            for doc_id, year, text in docs:
                fh.write(conllu_document(doc_id, year, text))
                parse_records += 1

    embedded = 0
    if embed_out is not None:
        vectors: dict[str, np.ndarray] = {}
        pending: list[tuple[str, str]] = []

        def flush():
            nonlocal embedded
            if not pending:
                return
            batch_vecs = encoder.encode([s for _, s in pending])
            for (key, _), vec in zip(pending, batch_vecs):
                vectors[key] = vec
            embedded += len(pending)
            pending.clear()

        seen = set()
        for _, _, text in docs:
            for sentence in split_sentences(text):
                key = sentence_hash(sentence)
                if key in seen:
                    continue
                seen.add(key)
                pending.append((key, sentence))
                if len(pending) >= batch_size:
                    flush()
        flush()
        writer = write_embedding_binary if embed_format == "binary" else write_embedding_csv
        writer(embed_out, encoder.provider_id, encoder.dim, vectors)

    manifest = {
        "input": str(in_path),
        "docs": len(docs),
        "failures": failures,
        "provider_id": encoder.provider_id,
        "dim": encoder.dim,
        "normalizes": bool(getattr(encoder, "normalizes", False)),
        "lemmatizer": LEMMATIZER_VERSION,
        "parser": PARSER_VERSION,
        "uninformative_tags": list(UNINFORMATIVE_TAGS),
        "lemma_records": lemma_records,
        "parse_records": parse_records,
        "sentences_embedded": embedded,
    }
    if manifest_out is not None:
        manifest_out.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return manifest
